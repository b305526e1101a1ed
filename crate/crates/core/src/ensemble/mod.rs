//! Disorder ensembles and parameter sweeps.
//!
//! A [`SweepSpec`] names a base array, one swept axis, optional series (extra
//! overrides, one curve each) and the observables to collect. [`run_sweep`]
//! draws `R` realizations per point, solves each one and reduces every
//! observable to a mean and a sample standard deviation.
//!
//! Realization `r` of every point uses seed
//! `derive_realization_seed(master_seed, r)`, so points along the axis share
//! their underlying random numbers and curves are smooth in the swept value.

mod presets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::effective::{solve_realization, EigenState};
use crate::error::{Error, Result};
use crate::metrics::{classify_bands, most_polaritonic_state, nodal_participation, polaritonic_participation, Band};
use crate::model::{
    derive_realization_seed, ghz_to_angular, sample_disorder, Boundary, DeltaSpec, SystemParams, DEFAULT_GAMMA_GHZ,
    DEFAULT_G_GHZ, DEFAULT_J_OVER_G, DEFAULT_KAPPA_GHZ,
};

pub use presets::{figure_preset, BandsPreset, Preset, PRESET_NAMES};

fn default_n() -> usize {
    5
}
fn default_m() -> usize {
    3
}
fn default_g() -> f64 {
    DEFAULT_G_GHZ
}
fn default_j() -> f64 {
    DEFAULT_J_OVER_G
}
fn default_kappa() -> f64 {
    DEFAULT_KAPPA_GHZ
}
fn default_gamma() -> f64 {
    DEFAULT_GAMMA_GHZ
}
fn default_delta() -> DeltaSpec {
    DeltaSpec::AbsoluteGhz { value: 0.0 }
}
fn default_realizations() -> usize {
    100
}

/// Base array of a sweep, rates in GHz (`rate / 2π`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    #[serde(default = "default_n")]
    pub n_cavities: usize,
    #[serde(default = "default_m")]
    pub emitters_per_cavity: usize,
    #[serde(default = "default_g")]
    pub g_ghz: f64,
    #[serde(default = "default_j")]
    pub j_over_g: f64,
    #[serde(default = "default_kappa")]
    pub kappa_ghz: f64,
    #[serde(default = "default_gamma")]
    pub gamma_ghz: f64,
    #[serde(default)]
    pub omega_c_ghz: f64,
    #[serde(default = "default_delta")]
    pub delta: DeltaSpec,
    #[serde(default)]
    pub boundary: Boundary,
}

impl Default for BaseSpec {
    fn default() -> Self {
        BaseSpec {
            n_cavities: default_n(),
            emitters_per_cavity: default_m(),
            g_ghz: DEFAULT_G_GHZ,
            j_over_g: DEFAULT_J_OVER_G,
            kappa_ghz: DEFAULT_KAPPA_GHZ,
            gamma_ghz: DEFAULT_GAMMA_GHZ,
            omega_c_ghz: 0.0,
            delta: default_delta(),
            boundary: Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    Delta,
    JOverG,
    NCavities,
    EmittersPerCavity,
    StateIndex,
}

impl AxisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisKind::Delta => "delta",
            AxisKind::JOverG => "j_over_g",
            AxisKind::NCavities => "n_cavities",
            AxisKind::EmittersPerCavity => "emitters_per_cavity",
            AxisKind::StateIndex => "state_index",
        }
    }
}

/// Units of the values of a `delta` axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaUnits {
    /// Multiples of `g√M` (of the point's own `M`).
    #[default]
    GSqrtM,
    /// `Δ/2π` in GHz.
    Ghz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
    #[serde(default)]
    pub delta_units: DeltaUnits,
}

/// Overrides that define one curve of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub label: String,
    #[serde(default)]
    pub j_over_g: Option<f64>,
    #[serde(default)]
    pub delta: Option<DeltaSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `Re E`, `Im E` of every state.
    Eigenvalues,
    /// Nodal participation of every state, plus band averages.
    PN,
    /// Polaritonic participation of every state, plus band averages.
    PP,
    /// Node weights of the lowest state.
    Occupancies,
    /// The most polaritonic state of each band.
    Mps,
    /// Energy and participation of the lowest state.
    LowestState,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Eigenvalues,
        Observable::PN,
        Observable::PP,
        Observable::Occupancies,
        Observable::Mps,
        Observable::LowestState,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Observable::Eigenvalues => "eigenvalues",
            Observable::PN => "p_n",
            Observable::PP => "p_p",
            Observable::Occupancies => "occupancies",
            Observable::Mps => "mps",
            Observable::LowestState => "lowest_state",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    #[serde(default)]
    pub base: BaseSpec,
    pub axis: Axis,
    #[serde(default)]
    pub series: Vec<Series>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub observables: Vec<Observable>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axis.values.is_empty() {
            return Err(Error::invalid("axis.values", "must not be empty"));
        }
        if self.realizations < 1 {
            return Err(Error::invalid("realizations", "must be at least 1"));
        }
        if self.observables.is_empty() {
            return Err(Error::invalid("observables", "must not be empty"));
        }
        let integral = matches!(
            self.axis.kind,
            AxisKind::NCavities | AxisKind::EmittersPerCavity | AxisKind::StateIndex
        );
        for &v in &self.axis.values {
            if !v.is_finite() || (integral && (v < 0.0 || v.fract() != 0.0)) {
                return Err(Error::invalid(
                    "axis.values",
                    format!("{v} is not valid on a {} axis", self.axis.kind.as_str()),
                ));
            }
        }
        for series in self.series_or_default() {
            for &v in &self.axis.values {
                let p = self.point_params(&series, v)?;
                if self.axis.kind == AxisKind::StateIndex && v as usize >= p.n_cavities * (p.emitters_per_cavity + 1) {
                    return Err(Error::invalid("axis.values", format!("state index {v} out of range")));
                }
            }
        }
        Ok(())
    }

    /// The declared series, or a single unnamed one.
    pub fn series_or_default(&self) -> Vec<Series> {
        if self.series.is_empty() {
            vec![Series {
                label: "base".to_string(),
                j_over_g: None,
                delta: None,
            }]
        } else {
            self.series.clone()
        }
    }

    /// Parameters at one axis value of one series.
    pub fn point_params(&self, series: &Series, value: f64) -> Result<SystemParams> {
        let b = &self.base;
        let mut n = b.n_cavities;
        let mut m = b.emitters_per_cavity;
        let mut j_over_g = series.j_over_g.unwrap_or(b.j_over_g);
        let mut delta = series.delta.unwrap_or(b.delta);
        match self.axis.kind {
            AxisKind::Delta => {
                delta = match self.axis.delta_units {
                    DeltaUnits::GSqrtM => DeltaSpec::collective(value),
                    DeltaUnits::Ghz => DeltaSpec::AbsoluteGhz { value },
                }
            }
            AxisKind::JOverG => j_over_g = value,
            AxisKind::NCavities => n = value as usize,
            AxisKind::EmittersPerCavity => m = value as usize,
            AxisKind::StateIndex => {}
        }
        let g = ghz_to_angular(b.g_ghz);
        let params = SystemParams {
            n_cavities: n,
            emitters_per_cavity: m,
            omega_c: ghz_to_angular(b.omega_c_ghz),
            g,
            j_hop: j_over_g * g,
            kappa: ghz_to_angular(b.kappa_ghz),
            gamma: ghz_to_angular(b.gamma_ghz),
            delta: delta.resolve(g, m),
            boundary: b.boundary,
        };
        params.validate()?;
        Ok(params)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text).map_err(|e| Error::ConfigSyntax(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a spec from a `.json` or `.toml` file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }
}

/// What a statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    State(usize),
    Band(Band),
    Node(usize),
    Lowest,
}

impl std::fmt::Display for Selector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Selector::State(i) => write!(f, "state_{i}"),
            Selector::Band(b) => write!(f, "band_{b}"),
            Selector::Node(n) => write!(f, "node_{n}"),
            Selector::Lowest => f.write_str("lowest"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation (divides by `R − 1`); zero for `R = 1`.
    pub std: f64,
    pub count: usize,
}

impl Stat {
    /// Mean and sample standard deviation, shifted by the first value so that
    /// identical samples give exactly that value and exactly zero spread.
    pub fn from_samples(xs: &[f64]) -> Stat {
        let count = xs.len();
        if count == 0 {
            return Stat {
                mean: f64::NAN,
                std: f64::NAN,
                count,
            };
        }
        let x0 = xs[0];
        let shift = xs.iter().map(|x| x - x0).sum::<f64>() / count as f64;
        let mean = x0 + shift;
        let std = if count > 1 {
            let ss: f64 = xs.iter().map(|x| (x - x0 - shift).powi(2)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, std, count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub observable: Observable,
    pub series: String,
    pub axis_value: f64,
    pub selector: Selector,
    pub quantity: &'static str,
    pub stat: Stat,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub spec_hash: String,
    pub records: Vec<Record>,
}

impl SweepResult {
    pub fn records_for(&self, observable: Observable) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(move |r| r.observable == observable)
    }

    pub fn get(&self, observable: Observable, series: &str, axis_value: f64, selector: Selector, quantity: &str) -> Option<Stat> {
        self.records
            .iter()
            .find(|r| {
                r.observable == observable
                    && r.series == series
                    && r.axis_value == axis_value
                    && r.selector == selector
                    && r.quantity == quantity
            })
            .map(|r| r.stat)
    }

    /// Provenance echoed next to the CSV tables.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.spec.name,
            "spec": self.spec,
            "spec_hash": self.spec_hash,
            "master_seed": self.spec.master_seed,
            "realizations": self.spec.realizations,
            "observables": self.spec.observables.iter().map(|o| o.as_str()).collect::<Vec<_>>(),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

type Sample = (Observable, Selector, &'static str, f64);

/// Observables of one solved realization, in a fixed order.
fn observe(states: &[EigenState], params: &SystemParams, observables: &[Observable]) -> Result<Vec<Sample>> {
    let labels = classify_bands(states, params)?;
    let mut out = Vec::new();
    let bands: Vec<Band> = [Band::Lower, Band::Subradiant, Band::Upper]
        .into_iter()
        .filter(|b| labels.contains(b))
        .collect();
    let band_mean = |band: Band, f: &dyn Fn(&EigenState) -> f64| -> f64 {
        let members: Vec<f64> = states.iter().zip(&labels).filter(|(_, l)| **l == band).map(|(s, _)| f(s)).collect();
        members.iter().sum::<f64>() / members.len() as f64
    };
    for &obs in observables {
        match obs {
            Observable::Eigenvalues => {
                for (i, s) in states.iter().enumerate() {
                    out.push((obs, Selector::State(i), "re_energy", s.energy.re));
                    out.push((obs, Selector::State(i), "im_energy", s.energy.im));
                }
            }
            Observable::PN | Observable::PP => {
                let f = |s: &EigenState| {
                    if obs == Observable::PN {
                        nodal_participation(s)
                    } else {
                        polaritonic_participation(s)
                    }
                };
                let (raw, norm) = if obs == Observable::PN {
                    ("p_n_raw", "p_n_norm")
                } else {
                    ("p_p_raw", "p_p_norm")
                };
                for (i, s) in states.iter().enumerate() {
                    let (r, n) = f(s);
                    out.push((obs, Selector::State(i), raw, r));
                    out.push((obs, Selector::State(i), norm, n));
                }
                for &b in &bands {
                    out.push((obs, Selector::Band(b), norm, band_mean(b, &|s| f(s).1)));
                }
            }
            Observable::Occupancies => {
                let occ = &states[0].occupancies;
                for n in 0..occ.n_nodes() {
                    out.push((obs, Selector::Node(n), "photon", occ.photon[n]));
                    out.push((obs, Selector::Node(n), "emitter", occ.emitter[n]));
                }
            }
            Observable::Mps => {
                for &b in &bands {
                    let i = most_polaritonic_state(states, &labels, b)?;
                    let s = &states[i];
                    out.push((obs, Selector::Band(b), "state_index", i as f64));
                    out.push((obs, Selector::Band(b), "re_energy", s.energy.re));
                    out.push((obs, Selector::Band(b), "p_n_norm", nodal_participation(s).1));
                    out.push((obs, Selector::Band(b), "p_p_norm", polaritonic_participation(s).1));
                }
            }
            Observable::LowestState => {
                let s = &states[0];
                out.push((obs, Selector::Lowest, "re_energy", s.energy.re));
                out.push((obs, Selector::Lowest, "im_energy", s.energy.im));
                out.push((obs, Selector::Lowest, "p_n_norm", nodal_participation(s).1));
                out.push((obs, Selector::Lowest, "p_p_norm", polaritonic_participation(s).1));
                out.push((obs, Selector::Lowest, "photon_weight", s.occupancies.total_photon()));
            }
        }
    }
    Ok(out)
}

/// Draws and reduces one point of the sweep.
fn run_point(spec: &SweepSpec, params: &SystemParams) -> Result<Vec<(Observable, Selector, &'static str, Stat)>> {
    let samples: Vec<Vec<Sample>> = (0..spec.realizations)
        .into_par_iter()
        .map(|r| {
            let seed = derive_realization_seed(spec.master_seed, r as u64);
            let real = sample_disorder(params, seed)?;
            let states = solve_realization(&real)?;
            observe(&states, params, &spec.observables)
        })
        .collect::<Result<_>>()?;
    let first = &samples[0];
    let mut out = Vec::with_capacity(first.len());
    for (k, &(obs, sel, q, _)) in first.iter().enumerate() {
        let xs: Vec<f64> = samples.iter().map(|s| s[k].3).collect();
        out.push((obs, sel, q, Stat::from_samples(&xs)));
    }
    Ok(out)
}

/// Runs a sweep on the global thread pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut records = Vec::new();
    for series in spec.series_or_default() {
        if spec.axis.kind == AxisKind::StateIndex {
            let params = spec.point_params(&series, 0.0)?;
            let stats = run_point(spec, &params)?;
            for &v in &spec.axis.values {
                let wanted = Selector::State(v as usize);
                for &(obs, sel, quantity, stat) in &stats {
                    if sel == wanted {
                        records.push(Record {
                            observable: obs,
                            series: series.label.clone(),
                            axis_value: v,
                            selector: sel,
                            quantity,
                            stat,
                        });
                    }
                }
            }
            continue;
        }
        for &v in &spec.axis.values {
            let params = spec.point_params(&series, v)?;
            for (obs, sel, quantity, stat) in run_point(spec, &params)? {
                records.push(Record {
                    observable: obs,
                    series: series.label.clone(),
                    axis_value: v,
                    selector: sel,
                    quantity,
                    stat,
                });
            }
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        spec_hash: spec.hash(),
        records,
    })
}

/// Runs a sweep on a dedicated pool of `jobs` threads.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    pool.install(|| run_sweep(spec))
}
