//! System parameters, units, the single-excitation basis and disorder sampling.
//!
//! Every rate is stored as an angular frequency in rad/ns. Configuration files
//! quote rates the way experimentalists do, as `x GHz` meaning `rate / 2π = x`,
//! so `g_ghz = 5` is stored as `g = 2π·5 rad/ns`.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default emitter-cavity coupling, g/2π = 5 GHz.
pub const DEFAULT_G_GHZ: f64 = 5.0;
/// Default cavity loss, κ/2π = 10 GHz.
pub const DEFAULT_KAPPA_GHZ: f64 = 10.0;
/// Default emitter decay, γ/2π = 1/5.8 GHz.
pub const DEFAULT_GAMMA_GHZ: f64 = 1.0 / 5.8;
/// Default hopping ratio J/g.
pub const DEFAULT_J_OVER_G: f64 = 0.1;

/// `x` GHz (cyclic) to rad/ns.
#[inline]
pub fn ghz_to_angular(x: f64) -> f64 {
    TAU * x
}

/// rad/ns to GHz (cyclic).
#[inline]
pub fn angular_to_ghz(w: f64) -> f64 {
    w / TAU
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl Boundary {
    /// Nearest-neighbour cavity bonds `(n, n')` of an `n_cavities` chain.
    ///
    /// A periodic chain of one or two cavities repeats bonds, matching the
    /// identification `a_{N+1} ≡ a_1` term by term.
    pub fn bonds(self, n_cavities: usize) -> Vec<(usize, usize)> {
        match self {
            Boundary::Open => (0..n_cavities.saturating_sub(1)).map(|n| (n, n + 1)).collect(),
            Boundary::Periodic => (0..n_cavities).map(|n| (n, (n + 1) % n_cavities)).collect(),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(format!("expected `open` or `periodic`, got `{other}`")),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

/// Geometry and physical rates of a Tavis-Cummings-Hubbard array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n_cavities: usize,
    pub emitters_per_cavity: usize,
    /// Cavity resonance, rad/ns.
    pub omega_c: f64,
    /// Emitter-cavity coupling, rad/ns.
    pub g: f64,
    /// Cavity-cavity hopping J, rad/ns.
    pub j_hop: f64,
    /// Cavity loss κ, rad/ns.
    pub kappa: f64,
    /// Emitter decay γ, rad/ns.
    pub gamma: f64,
    /// Disorder width Δ = 2σ of the emitter frequency distribution, rad/ns.
    pub delta: f64,
    pub boundary: Boundary,
}

impl SystemParams {
    /// An `n`-cavity array with `m` emitters per cavity at the default rates,
    /// J/g = 0.1 and no disorder.
    pub fn new(n_cavities: usize, emitters_per_cavity: usize) -> Self {
        let g = ghz_to_angular(DEFAULT_G_GHZ);
        SystemParams {
            n_cavities,
            emitters_per_cavity,
            omega_c: 0.0,
            g,
            j_hop: DEFAULT_J_OVER_G * g,
            kappa: ghz_to_angular(DEFAULT_KAPPA_GHZ),
            gamma: ghz_to_angular(DEFAULT_GAMMA_GHZ),
            delta: 0.0,
            boundary: Boundary::Open,
        }
    }

    pub fn with_j_over_g(mut self, ratio: f64) -> Self {
        self.j_hop = ratio * self.g;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Disorder as a multiple of the collective coupling g√M.
    pub fn with_delta_in_collective_units(mut self, factor: f64) -> Self {
        self.delta = factor * self.collective_coupling();
        self
    }

    pub fn with_losses(mut self, kappa: f64, gamma: f64) -> Self {
        self.kappa = kappa;
        self.gamma = gamma;
        self
    }

    pub fn lossless(self) -> Self {
        self.with_losses(0.0, 0.0)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Collective coupling g√M.
    pub fn collective_coupling(&self) -> f64 {
        self.g * (self.emitters_per_cavity as f64).sqrt()
    }

    pub fn j_over_g(&self) -> f64 {
        self.j_hop / self.g
    }

    /// Number of emitters in the whole array.
    pub fn n_emitters(&self) -> usize {
        self.n_cavities * self.emitters_per_cavity
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cavities == 0 {
            return Err(Error::invalid("n_cavities", "must be at least 1"));
        }
        let rates = [
            ("omega_c", self.omega_c),
            ("g", self.g),
            ("j_hop", self.j_hop),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ];
        for (name, value) in rates {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {value}")));
            }
        }
        for (name, value) in [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if value < 0.0 {
                return Err(Error::invalid(name, format!("must be non-negative, got {value}")));
            }
        }
        Ok(())
    }
}

/// How a disorder width is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeltaSpec {
    /// Δ/2π in GHz.
    AbsoluteGhz { value: f64 },
    /// Δ = value·g√M. `m_ref` pins M (e.g. a fixed Δ = g√3 while M is swept);
    /// `None` uses the array's own M.
    UnitsOfGSqrtM { value: f64, m_ref: Option<usize> },
}

impl DeltaSpec {
    pub fn collective(value: f64) -> Self {
        DeltaSpec::UnitsOfGSqrtM { value, m_ref: None }
    }

    /// Δ in rad/ns for an array with coupling `g` and `m` emitters per cavity.
    pub fn resolve(&self, g: f64, m: usize) -> f64 {
        match *self {
            DeltaSpec::AbsoluteGhz { value } => ghz_to_angular(value),
            DeltaSpec::UnitsOfGSqrtM { value, m_ref } => value * g * (m_ref.unwrap_or(m) as f64).sqrt(),
        }
    }
}

/// One array element: a cavity or an emitter `(node, slot)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Element {
    Cavity(usize),
    Emitter(usize, usize),
}

impl Element {
    pub fn node(&self) -> usize {
        match *self {
            Element::Cavity(n) | Element::Emitter(n, _) => n,
        }
    }

    /// Column label used in CSV output: `cav_1`, `em_1_2` (1-based, as in plots).
    pub fn label(&self) -> String {
        match *self {
            Element::Cavity(n) => format!("cav_{}", n + 1),
            Element::Emitter(n, m) => format!("em_{}_{}", n + 1, m + 1),
        }
    }
}

/// Index map of the one-excitation sector: cavity `n` ↦ `n`,
/// emitter `(n, m)` ↦ `N + n·M + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleExcitationBasis {
    n_cavities: usize,
    emitters_per_cavity: usize,
}

impl SingleExcitationBasis {
    pub fn new(n_cavities: usize, emitters_per_cavity: usize) -> Self {
        SingleExcitationBasis {
            n_cavities,
            emitters_per_cavity,
        }
    }

    pub fn n_cavities(&self) -> usize {
        self.n_cavities
    }

    pub fn emitters_per_cavity(&self) -> usize {
        self.emitters_per_cavity
    }

    pub fn dimension(&self) -> usize {
        self.n_cavities * (self.emitters_per_cavity + 1)
    }

    #[inline]
    pub fn index_of_cavity(&self, n: usize) -> usize {
        debug_assert!(n < self.n_cavities);
        n
    }

    #[inline]
    pub fn index_of_emitter(&self, n: usize, m: usize) -> usize {
        debug_assert!(n < self.n_cavities && m < self.emitters_per_cavity);
        self.n_cavities + n * self.emitters_per_cavity + m
    }

    pub fn index_of(&self, element: Element) -> usize {
        match element {
            Element::Cavity(n) => self.index_of_cavity(n),
            Element::Emitter(n, m) => self.index_of_emitter(n, m),
        }
    }

    /// Inverse lookup; `None` outside `0..dimension`.
    pub fn element(&self, index: usize) -> Option<Element> {
        if index < self.n_cavities {
            Some(Element::Cavity(index))
        } else if index < self.dimension() {
            let k = index - self.n_cavities;
            Some(Element::Emitter(
                k / self.emitters_per_cavity,
                k % self.emitters_per_cavity,
            ))
        } else {
            None
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.dimension()).map(|i| self.element(i).expect("index in range"))
    }
}

pub fn build_basis(params: &SystemParams) -> SingleExcitationBasis {
    SingleExcitationBasis::new(params.n_cavities, params.emitters_per_cavity)
}

/// One disorder draw of the emitter frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub params: SystemParams,
    /// Row-major `N × M` emitter frequencies, rad/ns.
    omega_e: Vec<f64>,
    pub seed: u64,
}

impl Realization {
    pub fn from_frequencies(params: SystemParams, omega_e: Vec<f64>, seed: u64) -> Result<Self> {
        params.validate()?;
        if omega_e.len() != params.n_emitters() {
            return Err(Error::invalid(
                "omega_e",
                format!("expected {} entries, got {}", params.n_emitters(), omega_e.len()),
            ));
        }
        Ok(Realization {
            params,
            omega_e,
            seed,
        })
    }

    /// All emitters exactly on the cavity resonance.
    pub fn resonant(params: SystemParams) -> Self {
        Realization {
            omega_e: vec![params.omega_c; params.n_emitters()],
            params,
            seed: 0,
        }
    }

    pub fn omega_e(&self, n: usize, m: usize) -> f64 {
        self.omega_e[n * self.params.emitters_per_cavity + m]
    }

    /// Row-major `N × M` frequencies.
    pub fn emitter_frequencies(&self) -> &[f64] {
        &self.omega_e
    }
}

/// Draws every emitter frequency from a Gaussian centred on ω_c with
/// standard deviation Δ/2. The same `(params, seed)` always gives the same
/// frequencies.
pub fn sample_disorder(params: &SystemParams, seed: u64) -> Result<Realization> {
    params.validate()?;
    let count = params.n_emitters();
    if params.delta == 0.0 {
        return Ok(Realization {
            params: *params,
            omega_e: vec![params.omega_c; count],
            seed,
        });
    }
    let normal = Normal::new(params.omega_c, params.delta / 2.0)
        .map_err(|e| Error::invalid("delta", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega_e = (0..count).map(|_| normal.sample(&mut rng)).collect();
    Ok(Realization {
        params: *params,
        omega_e,
        seed,
    })
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed of realization `index` in a sweep driven by `master_seed`.
///
/// SplitMix64 finalizer over `master + (index + 1)·φ`: the affine step is
/// injective in `index` modulo 2⁶⁴ and the finalizer is a bijection, so
/// distinct indices never share a seed.
pub fn derive_realization_seed(master_seed: u64, realization_index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(realization_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
