//! Named sweeps that regenerate the data behind each figure.

use super::{Axis, AxisKind, BaseSpec, DeltaUnits, Observable, Series, SweepSpec};
use crate::error::{Error, Result};
use crate::model::{Boundary, DeltaSpec};

pub const PRESET_NAMES: [&str; 9] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "figA1", "figA4", "figA5"];

/// Analytic band-structure parameters, in the figure's own units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandsPreset {
    pub n_cavities: usize,
    pub emitters_per_cavity: usize,
    pub boundary: Boundary,
    pub omega_0: f64,
    pub j: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Sweep(SweepSpec),
    Bands(BandsPreset),
}

impl Preset {
    pub fn into_sweep(self) -> Option<SweepSpec> {
        match self {
            Preset::Sweep(s) => Some(s),
            Preset::Bands(_) => None,
        }
    }
}

fn series_j(values: &[f64]) -> Vec<Series> {
    values
        .iter()
        .map(|&j| Series {
            label: format!("j_over_g={j}"),
            j_over_g: Some(j),
            delta: None,
        })
        .collect()
}

fn series_delta(values: &[f64]) -> Vec<Series> {
    values
        .iter()
        .map(|&d| Series {
            label: format!("delta={d}"),
            j_over_g: None,
            delta: Some(DeltaSpec::collective(d)),
        })
        .collect()
}

fn delta_axis(values: &[f64]) -> Axis {
    Axis {
        kind: AxisKind::Delta,
        values: values.to_vec(),
        delta_units: DeltaUnits::GSqrtM,
    }
}

/// Δ grid in units of `g√M`, up to `g√M`.
const DELTA_GRID: [f64; 9] = [0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0];

fn sweep(name: &str, base: BaseSpec, axis: Axis, series: Vec<Series>, observables: Vec<Observable>) -> Preset {
    Preset::Sweep(SweepSpec {
        name: name.to_string(),
        base,
        axis,
        series,
        realizations: 100,
        master_seed: 0,
        observables,
    })
}

/// Looks up a named preset.
///
/// ```
/// use tchm::ensemble::{figure_preset, AxisKind};
///
/// let spec = figure_preset("fig7")?.into_sweep().unwrap();
/// assert_eq!(spec.axis.kind, AxisKind::EmittersPerCavity);
/// assert_eq!(spec.base.n_cavities, 5);
/// assert!(figure_preset("fig99").is_err());
/// # Ok::<(), tchm::Error>(())
/// ```
pub fn figure_preset(name: &str) -> Result<Preset> {
    use Observable::*;
    let base = BaseSpec::default();
    let three_j = series_j(&[0.1, 1.0, 10.0]);
    let preset = match name {
        "fig3" => sweep("fig3", base, delta_axis(&DELTA_GRID), vec![], vec![Eigenvalues, PN, PP]),
        "fig4" => sweep(
            "fig4",
            base,
            Axis {
                kind: AxisKind::JOverG,
                values: vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0],
                delta_units: DeltaUnits::GSqrtM,
            },
            series_delta(&[0.0, 0.1, 0.25]),
            vec![LowestState],
        ),
        "fig5" => sweep("fig5", base, delta_axis(&DELTA_GRID), three_j, vec![Mps]),
        "fig6" => sweep(
            "fig6",
            BaseSpec {
                delta: DeltaSpec::collective(0.5),
                ..base
            },
            Axis {
                kind: AxisKind::NCavities,
                values: (2..=15).map(f64::from).collect(),
                delta_units: DeltaUnits::GSqrtM,
            },
            series_j(&[0.1, 1.0]),
            vec![Mps],
        ),
        "fig7" => sweep(
            "fig7",
            BaseSpec {
                delta: DeltaSpec::UnitsOfGSqrtM {
                    value: 1.0,
                    m_ref: Some(3),
                },
                ..base
            },
            Axis {
                kind: AxisKind::EmittersPerCavity,
                values: (3..=10).map(f64::from).collect(),
                delta_units: DeltaUnits::GSqrtM,
            },
            series_j(&[0.1, 1.0]),
            vec![Mps],
        ),
        "fig8" => {
            let mut series = Vec::new();
            for j in [0.1, 1.0, 10.0] {
                for d in [0.0, 0.25, 0.5, 1.0] {
                    series.push(Series {
                        label: format!("j_over_g={j},delta={d}"),
                        j_over_g: Some(j),
                        delta: Some(DeltaSpec::collective(d)),
                    });
                }
            }
            sweep(
                "fig8",
                BaseSpec {
                    n_cavities: 65,
                    ..base
                },
                Axis {
                    kind: AxisKind::StateIndex,
                    values: (0..65).map(f64::from).collect(),
                    delta_units: DeltaUnits::GSqrtM,
                },
                series,
                vec![PN, PP],
            )
        }
        "figA1" => Preset::Bands(BandsPreset {
            n_cavities: 50,
            emitters_per_cavity: 1,
            boundary: Boundary::Open,
            omega_0: 4.0,
            j: 1.0,
            g: 0.2,
        }),
        "figA4" => sweep("figA4", base, delta_axis(&DELTA_GRID), three_j, vec![Eigenvalues]),
        "figA5" => sweep("figA5", base, delta_axis(&DELTA_GRID), three_j, vec![PN, PP]),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(preset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_preset_is_valid() {
        for name in PRESET_NAMES {
            match figure_preset(name).unwrap() {
                Preset::Sweep(spec) => {
                    spec.validate().unwrap();
                    assert_eq!(spec.realizations, 100);
                    assert_eq!(spec.name, name);
                }
                Preset::Bands(b) => assert_eq!((b.omega_0, b.j, b.g), (4.0, 1.0, 0.2)),
            }
        }
    }

    #[test]
    fn fig3_parameters() {
        let spec = figure_preset("fig3").unwrap().into_sweep().unwrap();
        assert_eq!((spec.base.n_cavities, spec.base.emitters_per_cavity), (5, 3));
        assert_eq!(spec.base.j_over_g, 0.1);
        assert_eq!(spec.axis.kind, AxisKind::Delta);
        assert_eq!(*spec.axis.values.last().unwrap(), 1.0);
        assert_eq!(spec.observables, vec![Observable::Eigenvalues, Observable::PN, Observable::PP]);
    }

    #[test]
    fn fig7_pins_disorder_to_three_emitters() {
        let spec = figure_preset("fig7").unwrap().into_sweep().unwrap();
        let s = &spec.series_or_default()[0];
        let at3 = spec.point_params(s, 3.0).unwrap();
        let at9 = spec.point_params(s, 9.0).unwrap();
        assert_eq!(at3.delta, at9.delta);
        assert!((at3.delta - at3.g * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(at9.emitters_per_cavity, 9);
    }

    #[test]
    fn unknown_name_lists_valid_ones() {
        let err = figure_preset("fig2").unwrap_err();
        let msg = err.to_string();
        for name in PRESET_NAMES {
            assert!(msg.contains(name), "{msg}");
        }
    }
}
