//! Emission spectra of every element under incoherent pumping.

use rayon::prelude::*;

use super::liouvillian::build_liouvillian;
use super::space::{TruncatedSpace, DEFAULT_FOCK_CUTOFF};
use super::spectrum::{correlation_in_sectors, spectrum, CorrelationOptions, Pump, Spectrum, SpectrumTrace};
use super::steady::steady_state;
use crate::error::{Error, Result};
use crate::model::{ghz_to_angular, Element, Realization};

/// Default pump, `P/2π = 0.01 GHz`.
pub const DEFAULT_PUMP_GHZ: f64 = 0.01;
pub const DEFAULT_MAX_DIMENSION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionOptions {
    /// Pump rate, rad/ns.
    pub pump_rate: f64,
    pub fock_cutoff: usize,
    /// Refuse truncated spaces larger than this.
    pub max_dimension: usize,
    pub correlation: CorrelationOptions,
}

impl Default for EmissionOptions {
    fn default() -> Self {
        EmissionOptions {
            pump_rate: ghz_to_angular(DEFAULT_PUMP_GHZ),
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
            max_dimension: DEFAULT_MAX_DIMENSION,
            correlation: CorrelationOptions::default(),
        }
    }
}

/// Every cavity and emitter of the array.
pub fn all_elements(realization: &Realization) -> Vec<Element> {
    let p = &realization.params;
    let mut out: Vec<Element> = (0..p.n_cavities).map(Element::Cavity).collect();
    for n in 0..p.n_cavities {
        for m in 0..p.emitters_per_cavity {
            out.push(Element::Emitter(n, m));
        }
    }
    out
}

fn space_for(realization: &Realization, opts: &EmissionOptions) -> Result<TruncatedSpace> {
    let p = &realization.params;
    let space = TruncatedSpace::new(p.n_cavities, p.emitters_per_cavity, opts.fock_cutoff)?;
    let dimension = space.dimension();
    if dimension > opts.max_dimension {
        return Err(Error::SpaceTooLarge {
            dimension,
            limit: opts.max_dimension,
        });
    }
    Ok(space)
}

/// FFT length shared by all traces of one realization, so that spectra for
/// different pumps and probes land on the same ω grid.
fn common_fft_len(realization: &Realization, opts: &CorrelationOptions) -> usize {
    let dt = opts.resolve_dt(realization);
    let n = (opts.resolve_tau_max(realization) / dt).round() as usize + 1;
    (4 * n).next_power_of_two()
}

/// Spectra of `probes` with the pump on `pump_cavity`.
pub fn emission_spectra(
    realization: &Realization,
    pump_cavity: usize,
    probes: &[Element],
    opts: &EmissionOptions,
) -> Result<Vec<SpectrumTrace>> {
    let space = space_for(realization, opts)?;
    let l = build_liouvillian(realization, space, pump_cavity, opts.pump_rate)?;
    let ss = steady_state(&l)?;
    // Lowering operators all map ρ_ss into the q = −1 sector.
    let sectors = [l.sector(-1)];
    let n_fft = common_fft_len(realization, &opts.correlation);
    let pump = Pump::Cavity {
        cavity: pump_cavity,
        rate: opts.pump_rate,
    };
    probes
        .par_iter()
        .map(|&probe| {
            let op = space.lowering(probe);
            let corr = correlation_in_sectors(&l, &ss.rho, &op, &sectors, &opts.correlation)?;
            Ok(SpectrumTrace {
                probe,
                pump,
                spectrum: spectrum(&corr, Some(n_fft)),
            })
        })
        .collect()
}

/// Spectra summed over pumping each cavity in turn.
pub fn pump_summed_spectra(realization: &Realization, probes: &[Element], opts: &EmissionOptions) -> Result<Vec<SpectrumTrace>> {
    let per_pump = (0..realization.params.n_cavities)
        .map(|c| emission_spectra(realization, c, probes, opts))
        .collect::<Result<Vec<_>>>()?;
    probes
        .iter()
        .enumerate()
        .map(|(k, &probe)| {
            let spectrum = Spectrum::sum(per_pump.iter().map(|traces| &traces[k].spectrum))?;
            Ok(SpectrumTrace {
                probe,
                pump: Pump::Summed { rate: opts.pump_rate },
                spectrum,
            })
        })
        .collect()
}
