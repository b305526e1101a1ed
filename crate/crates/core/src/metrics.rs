//! Nodal and polaritonic participation ratios, band labels and the most
//! polaritonic state of a band.
//!
//! For node weights `w_n = ⟨N_ph,n⟩ + ⟨N_e,n⟩`:
//!
//! ```text
//! P_N = 1 / Σ_n w_n²                         ∈ [1, N]
//! P_P = 1 / ((Σ_n ⟨N_ph,n⟩)² + (Σ_n ⟨N_e,n⟩)²)  ∈ [1, 2]
//! ```
//!
//! Both are mapped affinely onto `[0, 1]`: `(P_N − 1)/(N − 1)` (zero for a
//! single node) and `P_P − 1`.

use serde::Serialize;

use crate::effective::{EigenState, NodeOccupancy};
use crate::error::{Error, Result};
use crate::model::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Lower,
    Subradiant,
    Upper,
}

impl Band {
    pub fn as_str(&self) -> &'static str {
        match self {
            Band::Lower => "lower",
            Band::Subradiant => "subradiant",
            Band::Upper => "upper",
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticipationReport {
    pub p_n_raw: f64,
    pub p_n_norm: f64,
    pub p_p_raw: f64,
    pub p_p_norm: f64,
    pub band: Band,
}

/// `(raw, normalized)` nodal participation of an occupancy table.
pub fn nodal_participation_of(occ: &NodeOccupancy) -> (f64, f64) {
    let raw = 1.0 / occ.node_weights().map(|w| w * w).sum::<f64>();
    let n = occ.n_nodes();
    let norm = if n > 1 {
        (raw - 1.0) / (n as f64 - 1.0)
    } else {
        0.0
    };
    (raw, norm)
}

/// `(raw, normalized)` polaritonicity of an occupancy table.
pub fn polaritonic_participation_of(occ: &NodeOccupancy) -> (f64, f64) {
    let ph = occ.total_photon();
    let em = occ.total_emitter();
    let raw = 1.0 / (ph * ph + em * em);
    (raw, raw - 1.0)
}

pub fn nodal_participation(state: &EigenState) -> (f64, f64) {
    nodal_participation_of(&state.occupancies)
}

pub fn polaritonic_participation(state: &EigenState) -> (f64, f64) {
    polaritonic_participation_of(&state.occupancies)
}

/// Labels states sorted by `Re E`: the first `N` are the lower band, the last
/// `N` the upper band and the `N(M−1)` in between are subradiant. Without
/// emitters the whole spectrum is one photonic band, labelled lower.
pub fn classify_bands(states: &[EigenState], params: &SystemParams) -> Result<Vec<Band>> {
    let n = params.n_cavities;
    let m = params.emitters_per_cavity;
    let expected = n * (m + 1);
    if states.len() != expected {
        return Err(Error::StateCount {
            expected,
            actual: states.len(),
        });
    }
    if m == 0 {
        return Ok(vec![Band::Lower; n]);
    }
    Ok((0..expected)
        .map(|i| {
            if i < n {
                Band::Lower
            } else if i >= expected - n {
                Band::Upper
            } else {
                Band::Subradiant
            }
        })
        .collect())
}

/// Relative tolerance under which two polaritonicities count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Index of the band member with the largest raw `P_P`. Ties go to the state
/// closest to the band's median energy, then to the lowest index.
pub fn most_polaritonic_state(states: &[EigenState], labels: &[Band], band: Band) -> Result<usize> {
    let members: Vec<usize> = (0..states.len()).filter(|&i| labels[i] == band).collect();
    if members.is_empty() {
        return Err(Error::EmptyBand(band.as_str()));
    }
    let mut energies: Vec<f64> = members.iter().map(|&i| states[i].energy.re).collect();
    energies.sort_by(f64::total_cmp);
    let k = energies.len();
    let median = if k % 2 == 1 {
        energies[k / 2]
    } else {
        0.5 * (energies[k / 2 - 1] + energies[k / 2])
    };

    let mut best = members[0];
    let mut best_pp = polaritonic_participation(&states[best]).0;
    for &i in &members[1..] {
        let pp = polaritonic_participation(&states[i]).0;
        let tied = (pp - best_pp).abs() <= TIE_TOLERANCE * best_pp.abs().max(pp.abs());
        let better = if tied {
            (states[i].energy.re - median).abs() < (states[best].energy.re - median).abs()
        } else {
            pp > best_pp
        };
        if better {
            best = i;
            best_pp = pp;
        }
    }
    Ok(best)
}

/// Participation report for every state, in the order given.
pub fn participation_reports(states: &[EigenState], params: &SystemParams) -> Result<Vec<ParticipationReport>> {
    let labels = classify_bands(states, params)?;
    Ok(states
        .iter()
        .zip(labels)
        .map(|(s, band)| {
            let (p_n_raw, p_n_norm) = nodal_participation(s);
            let (p_p_raw, p_p_norm) = polaritonic_participation(s);
            ParticipationReport {
                p_n_raw,
                p_n_norm,
                p_p_raw,
                p_p_norm,
                band,
            }
        })
        .collect())
}
