//! Closed-form bands of the resonant, lossless array.
//!
//! A chain of cavities with hopping `−J` has photon modes `ω_c − 2J cos k`.
//! Each mode couples only to the bright emitter combination of its node
//! profile, with strength `g√M`, giving two polariton branches
//!
//! ```text
//! E±(k) = ω₀ − J cos k ± √(J² cos² k + M g²)
//! ```
//!
//! and `M − 1` flat emitter bands at `ω₀`. Open chains have
//! `k_p = πp/(N+1)`, periodic rings `k_p = 2πp/N`, for `p = 1..N`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Boundary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub k: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    /// `(photon, emitter)` weight of the lower branch.
    pub weights_minus: (f64, f64),
    /// `(photon, emitter)` weight of the upper branch.
    pub weights_plus: (f64, f64),
}

pub fn open_momenta(n: usize) -> Vec<f64> {
    (1..=n).map(|p| PI * p as f64 / (n as f64 + 1.0)).collect()
}

pub fn periodic_momenta(n: usize) -> Vec<f64> {
    (1..=n).map(|p| 2.0 * PI * p as f64 / n as f64).collect()
}

pub fn momenta(n: usize, boundary: Boundary) -> Vec<f64> {
    match boundary {
        Boundary::Open => open_momenta(n),
        Boundary::Periodic => periodic_momenta(n),
    }
}

/// Bare photon band `ω_c − 2J cos k`.
pub fn cca_band(k: f64, omega_c: f64, j: f64) -> f64 {
    omega_c - 2.0 * j * k.cos()
}

/// `(E−, E+)` at momentum `k`.
pub fn polariton_bands(k: f64, omega_0: f64, j: f64, g: f64, m: usize) -> (f64, f64) {
    let jc = j * k.cos();
    let root = (jc * jc + m as f64 * g * g).sqrt();
    (omega_0 - jc - root, omega_0 - jc + root)
}

/// `(photon, emitter)` weights of the `(lower, upper)` branch at `k`.
///
/// The unnormalized branch vectors are `(emitter, photon) = (g√M, J cos k ∓ R)`
/// with `R = √(J² cos² k + M g²)`.
pub fn polariton_eigenvector(k: f64, j: f64, g: f64, m: usize) -> Result<((f64, f64), (f64, f64))> {
    let coupling = g * (m as f64).sqrt();
    let jc = j * k.cos();
    let root = (jc * jc + coupling * coupling).sqrt();
    let branch = |photon_amp: f64| -> Result<(f64, f64)> {
        let total = coupling * coupling + photon_amp * photon_amp;
        if total == 0.0 {
            return Err(Error::invalid("g", "polariton eigenvector vanishes (g = 0 and J cos k = 0)"));
        }
        Ok((photon_amp * photon_amp / total, coupling * coupling / total))
    };
    // Lower branch: E − ω₀ = −(J cos k + R), photon amplitude J cos k + R.
    Ok((branch(jc + root)?, branch(jc - root)?))
}

/// Band points over the discrete momenta of an `n`-cavity chain. With `m = 0`
/// both branches report the bare photon band.
pub fn band_points(n: usize, m: usize, boundary: Boundary, omega_0: f64, j: f64, g: f64) -> Result<Vec<BandPoint>> {
    momenta(n, boundary)
        .into_iter()
        .map(|k| {
            if m == 0 {
                let e = cca_band(k, omega_0, j);
                return Ok(BandPoint {
                    k,
                    e_minus: e,
                    e_plus: e,
                    weights_minus: (1.0, 0.0),
                    weights_plus: (1.0, 0.0),
                });
            }
            let (e_minus, e_plus) = polariton_bands(k, omega_0, j, g, m);
            let (weights_minus, weights_plus) = polariton_eigenvector(k, j, g, m)?;
            Ok(BandPoint {
                k,
                e_minus,
                e_plus,
                weights_minus,
                weights_plus,
            })
        })
        .collect()
}
