//! Two-time correlations and emission spectra.
//!
//! `g(τ) = Tr[A† e^{Lτ}(A ρ_ss)]` and
//! `S(ω) = ∫ g(τ) e^{−iωτ} dτ = 2 Re ∫₀^∞ g(τ) e^{−iωτ} dτ`
//! using `g(−τ) = g(τ)*`.

use std::f64::consts::PI;

use faer::{c64, Mat};
use rustfft::FftPlanner;
use serde::Serialize;

use super::liouvillian::{Liouvillian, Sector};
use super::propagate::{Integrator, Propagator};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::model::{Element, Realization};

/// Spectral width estimate `max(2g√M + 2J + κ, Δ, 2 max|ω_e − ω_c|)`.
pub fn spectral_span(realization: &Realization) -> f64 {
    let p = &realization.params;
    let detuning = realization
        .emitter_frequencies()
        .iter()
        .map(|w| (w - p.omega_c).abs())
        .fold(0.0, f64::max);
    (2.0 * p.collective_coupling() + 2.0 * p.j_hop.abs() + p.kappa)
        .max(p.delta)
        .max(2.0 * detuning)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationOptions {
    pub integrator: Integrator,
    /// Sample spacing; `None` uses `π / Ω_span`.
    pub dt: Option<f64>,
    /// Longest delay; `None` uses `20/γ` (or `20/κ` without emitter decay).
    pub tau_max: Option<f64>,
    /// Stop early once `‖A‖_F ‖B(τ)‖_F` falls below this fraction of `|g(0)|`.
    pub decay_threshold: f64,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            integrator: Integrator::default(),
            dt: None,
            tau_max: None,
            decay_threshold: 1e-4,
        }
    }
}

impl CorrelationOptions {
    pub fn resolve_dt(&self, realization: &Realization) -> f64 {
        self.dt.unwrap_or_else(|| PI / spectral_span(realization))
    }

    pub fn resolve_tau_max(&self, realization: &Realization) -> f64 {
        if let Some(t) = self.tau_max {
            return t;
        }
        let p = &realization.params;
        let mut rates = vec![p.kappa];
        if p.n_emitters() > 0 {
            rates.push(p.gamma);
        }
        let slowest = rates.into_iter().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
        if slowest.is_finite() {
            20.0 / slowest
        } else {
            2000.0 * self.resolve_dt(realization)
        }
    }
}

/// `g(τ_j)` at `τ_j = j·dt`.
#[derive(Debug, Clone)]
pub struct Correlation {
    pub dt: f64,
    pub values: Vec<c64>,
    /// `|g(τ_max)| / |g(0)|`.
    pub truncation_residual: f64,
}

impl Correlation {
    pub fn tau(&self) -> Vec<f64> {
        (0..self.values.len()).map(|j| j as f64 * self.dt).collect()
    }
}

/// Correlation of `probe` in the stationary state, building whatever sectors
/// `A ρ_ss` occupies.
pub fn correlation(l: &Liouvillian, rho_ss: &Mat<c64>, probe: &CsrMatrix, opts: &CorrelationOptions) -> Result<Correlation> {
    let b0 = probe.mul_dense(rho_ss);
    let sectors: Vec<Sector> = l.sectors_of(&b0, 0.0).into_iter().map(|q| l.sector(q)).collect();
    correlation_in_sectors(l, rho_ss, probe, &sectors, opts)
}

/// As [`correlation`], with the sectors already assembled. Entries of
/// `A ρ_ss` outside `sectors` are an error.
pub fn correlation_in_sectors(
    l: &Liouvillian,
    rho_ss: &Mat<c64>,
    probe: &CsrMatrix,
    sectors: &[Sector],
    opts: &CorrelationOptions,
) -> Result<Correlation> {
    let real = l.realization();
    let dt = opts.resolve_dt(real);
    let tau_max = opts.resolve_tau_max(real);
    if !(dt > 0.0 && tau_max >= 0.0) {
        return Err(Error::invalid("dt", "sample spacing must be positive"));
    }
    let n_max = (tau_max / dt).round() as usize + 1;

    let b0 = probe.mul_dense(rho_ss);
    let covered = l.sectors_of(&b0, 0.0);
    if covered.iter().any(|q| !sectors.iter().any(|s| s.q == *q)) {
        return Err(Error::invalid("probe", "A ρ_ss has entries outside the supplied sectors"));
    }

    // Tr[A† B] = Σ conj(A_rc) B_rc over the nonzeros of A.
    struct Probe {
        sector: usize,
        index: usize,
        weight: c64,
    }
    let mut taps = Vec::new();
    for (r, c, a) in probe.triplets() {
        for (s, sector) in sectors.iter().enumerate() {
            if let Some(index) = l.sector_index(sector, r, c) {
                taps.push(Probe {
                    sector: s,
                    index,
                    weight: a.conj(),
                });
            }
        }
    }
    let mut states: Vec<Vec<c64>> = sectors.iter().map(|s| l.pack(s, &b0)).collect();
    let evaluate = |states: &[Vec<c64>]| -> c64 { taps.iter().map(|t| t.weight * states[t.sector][t.index]).sum() };
    let norm_b = |states: &[Vec<c64>]| -> f64 {
        states
            .iter()
            .flat_map(|v| v.iter())
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let probe_norm = probe.frobenius_norm();

    let rk4_dt = dt / 20.0;
    let mut propagators: Vec<Propagator> = sectors
        .iter()
        .map(|s| Propagator::new(&s.matrix, opts.integrator, rk4_dt))
        .collect();

    let g0 = evaluate(&states);
    let mut values = vec![g0];
    let threshold = opts.decay_threshold * g0.norm();
    for _ in 1..n_max {
        for (p, v) in propagators.iter_mut().zip(states.iter_mut()) {
            p.advance(v, dt)?;
        }
        values.push(evaluate(&states));
        if threshold > 0.0 && probe_norm * norm_b(&states) <= threshold {
            break;
        }
    }
    let truncation_residual = if g0.norm() > 0.0 {
        values.last().unwrap().norm() / g0.norm()
    } else {
        0.0
    };
    Ok(Correlation {
        dt,
        values,
        truncation_residual,
    })
}

/// Sampled spectrum on a uniform ω grid.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub intensity: Vec<f64>,
    pub truncation_residual: f64,
}

/// A fitted spectral line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub omega: f64,
    pub height: f64,
    pub fwhm: f64,
}

impl Spectrum {
    pub fn grid_step(&self) -> f64 {
        if self.omega.len() > 1 {
            self.omega[1] - self.omega[0]
        } else {
            0.0
        }
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensity.iter().copied().fold(0.0, f64::max)
    }

    /// A warning when `g` had not decayed by the end of the delay grid.
    pub fn warning(&self) -> Option<String> {
        (self.truncation_residual > 1e-4).then(|| {
            format!(
                "correlation truncated early: |g(τ_max)|/|g(0)| = {:.3e}; increase tau_max",
                self.truncation_residual
            )
        })
    }

    /// Linear interpolation at `w` (zero outside the grid).
    pub fn at(&self, w: f64) -> f64 {
        let step = self.grid_step();
        if self.omega.is_empty() || step <= 0.0 {
            return 0.0;
        }
        let x = (w - self.omega[0]) / step;
        if x < 0.0 || x > (self.omega.len() - 1) as f64 {
            return 0.0;
        }
        let i = (x.floor() as usize).min(self.omega.len() - 2);
        let t = x - i as f64;
        self.intensity[i] * (1.0 - t) + self.intensity[i + 1] * t
    }

    /// Resolvable lines: local maxima whose prominence is at least
    /// `min_relative · max` and a tenth of their own height, each refined by
    /// a Lorentzian through the three samples around it.
    pub fn peaks(&self, min_relative: f64) -> Vec<Peak> {
        let floor = min_relative * self.max_intensity();
        let y = &self.intensity;
        let mut out = Vec::new();
        for k in 1..y.len().saturating_sub(1) {
            if !(y[k] > y[k - 1] && y[k] >= y[k + 1] && y[k] > floor) {
                continue;
            }
            let prominence = y[k] - self.saddle(k, -1).max(self.saddle(k, 1));
            if prominence >= floor && prominence >= 0.1 * y[k] {
                out.push(self.fit_lorentzian(k));
            }
        }
        out
    }

    /// Lowest intensity between `k` and the next higher sample in direction
    /// `dir` (or the grid edge).
    fn saddle(&self, k: usize, dir: isize) -> f64 {
        let y = &self.intensity;
        let mut low = y[k];
        let mut i = k as isize + dir;
        while i >= 0 && (i as usize) < y.len() {
            let v = y[i as usize];
            if v > y[k] {
                break;
            }
            low = low.min(v);
            i += dir;
        }
        low
    }

    /// Fits `1/S = a(ω − ω₀)² + c` through samples `k−1, k, k+1`.
    fn fit_lorentzian(&self, k: usize) -> Peak {
        let h = self.grid_step();
        let (y0, y1, y2) = (1.0 / self.intensity[k - 1], 1.0 / self.intensity[k], 1.0 / self.intensity[k + 1]);
        let a = (y0 - 2.0 * y1 + y2) / (2.0 * h * h);
        let b = (y2 - y0) / (2.0 * h);
        let fallback = Peak {
            omega: self.omega[k],
            height: self.intensity[k],
            fwhm: h,
        };
        if !(a > 0.0) || !(y1 > 0.0) {
            return fallback;
        }
        let shift = (-b / (2.0 * a)).clamp(-h, h);
        let c = y1 + b * shift + a * shift * shift;
        if !(c > 0.0) {
            return fallback;
        }
        Peak {
            omega: self.omega[k] + shift,
            height: 1.0 / c,
            fwhm: 2.0 * (c / a).sqrt(),
        }
    }

    /// Elementwise sum of spectra on the same grid.
    pub fn sum<'a>(spectra: impl IntoIterator<Item = &'a Spectrum>) -> Result<Spectrum> {
        let mut iter = spectra.into_iter();
        let first = iter.next().ok_or_else(|| Error::invalid("spectra", "nothing to sum"))?;
        let mut out = first.clone();
        for s in iter {
            if s.omega.len() != out.omega.len()
                || s.omega.first() != out.omega.first()
                || s.grid_step() != out.grid_step()
            {
                return Err(Error::invalid("spectra", "spectra are on different ω grids"));
            }
            for (a, b) in out.intensity.iter_mut().zip(&s.intensity) {
                *a += b;
            }
            out.truncation_residual = out.truncation_residual.max(s.truncation_residual);
        }
        Ok(out)
    }
}

/// `S(ω)` by FFT on the reciprocal grid `ω_k = 2πk / (n_fft dt)`, ascending
/// from `−π/dt`. `n_fft` defaults to the next power of two ≥ `4·len(g)`.
pub fn spectrum(corr: &Correlation, n_fft: Option<usize>) -> Spectrum {
    let n = corr.values.len();
    let n_fft = n_fft.unwrap_or((4 * n).next_power_of_two()).max(n).max(2);
    let mut buf = vec![c64::new(0.0, 0.0); n_fft];
    buf[..n].copy_from_slice(&corr.values);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);
    fft.process(&mut buf);
    let dt = corr.dt;
    let g0 = corr.values.first().copied().unwrap_or_default();
    let step = 2.0 * PI / (n_fft as f64 * dt);
    let half = n_fft / 2;
    let mut omega = Vec::with_capacity(n_fft);
    let mut intensity = Vec::with_capacity(n_fft);
    for k in (half..n_fft).chain(0..half) {
        let signed = if k >= half { k as f64 - n_fft as f64 } else { k as f64 };
        omega.push(signed * step);
        intensity.push(2.0 * (dt * (buf[k] - g0 * 0.5)).re);
    }
    Spectrum {
        omega,
        intensity,
        truncation_residual: corr.truncation_residual,
    }
}

/// `S(ω)` by direct summation at arbitrary frequencies.
pub fn spectrum_at(corr: &Correlation, omegas: &[f64]) -> Vec<f64> {
    let dt = corr.dt;
    let g0 = corr.values.first().copied().unwrap_or_default();
    omegas
        .iter()
        .map(|&w| {
            let rot = c64::new(0.0, -w * dt).exp();
            let mut phase = c64::new(1.0, 0.0);
            let mut acc = c64::new(0.0, 0.0);
            for g in &corr.values {
                acc += g * phase;
                phase *= rot;
            }
            2.0 * (dt * (acc - g0 * 0.5)).re
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pump {
    Cavity { cavity: usize, rate: f64 },
    /// Sum of the spectra obtained pumping each cavity in turn.
    Summed { rate: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTrace {
    pub probe: Element,
    pub pump: Pump,
    pub spectrum: Spectrum,
}
