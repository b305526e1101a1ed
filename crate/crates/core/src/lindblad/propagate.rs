//! Time stepping `dv/dt = A v` for one superoperator sector.
//!
//! Two integrators: an Arnoldi (Krylov) approximation of `exp(hA) v` with an
//! a-posteriori error estimate, and classic fixed-step RK4.

use faer::c64;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// Krylov exponential with local error below `tolerance · ‖v‖ · h` per step.
    Krylov { tolerance: f64, max_dim: usize },
    /// Fixed-step RK4; `dt = None` picks `1 / (20 Ω_span)`.
    Rk4 { dt: Option<f64> },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Krylov {
            tolerance: 1e-10,
            max_dim: 40,
        }
    }
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense `exp(A)` for a small square matrix (row-major), by scaling and
/// squaring a truncated Taylor series.
pub(crate) fn expm_small(a: &[c64], n: usize) -> Vec<c64> {
    let norm1 = (0..n)
        .map(|c| (0..n).map(|r| a[r * n + c].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let scaled: Vec<c64> = a.iter().map(|x| x * scale).collect();

    let matmul = |x: &[c64], y: &[c64]| -> Vec<c64> {
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = x[i * n + k];
                if xik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += xik * y[k * n + j];
                }
            }
        }
        out
    };

    let mut result = vec![ZERO; n * n];
    let mut term = vec![ZERO; n * n];
    for i in 0..n {
        result[i * n + i] = c64::new(1.0, 0.0);
        term[i * n + i] = c64::new(1.0, 0.0);
    }
    for k in 1..=30 {
        term = matmul(&term, &scaled);
        let inv = 1.0 / k as f64;
        let mut size = 0.0f64;
        for t in term.iter_mut() {
            *t *= inv;
            size = size.max(t.norm());
        }
        for (r, t) in result.iter_mut().zip(&term) {
            *r += t;
        }
        if size < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

enum KrylovOutcome {
    Done(Vec<c64>),
    NotConverged,
}

/// One Krylov step `v ← exp(hA) v`.
fn krylov_step(a: &CsrMatrix, v: &[c64], h: f64, tolerance: f64, max_dim: usize) -> KrylovOutcome {
    let beta = norm(v);
    if beta == 0.0 {
        return KrylovOutcome::Done(v.to_vec());
    }
    let n = v.len();
    let mut basis: Vec<Vec<c64>> = vec![v.iter().map(|x| x / beta).collect()];
    // Hessenberg stored column-major, (max_dim + 1) × max_dim.
    let mut hess = vec![ZERO; (max_dim + 1) * max_dim];
    let hidx = |r: usize, c: usize| c * (max_dim + 1) + r;
    let mut w = vec![ZERO; n];

    let small_exp = |m: usize, hess: &[c64]| -> Vec<c64> {
        let mut sm = vec![ZERO; m * m];
        for r in 0..m {
            for c in 0..m {
                sm[r * m + c] = hess[hidx(r, c)] * h;
            }
        }
        expm_small(&sm, m)
    };
    let combine = |m: usize, e: &[c64], basis: &[Vec<c64>]| -> Vec<c64> {
        let mut out = vec![ZERO; n];
        for (j, b) in basis.iter().take(m).enumerate() {
            let coef = e[j * m] * beta;
            for (o, x) in out.iter_mut().zip(b) {
                *o += coef * x;
            }
        }
        out
    };

    for j in 0..max_dim {
        a.matvec_into(&basis[j], &mut w);
        // modified Gram-Schmidt, twice for stability
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let c = dot(b, &w);
                hess[hidx(i, j)] += c;
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let h_next = norm(&w);
        let m = j + 1;
        let scale = hess[hidx(j, j)].norm().max(1e-300);
        if h_next <= 1e-13 * scale {
            let e = small_exp(m, &hess);
            return KrylovOutcome::Done(combine(m, &e, &basis));
        }
        hess[hidx(m, j)] = c64::new(h_next, 0.0);
        let check = m >= 6 && (m % 3 == 0 || m == max_dim);
        if check {
            let e = small_exp(m, &hess);
            // residual estimate  β · h_{m+1,m} · |e_mᵀ exp(hH) e₁| · h
            let err = beta * h_next * e[(m - 1) * m].norm() * h;
            if err <= tolerance * beta * h.max(1e-300) {
                return KrylovOutcome::Done(combine(m, &e, &basis));
            }
        }
        if m < max_dim {
            basis.push(w.iter().map(|x| x / h_next).collect());
        }
    }
    KrylovOutcome::NotConverged
}

fn rk4_step(a: &CsrMatrix, v: &mut [c64], dt: f64, scratch: &mut [Vec<c64>; 5]) {
    let n = v.len();
    let [k1, k2, k3, k4, tmp] = scratch;
    a.matvec_into(v, k1);
    for i in 0..n {
        tmp[i] = v[i] + k1[i] * (dt / 2.0);
    }
    a.matvec_into(tmp, k2);
    for i in 0..n {
        tmp[i] = v[i] + k2[i] * (dt / 2.0);
    }
    a.matvec_into(tmp, k3);
    for i in 0..n {
        tmp[i] = v[i] + k3[i] * dt;
    }
    a.matvec_into(tmp, k4);
    for i in 0..n {
        v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Propagates vectors of one sector operator over a uniform grid.
pub struct Propagator<'a> {
    op: &'a CsrMatrix,
    integrator: Integrator,
    /// RK4 step used when none is given.
    default_dt: f64,
    substeps: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(op: &'a CsrMatrix, integrator: Integrator, default_dt: f64) -> Self {
        Propagator {
            op,
            integrator,
            default_dt,
            substeps: 1,
        }
    }

    /// Advances `v` by `h`, in place.
    pub fn advance(&mut self, v: &mut Vec<c64>, h: f64) -> Result<()> {
        let start_norm = norm(v);
        match self.integrator {
            Integrator::Krylov { tolerance, max_dim } => loop {
                let sub = h / self.substeps as f64;
                let mut trial = v.clone();
                let mut ok = true;
                for _ in 0..self.substeps {
                    match krylov_step(self.op, &trial, sub, tolerance, max_dim) {
                        KrylovOutcome::Done(next) => trial = next,
                        KrylovOutcome::NotConverged => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    *v = trial;
                    break;
                }
                if self.substeps >= 1 << 16 {
                    return Err(Error::Integration(
                        "Krylov step failed to converge; use a smaller dt".to_string(),
                    ));
                }
                self.substeps *= 2;
            },
            Integrator::Rk4 { dt } => {
                let dt = dt.unwrap_or(self.default_dt);
                let steps = (h / dt).ceil().max(1.0) as usize;
                let step = h / steps as f64;
                let mut scratch: [Vec<c64>; 5] = std::array::from_fn(|_| vec![ZERO; v.len()]);
                for _ in 0..steps {
                    rk4_step(self.op, v, step, &mut scratch);
                }
            }
        }
        let end_norm = norm(v);
        if !end_norm.is_finite() || end_norm > 1e3 * start_norm.max(f64::MIN_POSITIVE) {
            return Err(Error::Integration(format!(
                "norm grew from {start_norm:.3e} to {end_norm:.3e} in one step; use a smaller dt"
            )));
        }
        Ok(())
    }
}
