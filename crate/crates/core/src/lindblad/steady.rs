//! Stationary state of the master equation.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use super::liouvillian::{Liouvillian, Sector};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: Mat<c64>,
    /// `‖L(ρ)‖₂` over the sector.
    pub residual: f64,
    pub min_eigenvalue: f64,
}

impl SteadyState {
    /// `Tr[O ρ]` for a sparse observable.
    pub fn expectation(&self, op: &super::CsrMatrix) -> c64 {
        op.triplets().map(|(r, c, v)| v * self.rho[(c, r)]).sum()
    }
}

/// Solves `L ρ = 0` with `Tr ρ = 1` on the `q = 0` sector, replacing the
/// equation of `replaced` by the trace condition.
fn solve_with_trace_row(l: &Liouvillian, sector: &Sector, replaced: usize) -> Result<Vec<c64>> {
    let n = sector.dimension();
    let mut triplets = Vec::with_capacity(sector.matrix.nnz() + l.dimension());
    for (r, c, v) in sector.matrix.triplets() {
        if r != replaced {
            triplets.push(Triplet::new(r, c, v));
        }
    }
    for i in 0..l.dimension() {
        let col = l.sector_index(sector, i, i).expect("diagonal lies in sector 0");
        triplets.push(Triplet::new(replaced, col, c64::new(1.0, 0.0)));
    }
    let a = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::SteadyState(format!("assembling the linear system: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::SteadyState(format!("sparse LU failed: {e:?}")))?;
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(replaced, 0)] = c64::new(1.0, 0.0);
    lu.solve_in_place(rhs.as_mut());
    let x: Vec<c64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SteadyState("singular system: the null space is not one-dimensional".into()));
    }
    Ok(x)
}

pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let sector = l.sector(0);
    let d = l.dimension();
    let first = l.sector_index(&sector, 0, 0).unwrap();
    let last = l.sector_index(&sector, d - 1, d - 1).unwrap();
    let x = solve_with_trace_row(l, &sector, first)?;

    if d > 1 {
        let y = solve_with_trace_row(l, &sector, last)?;
        let diff = x.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let size = x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if diff > 1e-8 * size.max(1.0) {
            return Err(Error::SteadyState(format!(
                "non-unique null space: two trace-normalized candidates differ by {diff:.3e}"
            )));
        }
    }

    let raw = l.unpack(&sector, &x);
    let rho = (&raw + raw.adjoint()) * Scale(c64::new(0.5, 0.0));
    let packed = l.pack(&sector, &rho);
    let residual = sector.matrix.matvec(&packed).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let trace: c64 = (0..d).map(|i| rho[(i, i)]).sum();
    if (trace - c64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::SteadyState(format!("trace {trace} differs from 1")));
    }
    if residual > 1e-8 {
        return Err(Error::SteadyState(format!("residual ‖L ρ‖ = {residual:.3e} exceeds 1e-8")));
    }

    // ρ is block diagonal in excitation number; diagonalize block by block.
    let mut min_eigenvalue = f64::INFINITY;
    for q in 0..=l.max_charge() {
        let states = l.states_with_charge(q);
        let block = Mat::<c64>::from_fn(states.len(), states.len(), |a, b| rho[(states[a], states[b])]);
        let eig = block
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::SteadyState(format!("eigenvalues of ρ: {e:?}")))?;
        let s = eig.S();
        for k in 0..states.len() {
            min_eigenvalue = min_eigenvalue.min(s[k].re);
        }
    }
    if min_eigenvalue < -1e-9 {
        return Err(Error::SteadyState(format!(
            "ρ is not positive: smallest eigenvalue {min_eigenvalue:.3e}"
        )));
    }
    Ok(SteadyState {
        rho,
        residual,
        min_eigenvalue,
    })
}

/// `ρ(t_k)` at `t_k = k·dt`, `k = 0..=steps`, evolving each charge sector of
/// `rho0` independently.
pub fn evolve(
    l: &Liouvillian,
    rho0: &Mat<c64>,
    dt: f64,
    steps: usize,
    integrator: super::Integrator,
) -> Result<Vec<Mat<c64>>> {
    let sectors: Vec<Sector> = l.sectors_of(rho0, 0.0).into_iter().map(|q| l.sector(q)).collect();
    let mut states: Vec<Vec<c64>> = sectors.iter().map(|s| l.pack(s, rho0)).collect();
    let mut props: Vec<super::Propagator> = sectors
        .iter()
        .map(|s| super::Propagator::new(&s.matrix, integrator, dt / 20.0))
        .collect();
    let assemble = |states: &[Vec<c64>]| {
        let d = l.dimension();
        let mut rho = Mat::<c64>::zeros(d, d);
        for (s, v) in sectors.iter().zip(states) {
            l.unpack_add(s, v, &mut rho);
        }
        rho
    };
    let mut out = vec![assemble(&states)];
    for _ in 0..steps {
        for (p, v) in props.iter_mut().zip(states.iter_mut()) {
            p.advance(v, dt)?;
        }
        out.push(assemble(&states));
    }
    Ok(out)
}
