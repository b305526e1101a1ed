//! The pumped, lossy master equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σₙ (κ/2) D[aₙ]ρ + Σₙₘ (γ/2) D[σ⁻ₙₘ]ρ + P D[a†ₚ]ρ
//! D[c]ρ = 2cρc† − c†cρ − ρc†c
//! ```
//!
//! Every term conserves the difference of excitation numbers between the
//! ket and bra sides of `ρ`, so the superoperator splits into blocks
//! ("charge sectors") labelled by `q = n(i) − n(j)` for the entry `ρ_ij`.
//! Steady states live in `q = 0`; `A ρ` for a lowering operator `A` lives in
//! `q = −1`. Only the sectors that are needed are ever assembled.

use faer::{c64, Mat};

use super::sparse::CsrMatrix;
use super::space::{build_operators, hamiltonian, Operators, TruncatedSpace};
use crate::error::{Error, Result};
use crate::model::Realization;

const I: c64 = c64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: TruncatedSpace,
    realization: Realization,
    pump_cavity: usize,
    pump_rate: f64,
    operators: Operators,
    hamiltonian: CsrMatrix,
    /// `(r, c)` for each dissipator `r·D[c]`.
    dissipators: Vec<(f64, CsrMatrix)>,
    /// `K = −iH − Σ r c†c`.
    drift: CsrMatrix,
    charge: Vec<usize>,
    /// Basis states grouped by excitation number.
    by_charge: Vec<Vec<usize>>,
    /// Position of each basis state inside its group.
    position: Vec<usize>,
}

pub fn build_liouvillian(
    realization: &Realization,
    space: TruncatedSpace,
    pump_cavity: usize,
    pump_rate: f64,
) -> Result<Liouvillian> {
    let p = &realization.params;
    if pump_cavity >= p.n_cavities {
        return Err(Error::invalid(
            "pump_cavity",
            format!("{pump_cavity} is not below N = {}", p.n_cavities),
        ));
    }
    if !(pump_rate >= 0.0 && pump_rate.is_finite()) {
        return Err(Error::invalid("pump_rate", format!("must be finite and non-negative, got {pump_rate}")));
    }
    let operators = build_operators(&space);
    let h = hamiltonian(&space, &operators, realization)?;

    let mut dissipators = Vec::new();
    for a in &operators.a {
        dissipators.push((p.kappa / 2.0, a.clone()));
    }
    for s in &operators.sigma {
        dissipators.push((p.gamma / 2.0, s.clone()));
    }
    if pump_rate > 0.0 {
        dissipators.push((pump_rate, operators.a[pump_cavity].adjoint()));
    }
    dissipators.retain(|(r, _)| *r != 0.0);

    let mut drift = h.scale(-I);
    for (r, c) in &dissipators {
        drift = drift.add(&c.adjoint().matmul(c).scale(c64::new(-r, 0.0)));
    }

    let d = space.dimension();
    let charge: Vec<usize> = (0..d).map(|i| space.excitation_number(i)).collect();
    let max_charge = charge.iter().copied().max().unwrap_or(0);
    let mut by_charge = vec![Vec::new(); max_charge + 1];
    let mut position = vec![0; d];
    for (i, &q) in charge.iter().enumerate() {
        position[i] = by_charge[q].len();
        by_charge[q].push(i);
    }

    let l = Liouvillian {
        space,
        realization: realization.clone(),
        pump_cavity,
        pump_rate,
        operators,
        hamiltonian: h,
        dissipators,
        drift,
        charge,
        by_charge,
        position,
    };
    l.check_conservation()?;
    Ok(l)
}

/// One block of the superoperator: all `ρ_ij` with `n(i) − n(j) = q`,
/// ordered by `i`, then `j`.
#[derive(Debug, Clone)]
pub struct Sector {
    pub q: i64,
    offsets: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    pub matrix: CsrMatrix,
}

impl Sector {
    pub fn dimension(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

impl Liouvillian {
    pub fn space(&self) -> &TruncatedSpace {
        &self.space
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn pump_cavity(&self) -> usize {
        self.pump_cavity
    }

    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    pub fn operators(&self) -> &Operators {
        &self.operators
    }

    pub fn hamiltonian(&self) -> &CsrMatrix {
        &self.hamiltonian
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn charge(&self, i: usize) -> usize {
        self.charge[i]
    }

    fn check_conservation(&self) -> Result<()> {
        let shifts = |m: &CsrMatrix| -> Option<i64> {
            let mut shift = None;
            for (r, c, _) in m.triplets() {
                let s = self.charge[r] as i64 - self.charge[c] as i64;
                match shift {
                    None => shift = Some(s),
                    Some(t) if t != s => return None,
                    _ => {}
                }
            }
            Some(shift.unwrap_or(0))
        };
        let ok = shifts(&self.drift) == Some(0) && self.dissipators.iter().all(|(_, c)| shifts(c).is_some());
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("hamiltonian", "excitation number is not conserved"))
        }
    }

    /// `L(ρ)` evaluated term by term on a dense matrix.
    pub fn apply(&self, rho: &Mat<c64>) -> Mat<c64> {
        let h = &self.hamiltonian;
        let mut out = (h.mul_dense(rho) - h.dense_mul(rho)) * faer::Scale(-I);
        for (r, c) in &self.dissipators {
            let cd = c.adjoint();
            let cdc = cd.matmul(c);
            let jump = cd.dense_mul(&c.mul_dense(rho));
            let anti = cdc.mul_dense(rho) + cdc.dense_mul(rho);
            out += (jump * faer::Scale(c64::new(2.0, 0.0)) - anti) * faer::Scale(c64::new(*r, 0.0));
        }
        out
    }

    /// Sector labels present in `rho` (entries above `tol`).
    pub fn sectors_of(&self, rho: &Mat<c64>, tol: f64) -> Vec<i64> {
        let mut qs = Vec::new();
        for i in 0..rho.nrows() {
            for j in 0..rho.ncols() {
                if rho[(i, j)].norm() > tol {
                    let q = self.charge[i] as i64 - self.charge[j] as i64;
                    if !qs.contains(&q) {
                        qs.push(q);
                    }
                }
            }
        }
        qs.sort_unstable();
        qs
    }

    fn partner_group(&self, i: usize, q: i64) -> Option<&[usize]> {
        let target = self.charge[i] as i64 - q;
        if target < 0 {
            return None;
        }
        self.by_charge.get(target as usize).map(Vec::as_slice)
    }

    /// Assembles the superoperator block for `q`.
    pub fn sector(&self, q: i64) -> Sector {
        let d = self.dimension();
        let mut offsets = vec![0; d + 1];
        let mut pairs = Vec::new();
        for i in 0..d {
            let group = self.partner_group(i, q).unwrap_or(&[]);
            offsets[i + 1] = offsets[i] + group.len();
            pairs.extend(group.iter().map(|&j| (i, j)));
        }
        let index = |i: usize, j: usize| -> usize {
            debug_assert_eq!(self.charge[i] as i64 - self.charge[j] as i64, q);
            offsets[i] + self.position[j]
        };

        let mut indptr = Vec::with_capacity(pairs.len() + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut row: Vec<(usize, c64)> = Vec::new();
        for &(i, j) in &pairs {
            row.clear();
            for (k, v) in self.drift.row(i) {
                row.push((index(k, j), v));
            }
            for (l, v) in self.drift.row(j) {
                row.push((index(i, l), v.conj()));
            }
            for (r, c) in &self.dissipators {
                for (k, a) in c.row(i) {
                    for (l, b) in c.row(j) {
                        row.push((index(k, l), a * b.conj() * (2.0 * r)));
                    }
                }
            }
            row.sort_unstable_by_key(|&(col, _)| col);
            let mut last = usize::MAX;
            for &(col, v) in &row {
                if col == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(col);
                    values.push(v);
                    last = col;
                }
            }
            indptr.push(indices.len());
        }
        let n = pairs.len();
        Sector {
            q,
            offsets,
            pairs,
            matrix: CsrMatrix::from_sorted_rows(n, n, indptr, indices, values),
        }
    }

    /// Flattens the `q` block of `rho` in sector order.
    pub fn pack(&self, sector: &Sector, rho: &Mat<c64>) -> Vec<c64> {
        sector.pairs.iter().map(|&(i, j)| rho[(i, j)]).collect()
    }

    /// Scatters a sector vector into a dense matrix (other entries zero).
    pub fn unpack(&self, sector: &Sector, v: &[c64]) -> Mat<c64> {
        let d = self.dimension();
        let mut rho = Mat::<c64>::zeros(d, d);
        self.unpack_add(sector, v, &mut rho);
        rho
    }

    pub fn unpack_add(&self, sector: &Sector, v: &[c64], rho: &mut Mat<c64>) {
        for (&(i, j), &x) in sector.pairs.iter().zip(v) {
            rho[(i, j)] += x;
        }
    }

    pub(crate) fn sector_index(&self, sector: &Sector, i: usize, j: usize) -> Option<usize> {
        (self.charge[i] as i64 - self.charge[j] as i64 == sector.q).then(|| sector.offsets[i] + self.position[j])
    }

    /// Basis states with a given excitation number.
    pub fn states_with_charge(&self, q: usize) -> &[usize] {
        self.by_charge.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn max_charge(&self) -> usize {
        self.by_charge.len() - 1
    }
}
