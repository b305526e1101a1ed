//! Non-Hermitian effective Hamiltonian in the one-excitation sector.
//!
//! `H_eff = H − (i/2)·diag(loss)`, with `H` the Tavis-Cummings-Hubbard
//! Hamiltonian restricted to a single excitation and loss `κ` on cavity rows,
//! `γ` on emitter rows. Complex eigenvalues carry the resonance position in
//! the real part and minus the half linewidth in the imaginary part.

use faer::{c64, Mat, MatRef};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_basis, Realization, SingleExcitationBasis};

/// Dense `N(M+1)` square effective Hamiltonian and the draw it came from.
#[derive(Debug, Clone)]
pub struct EffectiveMatrix {
    matrix: Mat<c64>,
    basis: SingleExcitationBasis,
    realization: Realization,
}

impl EffectiveMatrix {
    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn entry(&self, row: usize, col: usize) -> c64 {
        self.matrix[(row, col)]
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> SingleExcitationBasis {
        self.basis
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }
}

/// Builds `H_eff` for one realization. Hopping enters as `−J`, coupling as `+g`.
pub fn build_h_eff(realization: &Realization) -> EffectiveMatrix {
    let p = &realization.params;
    let basis = build_basis(p);
    let dim = basis.dimension();
    let mut h = Mat::<c64>::zeros(dim, dim);
    let half_i = c64::new(0.0, -0.5);

    for n in 0..p.n_cavities {
        let c = basis.index_of_cavity(n);
        h[(c, c)] = c64::new(p.omega_c, 0.0) + half_i * p.kappa;
        for m in 0..p.emitters_per_cavity {
            let e = basis.index_of_emitter(n, m);
            h[(e, e)] = c64::new(realization.omega_e(n, m), 0.0) + half_i * p.gamma;
            h[(c, e)] = c64::new(p.g, 0.0);
            h[(e, c)] = c64::new(p.g, 0.0);
        }
    }
    for (a, b) in p.boundary.bonds(p.n_cavities) {
        let (a, b) = (basis.index_of_cavity(a), basis.index_of_cavity(b));
        // a self-bond (one-cavity ring) carries both hermitian halves
        h[(a, b)] -= c64::new(p.j_hop, 0.0);
        h[(b, a)] -= c64::new(p.j_hop, 0.0);
    }
    EffectiveMatrix {
        matrix: h,
        basis,
        realization: realization.clone(),
    }
}

/// Photon and emitter weight of each node for one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeOccupancy {
    /// `⟨N_ph,n⟩ = |ψ_cav(n)|²`.
    pub photon: Vec<f64>,
    /// `⟨N_e,n⟩ = Σ_m |ψ_em(n,m)|²`.
    pub emitter: Vec<f64>,
}

impl NodeOccupancy {
    pub fn n_nodes(&self) -> usize {
        self.photon.len()
    }

    pub fn node_weight(&self, n: usize) -> f64 {
        self.photon[n] + self.emitter[n]
    }

    pub fn node_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.photon.iter().zip(&self.emitter).map(|(p, e)| p + e)
    }

    pub fn total_photon(&self) -> f64 {
        self.photon.iter().sum()
    }

    pub fn total_emitter(&self) -> f64 {
        self.emitter.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.total_photon() + self.total_emitter()
    }
}

/// Node occupancies of a unit-normalized amplitude vector.
pub fn occupancies(amplitudes: &[c64], basis: SingleExcitationBasis) -> NodeOccupancy {
    assert_eq!(amplitudes.len(), basis.dimension(), "amplitude length");
    let n_nodes = basis.n_cavities();
    let photon = (0..n_nodes)
        .map(|n| amplitudes[basis.index_of_cavity(n)].norm_sqr())
        .collect();
    let emitter = (0..n_nodes)
        .map(|n| {
            (0..basis.emitters_per_cavity())
                .map(|m| amplitudes[basis.index_of_emitter(n, m)].norm_sqr())
                .sum()
        })
        .collect();
    NodeOccupancy { photon, emitter }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenState {
    /// Complex angular frequency; `Im E` is minus the half linewidth.
    pub energy: c64,
    /// Unit-norm right eigenvector, phase fixed so its largest entry is real positive.
    pub amplitudes: Vec<c64>,
    pub occupancies: NodeOccupancy,
}

impl EigenState {
    pub fn from_amplitudes(energy: c64, mut amplitudes: Vec<c64>, basis: SingleExcitationBasis) -> Self {
        normalize_with_phase(&mut amplitudes);
        let occupancies = occupancies(&amplitudes, basis);
        EigenState {
            energy,
            amplitudes,
            occupancies,
        }
    }
}

fn normalize_with_phase(v: &mut [c64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .copied()
        .fold(c64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() { z } else { best });
    if norm == 0.0 || pivot.norm() == 0.0 {
        return;
    }
    let scale = pivot.conj() / (pivot.norm() * norm);
    for z in v.iter_mut() {
        *z *= scale;
    }
}

/// Every eigenpair of `H_eff`, sorted by `Re E` then `Im E`.
///
/// Each pair is checked against `‖Hv − Ev‖ ≤ 10⁻⁸·‖H‖_F`; a failing pair or
/// a non-converging eigenroutine is reported with the realization seed.
pub fn eigensolve(h: &EffectiveMatrix) -> Result<Vec<EigenState>> {
    let seed = h.realization.seed;
    let dim = h.dimension();
    let finite = (0..dim).all(|j| (0..dim).all(|i| {
        let z = h.matrix[(i, j)];
        z.re.is_finite() && z.im.is_finite()
    }));
    if !finite {
        return Err(Error::Eigensolve {
            seed,
            reason: "matrix has non-finite entries".into(),
        });
    }
    let evd = h.matrix.eigen().map_err(|e| Error::Eigensolve {
        seed,
        reason: format!("{e:?}"),
    })?;
    let (u, s) = (evd.U(), evd.S());
    let tolerance = 1e-8 * h.frobenius_norm().max(f64::MIN_POSITIVE);

    let hu = &h.matrix * u;
    let mut states = Vec::with_capacity(dim);
    for k in 0..dim {
        let energy = s[k];
        let column_norm = (0..dim).map(|i| u[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let residual = (0..dim)
            .map(|i| (hu[(i, k)] - energy * u[(i, k)]).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / column_norm;
        let amplitudes: Vec<c64> = (0..dim).map(|i| u[(i, k)]).collect();
        let state = EigenState::from_amplitudes(energy, amplitudes, h.basis);
        if !(residual <= tolerance) {
            return Err(Error::Eigensolve {
                seed,
                reason: format!("eigenpair {k} residual {residual:.3e} exceeds {tolerance:.3e}"),
            });
        }
        states.push(state);
    }
    states.sort_by(|a, b| {
        a.energy
            .re
            .total_cmp(&b.energy.re)
            .then(a.energy.im.total_cmp(&b.energy.im))
    });
    Ok(states)
}

/// Convenience: build and diagonalize.
pub fn solve_realization(realization: &Realization) -> Result<Vec<EigenState>> {
    eigensolve(&build_h_eff(realization))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_disorder, Boundary, SystemParams};
    use approx::assert_relative_eq;

    fn close(a: c64, b: c64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn jaynes_cummings_matrix() {
        let p = SystemParams::new(1, 1);
        let h = build_h_eff(&Realization::resonant(p));
        assert_eq!(h.dimension(), 2);
        assert_eq!(h.entry(0, 0), c64::new(0.0, -p.kappa / 2.0));
        assert_eq!(h.entry(1, 1), c64::new(0.0, -p.gamma / 2.0));
        assert_eq!(h.entry(0, 1), c64::new(p.g, 0.0));
        assert_eq!(h.entry(1, 0), c64::new(p.g, 0.0));
    }

    #[test]
    fn tight_binding_dimer() {
        let p = SystemParams::new(2, 0);
        let h = build_h_eff(&Realization::resonant(p));
        assert_eq!(h.entry(0, 1), c64::new(-p.j_hop, 0.0));
        assert_eq!(h.entry(1, 0), c64::new(-p.j_hop, 0.0));
        assert_eq!(h.entry(0, 0), c64::new(0.0, -p.kappa / 2.0));
    }

    #[test]
    fn off_diagonal_counts_match_term_enumeration() {
        // Enumerate the terms of the one-excitation Hamiltonian independently:
        // one hopping per bond, one coupling per emitter, each mirrored.
        let p = SystemParams::new(2, 2);
        let h = build_h_eff(&Realization::resonant(p));
        let mut hops = 0;
        let mut couplings = 0;
        for i in 0..h.dimension() {
            for j in (i + 1)..h.dimension() {
                let z = h.entry(i, j);
                if z == c64::new(-p.j_hop, 0.0) {
                    hops += 1;
                } else if z == c64::new(p.g, 0.0) {
                    couplings += 1;
                } else {
                    assert_eq!(z, c64::new(0.0, 0.0), "unexpected entry at ({i},{j})");
                }
            }
        }
        let expected_hops = p.boundary.bonds(p.n_cavities).len();
        let expected_couplings = p.n_emitters();
        assert_eq!((hops, couplings), (expected_hops, expected_couplings));
        assert_eq!((hops, couplings), (1, 4));
    }

    #[test]
    fn hermitian_split() {
        let p = SystemParams::new(3, 2).with_delta(10.0).with_boundary(Boundary::Periodic);
        let r = sample_disorder(&p, 3).unwrap();
        let h = build_h_eff(&r);
        let lossless = build_h_eff(&Realization::from_frequencies(
            p.lossless(),
            r.emitter_frequencies().to_vec(),
            r.seed,
        ).unwrap());
        let basis = h.basis();
        for i in 0..h.dimension() {
            for j in 0..h.dimension() {
                let sum = h.entry(i, j) + h.entry(j, i).conj();
                assert_eq!(sum.im, 0.0);
                assert_relative_eq!(sum.re, 2.0 * lossless.entry(i, j).re, epsilon = 1e-12);
                let diff = h.entry(i, j) - h.entry(j, i).conj();
                if i == j {
                    let loss = match basis.element(i).unwrap() {
                        crate::model::Element::Cavity(_) => p.kappa,
                        crate::model::Element::Emitter(..) => p.gamma,
                    };
                    assert_relative_eq!(diff.im, -loss, epsilon = 1e-12);
                    assert_eq!(diff.re, 0.0);
                } else {
                    assert_eq!(diff, c64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn symmetric_two_level_eigenvalues() {
        let p = SystemParams::new(1, 1).with_losses(3.0, 3.0);
        let states = solve_realization(&Realization::resonant(p)).unwrap();
        assert!(close(states[0].energy, c64::new(-p.g, -1.5), 1e-10));
        assert!(close(states[1].energy, c64::new(p.g, -1.5), 1e-10));
    }

    #[test]
    fn single_node_tavis_cummings() {
        let p = SystemParams::new(1, 3).lossless();
        let states = solve_realization(&Realization::resonant(p)).unwrap();
        let e: Vec<f64> = states.iter().map(|s| s.energy.re).collect();
        let gs3 = p.g * 3f64.sqrt();
        let expected = [-gs3, 0.0, 0.0, gs3];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9 * gs3, "{e:?}");
        }
    }

    #[test]
    fn eigenvectors_are_unit_and_occupancies_sum_to_one() {
        let p = SystemParams::new(4, 3).with_delta(20.0);
        let states = solve_realization(&sample_disorder(&p, 1).unwrap()).unwrap();
        assert_eq!(states.len(), 16);
        for s in &states {
            let norm: f64 = s.amplitudes.iter().map(|z| z.norm_sqr()).sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
            assert_relative_eq!(s.occupancies.total(), 1.0, epsilon = 1e-10);
            let lo = -p.kappa.max(p.gamma) / 2.0 - 1e-9;
            let hi = -p.kappa.min(p.gamma) / 2.0 + 1e-9;
            assert!(s.energy.im >= lo && s.energy.im <= hi, "{:?}", s.energy);
        }
        for w in states.windows(2) {
            assert!(w[0].energy.re <= w[1].energy.re);
        }
    }

    #[test]
    fn occupancy_of_a_localized_photon() {
        let basis = SingleExcitationBasis::new(3, 2);
        let mut v = vec![c64::new(0.0, 0.0); basis.dimension()];
        v[0] = c64::new(1.0, 0.0);
        let occ = occupancies(&v, basis);
        assert_eq!(occ.photon, vec![1.0, 0.0, 0.0]);
        assert_eq!(occ.emitter, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn resonant_dimer_lowest_state_occupancies() {
        // The even photon/emitter split is exact only as J → 0⁺; at finite J
        // the cos k = ±½ modes of a dimer are detuned from the emitters.
        let p = SystemParams::new(2, 2).with_j_over_g(1e-7);
        let states = solve_realization(&Realization::resonant(p)).unwrap();
        let occ = &states[0].occupancies;
        for n in 0..2 {
            assert_relative_eq!(occ.photon[n], 0.25, epsilon = 1e-6);
            assert_relative_eq!(occ.emitter[n], 0.25, epsilon = 1e-6);
        }
        let basis = SingleExcitationBasis::new(2, 2);
        for n in 0..2 {
            for m in 0..2 {
                let a = states[0].amplitudes[basis.index_of_emitter(n, m)];
                assert_relative_eq!(a.norm_sqr(), 0.125, epsilon = 1e-6);
            }
        }
        // At J/g = 0.1 nodes stay balanced by mirror symmetry.
        let states = solve_realization(&Realization::resonant(SystemParams::new(2, 2))).unwrap();
        let occ = &states[0].occupancies;
        assert_relative_eq!(occ.node_weight(0), 0.5, epsilon = 1e-9);
    }
}
