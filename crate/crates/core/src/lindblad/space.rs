//! The truncated Fock space of a small array and its ladder operators.
//!
//! Factors are ordered cavities first (`0..N`), then emitters row-major
//! (`(n, m)` at `N + n·M + m`). The first factor is the most significant
//! digit of a basis index, so cavity 0 varies slowest.

use faer::c64;

use super::sparse::CsrMatrix;
use crate::effective::EffectiveMatrix;
use crate::error::{Error, Result};
use crate::model::{Element, Realization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSpace {
    pub n_cavities: usize,
    pub emitters_per_cavity: usize,
    pub fock_cutoff: usize,
}

pub const DEFAULT_FOCK_CUTOFF: usize = 2;

impl TruncatedSpace {
    pub fn new(n_cavities: usize, emitters_per_cavity: usize, fock_cutoff: usize) -> Result<Self> {
        if fock_cutoff < 1 {
            return Err(Error::invalid("fock_cutoff", "must be at least 1"));
        }
        if n_cavities < 1 {
            return Err(Error::invalid("n_cavities", "must be at least 1"));
        }
        let space = TruncatedSpace {
            n_cavities,
            emitters_per_cavity,
            fock_cutoff,
        };
        if space.checked_dimension().is_none() {
            return Err(Error::invalid("fock_cutoff", "truncated space dimension overflows usize"));
        }
        Ok(space)
    }

    fn checked_dimension(&self) -> Option<usize> {
        let photons = (self.fock_cutoff + 1).checked_pow(self.n_cavities as u32)?;
        let emitters = 2usize.checked_pow((self.n_cavities * self.emitters_per_cavity) as u32)?;
        photons.checked_mul(emitters)
    }

    /// `(cutoff + 1)^N · 2^(N·M)`.
    pub fn dimension(&self) -> usize {
        self.checked_dimension().expect("dimension checked at construction")
    }

    pub fn n_factors(&self) -> usize {
        self.n_cavities * (1 + self.emitters_per_cavity)
    }

    pub fn factor_of(&self, element: Element) -> usize {
        match element {
            Element::Cavity(n) => n,
            Element::Emitter(n, m) => self.n_cavities + n * self.emitters_per_cavity + m,
        }
    }

    fn local_dim(&self, factor: usize) -> usize {
        if factor < self.n_cavities {
            self.fock_cutoff + 1
        } else {
            2
        }
    }

    /// Index stride of one factor.
    fn stride(&self, factor: usize) -> usize {
        ((factor + 1)..self.n_factors()).map(|f| self.local_dim(f)).product()
    }

    /// Occupation (photon number or 0/1) of `factor` in basis state `index`.
    pub fn occupation(&self, index: usize, factor: usize) -> usize {
        (index / self.stride(factor)) % self.local_dim(factor)
    }

    /// Per-factor occupations of a basis state.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.n_factors()).map(|f| self.occupation(index, f)).collect()
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        assert_eq!(digits.len(), self.n_factors());
        digits
            .iter()
            .enumerate()
            .fold(0, |acc, (f, &d)| acc * self.local_dim(f) + d)
    }

    /// Photons plus excited emitters.
    pub fn excitation_number(&self, index: usize) -> usize {
        self.digits(index).iter().sum()
    }

    /// Single-factor lowering operator `|d−1⟩⟨d| · √d` embedded in the full space.
    fn lowering_on(&self, factor: usize) -> CsrMatrix {
        let stride = self.stride(factor);
        let local = self.local_dim(factor);
        let d = self.dimension();
        let triplets = (0..d)
            .filter_map(|col| {
                let occ = (col / stride) % local;
                (occ > 0).then(|| (col - stride, col, c64::new((occ as f64).sqrt(), 0.0)))
            })
            .collect();
        CsrMatrix::from_triplets(d, d, triplets)
    }

    pub fn annihilation(&self, cavity: usize) -> CsrMatrix {
        assert!(cavity < self.n_cavities);
        self.lowering_on(cavity)
    }

    pub fn sigma_minus(&self, cavity: usize, emitter: usize) -> CsrMatrix {
        assert!(cavity < self.n_cavities && emitter < self.emitters_per_cavity);
        self.lowering_on(self.factor_of(Element::Emitter(cavity, emitter)))
    }

    /// The lowering operator of an element: `a_n` or `σ⁻_{n,m}`.
    pub fn lowering(&self, element: Element) -> CsrMatrix {
        self.lowering_on(self.factor_of(element))
    }
}

/// `a_n` for every cavity and `σ⁻_{n,m}` for every emitter (row-major).
#[derive(Debug, Clone)]
pub struct Operators {
    pub a: Vec<CsrMatrix>,
    pub sigma: Vec<CsrMatrix>,
}

pub fn build_operators(space: &TruncatedSpace) -> Operators {
    let m = space.emitters_per_cavity;
    Operators {
        a: (0..space.n_cavities).map(|n| space.annihilation(n)).collect(),
        sigma: (0..space.n_cavities * m)
            .map(|k| space.sigma_minus(k / m.max(1), k % m.max(1)))
            .collect(),
    }
}

/// The array Hamiltonian on the truncated space, built from the same hopping
/// and coupling entries as the single-excitation matrix so both solvers
/// agree on signs and on the emitter frequencies of the realization.
pub fn hamiltonian(space: &TruncatedSpace, ops: &Operators, realization: &Realization) -> Result<CsrMatrix> {
    let p = &realization.params;
    if (p.n_cavities, p.emitters_per_cavity) != (space.n_cavities, space.emitters_per_cavity) {
        return Err(Error::invalid("space", "truncated space does not match the realization geometry"));
    }
    // Lossless copy: the first-quantized matrix gives every coefficient.
    let mut lossless = realization.clone();
    lossless.params.kappa = 0.0;
    lossless.params.gamma = 0.0;
    let h1 = crate::effective::build_h_eff(&lossless);
    Ok(second_quantize(space, ops, &h1))
}

fn second_quantize(space: &TruncatedSpace, ops: &Operators, h1: &EffectiveMatrix) -> CsrMatrix {
    let basis = h1.basis();
    let lowering = |i: usize| -> &CsrMatrix {
        match basis.element(i).expect("index within basis") {
            Element::Cavity(n) => &ops.a[n],
            Element::Emitter(n, m) => &ops.sigma[n * space.emitters_per_cavity + m],
        }
    };
    let d = space.dimension();
    let mut h = CsrMatrix::zeros(d, d);
    for i in 0..h1.dimension() {
        for j in 0..h1.dimension() {
            let v = h1.entry(i, j);
            if v == c64::new(0.0, 0.0) {
                continue;
            }
            // Σ h_ij c_i† c_j
            let term = lowering(i).adjoint().matmul(lowering(j)).scale(v);
            h = h.add(&term);
        }
    }
    h
}
