//! Compressed-sparse-row complex matrices: just the operations the
//! master-equation solver needs.

use faer::{c64, Mat};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<c64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![c64::new(1.0, 0.0); n],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping entries that cancel to exactly zero.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, c64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<c64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) outside {nrows}×{ncols}");
            if rows.last() == Some(&r) && indices.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                indices.push(c);
                values.push(v);
            }
        }
        let mut keep_indices = Vec::with_capacity(indices.len());
        let mut keep_values = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if v != ZERO {
                indptr[r + 1] += 1;
                keep_indices.push(c);
                keep_values.push(v);
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices: keep_indices,
            values: keep_values,
        }
    }

    /// Assembles from rows already sorted by column with no duplicates.
    pub(crate) fn from_sorted_rows(nrows: usize, ncols: usize, indptr: Vec<usize>, indices: Vec<usize>, values: Vec<c64>) -> Self {
        debug_assert_eq!(indptr.len(), nrows + 1);
        debug_assert_eq!(indices.len(), values.len());
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> c64 {
        self.row(r).find(|&(j, _)| j == c).map_or(ZERO, |(_, v)| v)
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn scale(&self, s: c64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut t = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// `y = A x`.
    #[inline]
    pub fn matvec_into(&self, x: &[c64], y: &mut [c64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for idx in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[idx] * x[self.indices[idx]];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        let mut y = vec![ZERO; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `A · X` for dense `X`.
    pub fn mul_dense(&self, x: &Mat<c64>) -> Mat<c64> {
        assert_eq!(self.ncols, x.nrows());
        let mut out = Mat::<c64>::zeros(self.nrows, x.ncols());
        for (r, k, a) in self.triplets() {
            for j in 0..x.ncols() {
                out[(r, j)] += a * x[(k, j)];
            }
        }
        out
    }

    /// `X · A` for dense `X`.
    pub fn dense_mul(&self, x: &Mat<c64>) -> Mat<c64> {
        assert_eq!(x.ncols(), self.nrows);
        let mut out = Mat::<c64>::zeros(x.nrows(), self.ncols);
        for (k, c, a) in self.triplets() {
            for i in 0..x.nrows() {
                out[(i, c)] += x[(i, k)] * a;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (_, c, v) in self.triplets() {
            sums[c] += v.norm();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}
