//! Compressed-row storage for the banded ladder-type operators that dominate
//! the meter side of the simulation. Dense `Operator`s convert on demand.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl CsrMatrix {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let (nrows, ncols) = m.shape();
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for r in 0..nrows {
            for c in 0..ncols {
                let v = m[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { nrows, ncols, indptr, indices, data }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut data: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            data.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { nrows, ncols, indptr, indices, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.data[k]))
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut cols = vec![0.0; self.ncols];
        for (_, c, v) in self.iter() {
            cols[c] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        assert_eq!(x.len(), self.ncols, "sparse matvec dimension mismatch");
        DVector::from_iterator(
            self.nrows,
            (0..self.nrows).map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|k| self.data[k] * x[self.indices[k]])
                    .sum()
            }),
        )
    }

    /// `self · x` for a dense right operand.
    pub fn mul_dense(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(x.nrows(), self.ncols, "sparse·dense dimension mismatch");
        let mut out = DMatrix::zeros(self.nrows, x.ncols());
        for j in 0..x.ncols() {
            let col = x.column(j);
            for r in 0..self.nrows {
                let mut acc = C64::new(0.0, 0.0);
                for k in self.indptr[r]..self.indptr[r + 1] {
                    acc += self.data[k] * col[self.indices[k]];
                }
                out[(r, j)] = acc;
            }
        }
        out
    }

    /// `x · selfᵀ` for a dense left operand (no conjugation).
    pub fn right_mul_transpose(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(x.ncols(), self.ncols, "dense·sparseᵀ dimension mismatch");
        let mut out = DMatrix::zeros(x.nrows(), self.nrows);
        for (r, c, v) in self.iter() {
            let src = x.column(c);
            let mut dst = out.column_mut(r);
            dst.axpy(v, &src, C64::new(1.0, 0.0));
        }
        out
    }

    /// tr(self · y) in O(nnz).
    pub fn trace_product(&self, y: &DMatrix<C64>) -> C64 {
        assert_eq!(y.nrows(), self.ncols);
        assert_eq!(y.ncols(), self.nrows);
        self.iter().map(|(r, c, v)| v * y[(c, r)]).sum()
    }
}
