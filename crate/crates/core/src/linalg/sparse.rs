//! Compressed sparse row storage and the dense-block products used by the
//! subspace iteration.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LinalgError;

/// Row-major sparse matrix. Stored values are finite and nonzero; explicit
/// zeros are dropped on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets in any order.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, entries: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut seen = HashSet::new();
        for (row, col, value) in entries {
            if row >= n_rows || col >= n_cols {
                return Err(LinalgError::OutOfBounds { row, col, n_rows, n_cols });
            }
            if !value.is_finite() {
                return Err(LinalgError::NonFinite { row, col });
            }
            if !seen.insert((row, col)) {
                return Err(LinalgError::DuplicateEntry { row, col });
            }
            if value != 0.0 {
                triplets.push((row, col, value));
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(r, _, _) in &triplets {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = triplets.iter().map(|&(_, c, _)| c).collect();
        let values = triplets.iter().map(|&(_, _, v)| v).collect();
        Ok(Self { n_rows, n_cols, row_ptr, col_idx, values })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, row_ptr: vec![0; n_rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Dense-to-sparse conversion, keeping every nonzero.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self, LinalgError> {
        let entries = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| (i, j, m[(i, j)]));
        Self::from_triplets(m.nrows(), m.ncols(), entries)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored nonzeros.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`, columns ascending.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    /// Row `i` as a standalone sparse vector.
    pub fn row_vector(&self, i: usize) -> SparseVector {
        let (cols, vals) = self.row(i);
        SparseVector { len: self.n_cols, indices: cols.to_vec(), values: vals.to_vec() }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (cols, vals) = self.row(row);
        cols.binary_search(&col).map(|p| vals[p]).unwrap_or(0.0)
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            out[(i, j)] = v;
        }
        out
    }

    /// Restricts to the given rows and columns (in the order given),
    /// renumbering both axes.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let (cs, vs) = self.row(r);
            let mut picked: Vec<(usize, f64)> = cs
                .iter()
                .zip(vs)
                .filter_map(|(&c, &v)| (col_map[c] != usize::MAX).then_some((col_map[c], v)))
                .collect();
            picked.sort_unstable_by_key(|&(c, _)| c);
            for (c, v) in picked {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix { n_rows: rows.len(), n_cols: cols.len(), row_ptr, col_idx, values }
    }

    /// `self * m` for a dense `m` with `n_cols` rows.
    pub fn mul_dense(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(m.nrows(), self.n_cols, "dimension mismatch in sparse * dense");
        let mut out = DMatrix::zeros(self.n_rows, m.ncols());
        if self.n_rows == 0 {
            return out;
        }
        out.as_mut_slice().par_chunks_mut(self.n_rows).zip(m.as_slice().par_chunks(self.n_cols.max(1))).for_each(
            |(out_col, m_col)| {
                for (i, slot) in out_col.iter_mut().enumerate() {
                    let (cols, vals) = self.row(i);
                    *slot = cols.iter().zip(vals).map(|(&c, &v)| v * m_col[c]).sum();
                }
            },
        );
        out
    }

    /// `selfᵀ * m` for a dense `m` with `n_rows` rows.
    pub fn transpose_mul_dense(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(m.nrows(), self.n_rows, "dimension mismatch in sparseᵀ * dense");
        let mut out = DMatrix::zeros(self.n_cols, m.ncols());
        if self.n_cols == 0 {
            return out;
        }
        out.as_mut_slice().par_chunks_mut(self.n_cols).zip(m.as_slice().par_chunks(self.n_rows.max(1))).for_each(
            |(out_col, m_col)| {
                for (i, &mi) in m_col.iter().enumerate() {
                    if mi == 0.0 {
                        continue;
                    }
                    let (cols, vals) = self.row(i);
                    for (&c, &v) in cols.iter().zip(vals) {
                        out_col[c] += v * mi;
                    }
                }
            },
        );
        out
    }
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    len: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new<I>(len: usize, entries: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut pairs: Vec<(usize, f64)> = Vec::new();
        for (idx, value) in entries {
            if idx >= len {
                return Err(LinalgError::OutOfBounds { row: 0, col: idx, n_rows: 1, n_cols: len });
            }
            if !value.is_finite() {
                return Err(LinalgError::NonFinite { row: 0, col: idx });
            }
            if value != 0.0 {
                pairs.push((idx, value));
            }
        }
        pairs.sort_unstable_by_key(|&(i, _)| i);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(LinalgError::DuplicateEntry { row: 0, col: w[0].0 });
        }
        Ok(Self {
            len,
            indices: pairs.iter().map(|&(i, _)| i).collect(),
            values: pairs.iter().map(|&(_, v)| v).collect(),
        })
    }

    pub fn zeros(len: usize) -> Self {
        Self { len, indices: Vec::new(), values: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// Keeps only the entries at the given positions (positions into the
    /// nonzero list, not feature indices).
    pub fn retain_positions(&self, positions: &[usize]) -> SparseVector {
        let mut keep: Vec<usize> = positions.to_vec();
        keep.sort_unstable();
        keep.dedup();
        SparseVector {
            len: self.len,
            indices: keep.iter().map(|&p| self.indices[p]).collect(),
            values: keep.iter().map(|&p| self.values[p]).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            len: self.len,
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
