//! Seeded randomized subspace iteration for the leading singular triplets
//! of a sparse matrix.

use nalgebra::{DMatrix, DVector, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{LatentVector, LinalgError, SparseMatrix, SparseVector, SINGULAR_CUTOFF};

/// Iteration controls for [`truncated_svd_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvdOptions {
    /// Extra sketch columns beyond the requested rank.
    pub oversampling: usize,
    /// Power iterations always performed before the first convergence check.
    pub power_iterations: usize,
    /// Stop once every requested triplet has residual
    /// `‖A v − σ u‖ ≤ tolerance · σ₁`. `None` stops after the fixed
    /// power iterations.
    pub tolerance: Option<f64>,
    /// Hard cap on subspace iterations, including the fixed ones.
    pub max_iterations: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self { oversampling: 8, power_iterations: 4, tolerance: Some(1e-10), max_iterations: 1000 }
    }
}

impl SvdOptions {
    /// Oversampling 8 and exactly 4 power iterations, no convergence check.
    pub fn fixed() -> Self {
        Self { tolerance: None, ..Self::default() }
    }
}

/// Rank-k factorization `X ≈ U diag(σ) Vᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSvd {
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v: DMatrix<f64>,
}

impl TruncatedSvd {
    /// Assembles a factorization from explicit factors, e.g. after a sign
    /// flip in tests. Shapes must agree.
    pub fn from_parts(u: DMatrix<f64>, sigma: DVector<f64>, v: DMatrix<f64>) -> Result<Self, LinalgError> {
        let k = sigma.len();
        if u.ncols() != k || v.ncols() != k {
            return Err(LinalgError::DimensionMismatch { expected: k, found: u.ncols().max(v.ncols()) });
        }
        Ok(Self { u, sigma, v })
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Left singular vectors, `n_rows × k`.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Singular values, nonincreasing.
    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    /// Right singular vectors, `n_cols × k`.
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn n_rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.v.nrows()
    }

    /// `U diag(σ) Vᵀ` as a dense matrix.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }

    /// Keeps the leading `k` triplets.
    pub fn truncate(&self, k: usize) -> Result<TruncatedSvd, LinalgError> {
        if k == 0 || k > self.rank() {
            return Err(LinalgError::InvalidRank { k, max: self.rank() });
        }
        Ok(Self {
            u: self.u.columns(0, k).into_owned(),
            sigma: self.sigma.rows(0, k).into_owned(),
            v: self.v.columns(0, k).into_owned(),
        })
    }
}

/// Leading `k` singular triplets of `x` with default [`SvdOptions`].
pub fn truncated_svd(x: &SparseMatrix, k: usize, seed: u64) -> Result<TruncatedSvd, LinalgError> {
    truncated_svd_with(x, k, seed, &SvdOptions::default())
}

pub fn truncated_svd_with(
    x: &SparseMatrix,
    k: usize,
    seed: u64,
    options: &SvdOptions,
) -> Result<TruncatedSvd, LinalgError> {
    let (m, n) = (x.n_rows(), x.n_cols());
    let max_rank = m.min(n);
    if k == 0 || k > max_rank {
        return Err(LinalgError::InvalidRank { k, max: max_rank });
    }
    if x.nnz() == 0 {
        return Err(LinalgError::DegenerateInput);
    }

    let block = (k + options.oversampling).min(max_rank);
    // With a full-width sketch the range is captured exactly on the first pass.
    let exact = block == max_rank;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(n, block, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormalize(x.mul_dense(&omega)).0;

    let mut iterations = 0;
    loop {
        // Aᵀ Q = Z R with R = Ũ Σ Ṽᵀ, so Qᵀ A = Ṽ Σ (Z Ũ)ᵀ.
        let (z, r) = orthonormalize(x.transpose_mul_dense(&q));
        let fixed_phase = iterations < options.power_iterations.min(options.max_iterations) && !exact;
        if !fixed_phase {
            let (ur, sigma, vr) = small_svd(r);
            let u = &q * vr.columns(0, k);
            let v = &z * ur.columns(0, k);
            let sigma = sigma.rows(0, k).into_owned();
            let done = exact
                || iterations >= options.max_iterations
                || match options.tolerance {
                    None => true,
                    Some(tol) => max_residual(x, &u, &sigma, &v) <= tol * sigma[0].max(f64::MIN_POSITIVE),
                };
            if done {
                let mut svd = TruncatedSvd { u, sigma, v };
                fix_signs(&mut svd);
                return Ok(svd);
            }
        }
        q = orthonormalize(x.mul_dense(&z)).0;
        iterations += 1;
    }
}

/// Thin QR `m = Q R`. Two rounds of Cholesky QR when the Gram matrix is
/// well conditioned, Householder otherwise.
fn orthonormalize(m: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    if let Some((q, r)) = cholesky_qr(&m).and_then(|(q1, r1)| cholesky_qr(&q1).map(|(q, r2)| (q, r2 * r1))) {
        let gram = q.transpose() * &q;
        let off = (gram - DMatrix::identity(q.ncols(), q.ncols())).abs().max();
        if off <= 1e-12 {
            return (q, r);
        }
    }
    let qr = m.qr();
    (qr.q(), qr.r())
}

fn cholesky_qr(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let gram = m.transpose() * m;
    let scale = gram.diagonal().max();
    if !scale.is_finite() || scale <= 0.0 {
        return None;
    }
    let l = gram.cholesky()?.l();
    if l.diagonal().min() <= 1e-7 * scale.sqrt() {
        return None;
    }
    let l_inv = l.clone().try_inverse()?;
    Some((m * l_inv.transpose(), l.transpose()))
}

/// SVD of the small square factor, sorted by nonincreasing singular value.
fn small_svd(r: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = SVD::new(r, true, true);
    let left = svd.u.expect("requested u");
    let right_t = svd.v_t.expect("requested v_t");
    let values = svd.singular_values;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let ul = DMatrix::from_fn(left.nrows(), order.len(), |i, j| left[(i, order[j])]);
    let vr = DMatrix::from_fn(right_t.ncols(), order.len(), |i, j| right_t[(order[j], i)]);
    let sigma = DVector::from_iterator(order.len(), order.iter().map(|&j| values[j].max(0.0)));
    (ul, sigma, vr)
}

fn max_residual(x: &SparseMatrix, u: &DMatrix<f64>, sigma: &DVector<f64>, v: &DMatrix<f64>) -> f64 {
    let av = x.mul_dense(v);
    (0..sigma.len()).map(|j| (av.column(j) - u.column(j) * sigma[j]).norm()).fold(0.0, f64::max)
}

/// Makes the largest-magnitude entry of every V column positive, flipping
/// the paired U column alongside.
fn fix_signs(svd: &mut TruncatedSvd) {
    for j in 0..svd.rank() {
        let col = svd.v.column(j);
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if !col.is_empty() && col[best] < 0.0 {
            svd.v.column_mut(j).neg_mut();
            svd.u.column_mut(j).neg_mut();
        }
    }
}

/// Column embeddings `diag(σ) Vᵀ`, one column per matrix column.
pub fn feature_embeddings(svd: &TruncatedSvd) -> DMatrix<f64> {
    let mut out = svd.v.transpose();
    for (i, s) in svd.sigma.iter().enumerate() {
        out.row_mut(i).scale_mut(*s);
    }
    out
}

/// Projects a new row `x` into the latent space as `x V diag(σ)⁻¹`.
pub fn fold_in(x: &SparseVector, svd: &TruncatedSvd) -> Result<LatentVector, LinalgError> {
    if x.len() != svd.n_cols() {
        return Err(LinalgError::DimensionMismatch { expected: svd.n_cols(), found: x.len() });
    }
    if let Some((index, &value)) = svd.sigma.iter().enumerate().find(|(_, s)| **s <= SINGULAR_CUTOFF) {
        return Err(LinalgError::SingularSpace { index, value });
    }
    let mut coords = vec![0.0; svd.rank()];
    for (i, value) in x.iter() {
        for (j, c) in coords.iter_mut().enumerate() {
            *c += value * svd.v[(i, j)];
        }
    }
    for (c, s) in coords.iter_mut().zip(svd.sigma.iter()) {
        *c /= s;
    }
    Ok(LatentVector::new(coords))
}
