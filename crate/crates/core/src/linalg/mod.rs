//! Sparse matrices, truncated SVD, fold-in projection and cosine similarity.

mod sparse;
mod svd;
mod vector;

pub use sparse::{SparseMatrix, SparseVector};
pub use svd::{feature_embeddings, fold_in, truncated_svd, truncated_svd_with, SvdOptions, TruncatedSvd};
pub use vector::{cosine, LatentVector};

use thiserror::Error;

/// Singular values at or below this are treated as zero when inverting Σ.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Vectors with norm at or below this have cosine 0 with everything.
pub const ZERO_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("rank {k} outside 1..={max}")]
    InvalidRank { k: usize, max: usize },
    #[error("matrix has no nonzero entries")]
    DegenerateInput,
    #[error("singular value {index} is {value:e}, latent space cannot be inverted")]
    SingularSpace { index: usize, value: f64 },
    #[error("expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("entry ({row}, {col}) outside {n_rows}x{n_cols}")]
    OutOfBounds { row: usize, col: usize, n_rows: usize, n_cols: usize },
}
