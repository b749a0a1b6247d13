//! Numeric kernels: dense and sparse matrices, truncated SVD, collapsed
//! Gibbs LDA, OLS with Wald chunk tests, bootstrap optimism and rank
//! statistics. Every kernel is single-threaded and deterministic given its
//! seed.

mod bootstrap;
mod dense;
mod lda;
mod ols;
mod sparse;
mod stats;
mod svd;

use thiserror::Error;

pub use bootstrap::{
    bootstrap_optimism, bootstrap_optimism_with, resample_indices, OptimismResult,
};
pub use dense::{dot, norm, orthonormalize, Dense};
pub use lda::{gibbs_lda, LdaModel, LdaParams, LIKELIHOOD_TOLERANCE, LIKELIHOOD_WINDOW};
pub use ols::{ols_fit, wald_chunk, OlsFit, WaldResult};
pub use sparse::SparseMatrix;
pub use stats::{average_ranks, percentile, spearman};
pub use svd::{truncated_svd, truncated_svd_with, SvdFactors, SvdOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("SVD did not converge after {sweeps} sweeps (residual {residual:e})")]
    ConvergenceFailure { sweeps: usize, residual: f64 },
    #[error("design matrix is rank deficient; dependent columns {columns:?}")]
    SingularDesign { columns: Vec<usize> },
    #[error("covariance block of the coefficient group is singular")]
    SingularCovariance,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
