use thiserror::Error;

/// Errors raised by the core operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eig:e})")]
    NotPositive { min_eig: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("tensor element is not a projection (residual {residual:e})")]
    NotProjection { residual: f64 },
    #[error("subspace is not invariant under the commutant bimodule action (residual {residual:e})")]
    NotInvariant { residual: f64 },
    #[error("subspace is not a bimodule over the commutant (residual {residual:e})")]
    NotBimodule { residual: f64 },
    #[error("operator is not real (residual {residual:e})")]
    NotReal { residual: f64 },
    #[error("Kraus family Gram matrix is not the identity (residual {residual:e})")]
    GramNotIdentity { residual: f64 },
    #[error("requested rank {rank} exceeds maximum {max}")]
    BadRank { rank: usize, max: usize },
    #[error("assertion failed: {check} (residual {residual:e})")]
    AssertionFailed { check: String, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
