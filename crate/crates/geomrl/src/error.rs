//! Error types shared across the library.

use thiserror::Error;

/// Errors raised by manifold operations, policies, and optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector with numerically zero norm cannot be normalized.
    #[error("vector norm is numerically zero")]
    ZeroNorm,

    /// The log map and parallel transport are undefined between antipodal
    /// points on the sphere.
    #[error("points are numerically antipodal; map is undefined")]
    Antipodal,

    /// A matrix that must be symmetric positive definite is not.
    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    /// A vectorized argument has the wrong length.
    #[error("expected vector of length {expected}, got {got}")]
    BadLength { expected: usize, got: usize },

    /// Composite-manifold factor kinds disagree.
    #[error("factor kinds do not match: {context}")]
    KindMismatch { context: String },

    /// Matrix/vector dimensions disagree.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// A candidate evaluation produced a NaN or infinite return.
    #[error("non-finite return passed to the optimizer")]
    NonFiniteReturn,
}

impl Error {
    pub fn kind_mismatch(context: impl Into<String>) -> Self {
        Error::KindMismatch {
            context: context.into(),
        }
    }

    pub fn dimension_mismatch(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }
}
