use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("composite vector must have even length, found {0}")]
    OddLength(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive definite (factorization failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("kernel has a non-null pseudo-kernel; use the augmented solver")]
    NonNullPseudoKernel,

    #[error("augmented solution breaks conjugate symmetry (discrepancy {0:e})")]
    ConjugateAsymmetry(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("linear solve residual {0:e} exceeds tolerance")]
    Residual(f64),

    #[error("signal has zero power")]
    ZeroPower,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }

    /// Whether the error comes from the numerics (singular or indefinite
    /// systems) rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::ConjugateAsymmetry(_)
                | Error::NonFinite(_)
                | Error::NotHermitian(_)
                | Error::Residual(_)
        )
    }
}
