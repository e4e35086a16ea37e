use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NonHermitianInput(f64),

    #[error("matrix has a non-finite entry")]
    NonFiniteEntry,

    #[error("matrix is not positive semi-definite (eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("matrix is not invertible (smallest eigenvalue {0:.3e})")]
    NotInvertible(f64),

    #[error("function undefined at eigenvalue {0:.6e}")]
    DomainError(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("label sets differ")]
    LabelMismatch,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("normalization fails: residual {0:.3e}")]
    NormalizationError(f64),

    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),

    #[error("reference probability of outcome `{0}` vanishes")]
    ZeroReferenceProbability(String),

    #[error("average state is singular (smallest eigenvalue {0:.3e})")]
    SingularAverageState(f64),

    #[error("dimension {0} exceeds the supported maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
