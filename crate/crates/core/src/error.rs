use thiserror::Error;

/// Errors produced by the vector algebra, encoders, and analytics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MbatError {
    #[error("invalid dimension: {0} (must be at least 1)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cosine is undefined for a zero vector")]
    UndefinedCosine,

    #[error("cannot normalize a zero vector")]
    UndefinedNormalization,

    #[error("invalid roles: {0}")]
    InvalidRoles(String),

    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("no dimension up to {limit} reaches the target probability")]
    SolverLimit { limit: u64 },

    #[error("corrupt file: {0}")]
    CorruptFile(String),
}

pub type Result<T, E = MbatError> = std::result::Result<T, E>;

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(MbatError::DimensionMismatch { expected, found })
    }
}
