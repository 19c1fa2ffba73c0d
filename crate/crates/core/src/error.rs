use thiserror::Error;

/// Errors reported by instance construction, allocation conversion and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("problem too large for exhaustive search: {combinations} budget vectors (limit {limit})")]
    TooLarge { combinations: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
