use thiserror::Error;

/// Errors raised by the clustering laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("grover search over an empty domain")]
    EmptyDomain,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("circuit contract violated: {0}")]
    ContractViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
