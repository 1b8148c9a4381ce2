use thiserror::Error;

/// Errors produced by the lab.
#[derive(Debug, Error)]
pub enum LabError {
    /// An argument is outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The request exceeds a compute or memory cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The input object violates a structural requirement.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Parameter(msg.into()))
}
