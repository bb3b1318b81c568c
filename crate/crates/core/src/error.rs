use thiserror::Error;

/// Crate-wide error type. Validation errors (bad parameters) are kept separate
/// from property failures (a checked mathematical fact did not hold) because
/// the CLI maps them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("property failure: {0}")]
    PropertyFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn limit(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }

    pub fn property(msg: impl Into<String>) -> Self {
        Error::PropertyFailure(msg.into())
    }

    /// Exit code the CLI uses for this error kind: 2 for validation and
    /// resource errors, 3 for property failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PropertyFailure(_) => 3,
            _ => 2,
        }
    }
}
