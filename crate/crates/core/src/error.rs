use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Input data violates a structural invariant (relations, shapes, labels).
    #[error("invalid input at {location}: {message}")]
    Invalid { location: String, message: String },
    /// Input is well formed but fails a mathematical precondition.
    #[error("precondition failed at {location}: {message}")]
    Precondition { location: String, message: String },
}

impl Error {
    pub fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn precondition(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Precondition {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit status for this error: 2 for malformed or invalid data,
    /// 3 for failed preconditions.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_) | Error::Invalid { .. } => 2,
            Error::Precondition { .. } => 3,
        }
    }
}
