use thiserror::Error;

/// Errors produced by the toolkit.
///
/// `InvalidInput` covers malformed parameters and configs, `Precondition`
/// covers violated operation preconditions detected by sampling, and
/// `Internal` covers consistency failures that indicate a bug rather than a
/// bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("field '{label}' evaluated outside its domain at {point:?}")]
    OutOfDomain { label: String, point: Vec<f64> },

    #[error("no admissible candidate balls: {0}")]
    EmptyCandidates(String),

    #[error("coverage failure: {0}")]
    Coverage(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code for the CLI: 2 for bad input, 3 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::OutOfDomain { .. }
            | Error::EmptyCandidates(_)
            | Error::Coverage(_)
            | Error::Precondition(_)
            | Error::Json(_) => 2,
            Error::Internal(_) | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
