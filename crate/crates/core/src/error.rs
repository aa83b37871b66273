use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance is not metric: {0}")]
    NonMetric(String),

    #[error("instance too large: {0}")]
    Size(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("malformed set family: {0}")]
    Structure(String),

    #[error("LP solver failure: {0}")]
    SolverFailure(String),

    #[error("internal consistency failure in {stage}: {msg}")]
    Internal { stage: &'static str, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn internal(stage: &'static str, msg: impl Into<String>) -> Self {
        Error::Internal {
            stage,
            msg: msg.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal { .. } | Error::SolverFailure(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
