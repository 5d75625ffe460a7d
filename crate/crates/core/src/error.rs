use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments that violate an operation's preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    /// A configuration that is well-formed but cannot be executed.
    #[error("configuration error: {0}")]
    Config(String),

    /// Failures that happen while an otherwise valid computation runs.
    #[error("runtime failure: {0}")]
    Runtime(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Input-class errors map to exit code 1, everything else to 2.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Input(_) | Error::DimensionMismatch { .. } | Error::Parse { .. } | Error::Config(_) => true,
            // a missing input file is the caller's mistake
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
