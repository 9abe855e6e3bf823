use std::path::PathBuf;
use thiserror::Error;

/// CLI-level errors. Every variant maps to a stable category string and a
/// distinct nonzero exit code so callers can dispatch on failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("{path} row {row}: {message}")]
    Format {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path} row {row}: {message}")]
    Validation {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path} row {row}: {message}")]
    Ordering {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("initialisation failure: {0}")]
    Init(String),

    #[error("{0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Validation { .. } => "validation",
            CliError::Ordering { .. } => "ordering",
            CliError::Numeric(_) => "numeric",
            CliError::Init(_) => "init",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Format { .. } => 4,
            CliError::Validation { .. } => 5,
            CliError::Ordering { .. } => 6,
            CliError::Numeric(_) => 7,
            CliError::Init(_) => 8,
            CliError::Internal(_) => 9,
        }
    }

    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

impl From<seiprd::Error> for CliError {
    fn from(err: seiprd::Error) -> Self {
        match err {
            seiprd::Error::InitialisationFailed { .. } => CliError::Init(err.to_string()),
            seiprd::Error::IntegrationDiverged { .. } => CliError::Numeric(err.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}
