//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value (qubit count out of range, zero epochs, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Structurally invalid input (shape mismatch, bad qubit index, ...).
    #[error("structural error: {0}")]
    Structure(String),

    /// Non-finite numeric input or a computation that produced NaN.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Malformed dataset file; `line` is 1-based.
    #[error("ingest error at line {line}: {message}")]
    Ingest { line: usize, message: String },

    /// A metric is undefined for the given inputs (e.g. single-class AUC).
    #[error("metric error: {0}")]
    Metric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn ingest(line: usize, msg: impl Into<String>) -> Self {
        Error::Ingest {
            line,
            message: msg.into(),
        }
    }

    pub fn metric(msg: impl Into<String>) -> Self {
        Error::Metric(msg.into())
    }

    /// Prefix the message with context (e.g. which tree or fold failed)
    /// without changing the error class.
    pub fn annotate(self, context: impl AsRef<str>) -> Self {
        let context = context.as_ref();
        match self {
            Error::Config(m) => Error::Config(format!("{context}: {m}")),
            Error::Structure(m) => Error::Structure(format!("{context}: {m}")),
            Error::Numeric(m) => Error::Numeric(format!("{context}: {m}")),
            Error::Metric(m) => Error::Metric(format!("{context}: {m}")),
            Error::Ingest { line, message } => Error::Ingest {
                line,
                message: format!("{context}: {message}"),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
