//! Error type shared by every module in the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by corpus ingestion, encoding, training and evaluation.
///
/// The variants map onto the CLI exit codes: `Config` is a usage error,
/// `Io`/`Parse`/`Data`/`Shape` are data errors, `Numeric` is a numeric
/// failure.
#[derive(Debug, Error)]
pub enum GlowError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl GlowError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GlowError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        GlowError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GlowError>;
