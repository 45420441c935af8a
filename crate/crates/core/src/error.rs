//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (bad key, bad value, violated constraint).
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure while reading or writing artifacts.
    #[error("io error: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file; `line` is 1-based.
    #[error("parse error: {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Simulation-level failure (bad snapshot, evaluator abort).
    #[error("simulation error: {0}")]
    Sim(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 2 config, 3 I/O, 4 simulation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Parse { .. } => 3,
            Error::Sim(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
