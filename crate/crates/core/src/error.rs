use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported audio in {path}: {detail}")]
    AudioFormat { path: PathBuf, detail: String },

    #[error("bad {artifact} header: {detail}")]
    Header { artifact: &'static str, detail: String },

    #[error("malformed {artifact} at offset {offset}: {detail}")]
    Decode {
        artifact: &'static str,
        offset: u64,
        detail: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Mismatch(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("unknown {kind} strategy \"{name}\" (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the `tkws` binary for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingInput(_) => 3,
            Error::Header { .. } | Error::Decode { .. } | Error::AudioFormat { .. } => 4,
            Error::Io { .. } => 5,
            Error::Config(_) | Error::UnknownStrategy { .. } => 6,
            Error::Mismatch(_) => 7,
            Error::Dataset(_) => 8,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
