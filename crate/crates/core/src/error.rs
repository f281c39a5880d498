use thiserror::Error;

/// Errors raised across the synthesis and execution pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} has size {size}, above the cap of {cap}")]
    Capacity {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("certificate violation: {0}")]
    CertificateViolation(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
