use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weight pmf: {0}")]
    InvalidPmf(String),

    #[error("pmf sums to {0}")]
    PmfSum(String),

    #[error("invalid ensemble parameters: {0}")]
    InvalidParams(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{what}: {count} exceeds the guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        count: String,
        guard: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("malformed input file {path}: {reason}")]
    MalformedFile { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
