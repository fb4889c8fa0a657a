use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error in `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("degenerate curve: f'' vanishes identically on [{lo}, {hi}]")]
    DegenerateCurve { lo: f64, hi: f64 },

    #[error("non-finite curve value at x = {x}")]
    NonFinite { x: f64 },

    #[error("staircase incomplete: only {blocks} block(s) closed within {budget} terms")]
    StaircaseIncomplete { blocks: usize, budget: u64 },

    #[error("compute guard: Q = {q} exceeds the limit {limit}")]
    ComputeGuard { q: u64, limit: u64 },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
