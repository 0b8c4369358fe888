use thiserror::Error;

/// Errors produced by the numerical engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A factorial or exponential routine was asked to go past its hard limit.
    #[error("capacity exceeded: {what} supports {limit}, got {got}")]
    Capacity {
        what: &'static str,
        limit: String,
        got: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("imaginary residue {residue:e} exceeds tolerance (magnitude {magnitude:e})")]
    ImaginaryResidue { residue: f64, magnitude: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn capacity(what: &'static str, limit: impl Into<String>, got: usize) -> Self {
        Error::Capacity {
            what,
            limit: limit.into(),
            got,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
