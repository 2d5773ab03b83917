use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("could not parse quantity `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("quadrature did not converge at {order} nodes (last {last}, previous {previous})")]
    NonConvergence {
        order: usize,
        last: Complex64,
        previous: Complex64,
    },

    #[error("grid sampling rule violated: {0}")]
    Sampling(String),

    #[error("pattern-not-resolved: {0}")]
    PatternNotResolved(String),

    #[error("profile has no strictly positive value")]
    EmptyProfile,

    #[error("profiles have disjoint supports")]
    DisjointSupport,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }
}
