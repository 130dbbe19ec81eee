use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("coefficient index {index} exceeds series order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("series has nonzero constant term {0}")]
    NonZeroConstantTerm(String),

    #[error("moment of order {required} requested but the model only supplies moments up to order {available}")]
    MomentUnavailable { required: usize, available: usize },

    #[error("Bell polynomial needs {required} arguments, got {supplied}")]
    InsufficientArgs { required: usize, supplied: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (last term magnitude {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("sampling is not supported for {0} models")]
    UnsupportedSampler(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
