use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// `InternalConsistency` is never a user error: it means an exact identity
/// (an exact division, an evenness check, a diameter bound) failed to hold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("resource limit exceeded: {what} is {requested}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: String,
        limit: String,
    },

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn inconsistent(msg: impl Into<String>) -> Error {
    Error::InternalConsistency(msg.into())
}
