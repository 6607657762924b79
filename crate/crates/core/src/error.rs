use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid PRBS spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("frame synchronization failed: {0}")]
    SyncFailure(&'static str),

    #[error("transition estimation failed: no samples with x = {0}")]
    MissingInput(u8),

    #[error("wrong transition table kind: expected {0}")]
    WrongTableKind(&'static str),

    #[error("rho must lie in [0, 1), got {0}")]
    RhoDomain(f64),

    #[error("randomness rate {0} bits/letter gives a zero secrecy exponent")]
    InfeasibleRate(f64),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
