use thiserror::Error;

use crate::certify::ViolationWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("space has {points} points, above the enumeration cap of {cap} (raise the cap to proceed)")]
    SpaceTooLarge { points: u128, cap: u64 },

    #[error("pairwise scan over {pairs} pairs exceeds the scan cap of {cap}")]
    ScanTooLarge { pairs: u128, cap: u128 },

    #[error("the subset Y is empty")]
    EmptySubset,

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("arity mismatch: expected {expected} coordinates, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid instance field `{field}`: {message}")]
    InvalidInstance { field: String, message: String },

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("declared sup bound {bound} violated: |f| = {value} at rank {rank}")]
    SupBoundViolated { bound: f64, value: f64, rank: u64 },

    #[error("bounded differences fail on Y: {0}")]
    NotCertified(ViolationWitness),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInstance {
            field: field.into(),
            message: message.into(),
        }
    }
}
