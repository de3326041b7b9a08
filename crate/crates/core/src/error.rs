use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two vectors or registers that must agree in length do not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The requested encoding cannot hold the number of variables asked for.
    #[error("encoding capacity {capacity} is below the {required} variables required")]
    Capacity { required: usize, capacity: usize },

    /// The instance is too large for an exact method.
    #[error("instance size {n} exceeds the limit {limit} of {method}")]
    TooLarge {
        method: &'static str,
        n: usize,
        limit: usize,
    },

    /// The objective returned a non-finite value.
    #[error("objective returned {value} at parameters {params:?}")]
    NonFinite { value: f64, params: Vec<f64> },

    /// A normalization baseline of zero.
    #[error("baseline cut is zero, normalized cut is undefined")]
    ZeroBaseline,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn param_error(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
