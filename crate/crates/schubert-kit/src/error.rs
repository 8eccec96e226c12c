//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the library. Grammar and validation problems are
/// `InvalidSpec`/`InvalidInput`; resource guards raise `BoundExceeded`;
/// truncated-series operations that cannot decide raise `Precision`.
#[derive(Debug, Error)]
pub enum KitError {
    /// A group specification (text or structured) failed validation.
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bounded enumeration hit its cutoff instead of silently truncating.
    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),

    /// A truncated-series computation ran out of known coefficients.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// An operation that needs a semisimple root datum got a non-semisimple one.
    #[error("root datum is not semisimple: {0}")]
    NotSemisimple(String),
}

pub type Result<T> = std::result::Result<T, KitError>;
