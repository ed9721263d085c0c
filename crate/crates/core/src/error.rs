use thiserror::Error;

use crate::matrix::Matrix;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: shape mismatch, bad flag combination, non-monic modulus...
    #[error("usage error: {0}")]
    Usage(String),

    /// A caller-side precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Mathematically invalid input, e.g. inverting zero or an isotropic form.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration would exceed the configured cap.
    #[error("resource cap exceeded: {what} needs {needed} items, cap is {cap}")]
    Resource { what: String, needed: u128, cap: u64 },

    /// An identity that must hold on valid input was found violated.
    #[error("invariant violated: {message}")]
    Invariant {
        message: String,
        witness: Option<Box<Matrix>>,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>, witness: Option<&Matrix>) -> Self {
        Error::Invariant {
            message: msg.into(),
            witness: witness.map(|m| Box::new(m.clone())),
        }
    }

    /// Returns `Err(Resource)` when `needed` exceeds `cap`.
    pub(crate) fn check_cap(what: &str, needed: u128, cap: u64) -> Result<()> {
        if needed > cap as u128 {
            Err(Error::Resource {
                what: what.to_string(),
                needed,
                cap,
            })
        } else {
            Ok(())
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
