use thiserror::Error;

/// Errors raised by the simulator and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TqwError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operator is not unitary (|C^dag C - I| = {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("half-trace d0 = {d0} at k = {k} lies outside [-1, 1]; the Bloch unitary is mis-assembled")]
    HalfTraceOutOfRange { k: f64, d0: f64 },

    #[error("reduced density matrix eigenvalue {value} outside [0, 1]")]
    EigenvalueOutOfRange { value: f64 },

    #[error("closed-form entropy argument {value} is negative")]
    NegativeDiscriminant { value: f64 },

    #[error("series has {len} samples, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, TqwError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> TqwError {
    TqwError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
