use thiserror::Error;

/// Errors raised by the numeric pipelines.
///
/// The precision-related variants (`AmbiguousFloor`, `NotNearInteger`,
/// `IntegralityFailure`, `UncertainDigits`) are recoverable by raising the
/// working precision; [`crate::numerics::with_retry`] does exactly that.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("floor is ambiguous: value lies within its error bound of an integer")]
    AmbiguousFloor,
    #[error("no integer lies within the allowed slack of {value}")]
    NotNearInteger { value: String },
    #[error("integrality certification failed for {what}")]
    IntegralityFailure { what: String },
    #[error("error bound too large to certify {digits} decimal digits")]
    UncertainDigits { digits: u32 },
    #[error("precision exhausted after {retries} retries (last work_bits = {work_bits})")]
    PrecisionExhausted { retries: u32, work_bits: u32 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("plan error: {0}")]
    Plan(String),
}

impl Error {
    /// True for failures that a higher working precision may cure.
    pub fn wants_more_precision(&self) -> bool {
        matches!(
            self,
            Error::AmbiguousFloor
                | Error::NotNearInteger { .. }
                | Error::IntegralityFailure { .. }
                | Error::UncertainDigits { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
