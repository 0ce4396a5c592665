use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("extension degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("invalid instance field `{field}`: {reason}")]
    InvalidInstance { field: &'static str, reason: String },
    #[error("no m-path exists in the configuration graph")]
    NoPath,
    #[error("brute-force search would visit {0} assignments, above the guardrail")]
    GuardrailExceeded(u128),
    #[error("work curve did not reach zero within {0} steps")]
    CurveNotTruncated(usize),
    #[error("work curve is not non-increasing at cost {0}")]
    NonMonotoneCurve(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("multiplicity violation: {0}")]
    Multiplicity(String),
}
