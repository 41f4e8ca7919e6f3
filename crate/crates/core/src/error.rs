use thiserror::Error;

/// Errors raised by the library. Check failures that are part of a
/// verification report are not errors; these are contract violations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("span of B is not contained in span of Z (B vector {0} escapes)")]
    NotContained(usize),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("lookup failed: {0}")]
    Lookup(String),
    #[error("integrity violation: {0}")]
    Integrity(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("invalid code: {0}")]
    Code(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(context: &str, expected: usize, found: usize) -> Error {
    Error::Shape {
        context: context.to_string(),
        expected,
        found,
    }
}
