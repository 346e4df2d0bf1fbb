use thiserror::Error;

/// Marks a failure detected before any computation ran (exit code 1).
/// Every other failure is a runtime failure (exit code 2).
#[derive(Debug, Error)]
#[error("{0}")]
pub struct Invalid(pub String);

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<Invalid>()) {
        EXIT_VALIDATION
    } else {
        EXIT_RUNTIME
    }
}
