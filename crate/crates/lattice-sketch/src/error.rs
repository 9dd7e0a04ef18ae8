//! Crate-wide error type.

use std::fmt;

/// Errors surfaced by sketch, lattice and automaton operations.
#[derive(Debug)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    DimensionMismatch { expected: usize, got: usize },
    /// A stream record referenced an item index outside `[1, n]`.
    IndexOutOfRange { index: usize, n: usize },
    /// An enumeration would visit more points than the configured budget.
    /// Refusal is explicit; results are never silently truncated.
    BudgetExceeded { required: u128, budget: u64 },
    /// Two states (or a state and a kernel) disagree on the kernel fingerprint.
    FingerprintMismatch { expected: String, got: String },
    /// A sketch state is structurally inconsistent with its kernel.
    InconsistentState(String),
    /// A construction-time self-check failed. This indicates a bug in the
    /// library, not bad input.
    SelfTestFailed(String),
    /// The operation requires a path-reversible automaton.
    NotPathReversible(String),
    /// Unparseable or schema-violating input.
    Malformed(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::IndexOutOfRange { index, n } => {
                write!(f, "item index {index} out of range [1, {n}]")
            }
            Error::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration budget exceeded: {required} points required, budget is {budget}"
            ),
            Error::FingerprintMismatch { expected, got } => write!(
                f,
                "kernel fingerprint mismatch: expected {expected}, got {got}"
            ),
            Error::InconsistentState(msg) => write!(f, "inconsistent sketch state: {msg}"),
            Error::SelfTestFailed(msg) => write!(f, "internal self-test failed: {msg}"),
            Error::NotPathReversible(msg) => write!(f, "automaton is not path reversible: {msg}"),
            Error::Malformed(msg) => write!(f, "malformed input: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
