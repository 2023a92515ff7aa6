//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error enumeration.
///
/// The distinction matters to callers: `Structural` means an instance or
/// encoding violates its own invariants, `Argument` means a well-formed value
/// was passed to an operation whose preconditions it does not meet,
/// `Capacity` means an exact enumeration was refused because it would exceed
/// the configured work budget, and `Oracle` wraps failures reported by a
/// caller-supplied oracle.
#[derive(Debug, Error)]
pub enum Error {
    /// An instance, encoding, or file violates a structural invariant
    /// (mismatched dimensions, duplicate edges, empty clause, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// Inputs are individually well-formed but do not satisfy an operation's
    /// preconditions (wrong kind, non-power-of-two length, b*g != d, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// An exact enumeration would exceed the work budget.
    #[error("capacity exceeded: {context} (estimated work {estimated}, limit {limit})")]
    Capacity {
        /// What was being enumerated.
        context: String,
        /// Estimated number of elementary steps.
        estimated: u128,
        /// Configured limit.
        limit: u128,
    },

    /// A chain plan, preset name, or CLI configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller-supplied oracle failed or returned out-of-contract output.
    #[error("oracle failure: {0}")]
    Oracle(String),

    /// Underlying I/O failure (file formats, CLI).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in an instance file or chain plan.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a [`Error::Structural`] with a formatted message.
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    /// Shorthand for an [`Error::Argument`] with a formatted message.
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Shorthand for a capacity error.
    pub fn capacity(context: impl Into<String>, estimated: u128, limit: u128) -> Self {
        Error::Capacity {
            context: context.into(),
            estimated,
            limit,
        }
    }
}
