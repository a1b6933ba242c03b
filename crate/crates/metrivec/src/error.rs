//! Error taxonomy shared across the crate.

use thiserror::Error;

/// Errors raised by constructors, probes and the CLI surface.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs outside an operation's domain (e.g. `a >= b`, `r <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector does not match the representation its space expects.
    #[error("representation mismatch: {0}")]
    Representation(String),

    /// A data-structure invariant would be violated (e.g. a tag outside
    /// its interval).
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// The operation needs metadata the integrand does not expose.
    #[error("capability error: {0}")]
    Capability(String),

    /// An adversarial construction could not be completed; names the
    /// interval that failed.
    #[error("construction failed on [{lo}, {hi}]: {reason}")]
    Construction { lo: f64, hi: f64, reason: String },

    /// Unparseable space, function or point grammar.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
