//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two group elements or dyadics with different bases were combined.
    #[error("mismatched bases {0} and {1}")]
    BaseMismatch(u32, u32),
    /// A word or element string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A substitution is malformed.
    #[error("invalid substitution: {0}")]
    Substitution(String),
    /// The eigen system has no solution with λ > 1 and positive v.
    #[error("no expanding eigenvalue")]
    NoExpandingEigenvalue,
    /// The operation needs a deterministic substitution.
    #[error("substitution is non-deterministic; use the eigen-system solver")]
    NonDeterministic,
    /// A letter is not in the alphabet.
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    /// A rule index is out of range.
    #[error("rule index {index} out of range for letter {letter:?}")]
    RuleIndex { letter: String, index: usize },
    /// Upward growth found no parent for a row.
    #[error("desubstitution dead end at row {0}")]
    DeadEnd(usize),
    /// A float lies too close to a grid line to be classified.
    #[error("ambiguous position {value} near grid value {grid}")]
    Ambiguous { value: f64, grid: f64 },
    /// A box lies outside the generated part of the tiling.
    #[error("box of {0} lies outside the window")]
    OutsideWindow(String),
    /// The encoder met a cell no case covers.
    #[error("no encoding case applies at {0}")]
    Unencodable(String),
    /// Decoding could not proceed.
    #[error("decode failed: {0}")]
    Decode(String),
    /// Malformed input file or argument.
    #[error("invalid input: {0}")]
    Input(String),
    /// I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// JSON failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Result alias for the crate.
pub type Result<T> = std::result::Result<T, Error>;
