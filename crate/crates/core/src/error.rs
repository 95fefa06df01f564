//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A data file row that does not match the expected format.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The interaction source contained no usable rows.
    #[error("no interactions")]
    NoInteractions,

    /// An argument outside its declared domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Dimension or shape disagreement between operands.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A numerical procedure failed (divergence, singular solve, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Evaluation was requested but no user has test interactions.
    #[error("no evaluable users")]
    NoEvaluableUsers,

    /// A model identifier that is not one of the known families.
    #[error("unknown model '{name}'; valid identifiers: {valid}")]
    UnknownModel { name: String, valid: String },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
