use thiserror::Error;

use crate::syntax::CalculusId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{constructor} is not admitted by calculus {calculus}")]
    IllFormed { constructor: &'static str, calculus: CalculusId },

    #[error("context error: {0}")]
    Context(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reject `p` unless it is a closed term of `calc`.
pub fn ensure_well_formed(p: &crate::syntax::Process, calc: CalculusId) -> Result<()> {
    match crate::syntax::first_ill_formed(p, calc) {
        None => Ok(()),
        Some(constructor) => Err(Error::IllFormed { constructor, calculus: calc }),
    }
}
