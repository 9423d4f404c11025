//! A workbench for the π-calculus and its variants: syntax, reduction
//! semantics, bounded exploration, weak bisimulation, cross-calculus
//! encoders and a harness for checking encoding criteria.

pub mod error;
pub mod syntax;
pub mod text;

pub use error::{Error, Result};
pub use syntax::*;
pub use text::{format_term, parse_process, parse_term};
pub mod encoders;
pub mod equivalence;
pub mod harness;
pub mod semantics;
