//! Game description language: reader, typed AST, canonical printer and
//! semantic validation.

pub mod ast;
pub mod keywords;
mod parser;
pub mod serialize;
pub mod sexp;
pub mod validate;

use thiserror::Error;

pub use parser::parse_game;
pub use serialize::serialize;
pub use validate::{validate, Issue, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: expected {}, found {found}", .expected.join(" or "))]
    Syntax { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("{line}:{column}: unknown keyword `{keyword}` in {context}")]
    UnknownKeyword { line: usize, column: usize, keyword: String, context: String },
    #[error("{line}:{column}: {message}")]
    Arity { line: usize, column: usize, message: String },
}

impl ParseError {
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::UnknownKeyword { .. } => "UnknownKeyword",
            ParseError::Arity { .. } => "ArityError",
        }
    }

    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownKeyword { line, column, .. }
            | ParseError::Arity { line, column, .. } => (*line, *column),
        }
    }
}
