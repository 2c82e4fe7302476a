//! The surface specification language: location database, parsing with
//! name inlining and `where()` resolution, prefix guards, and printing.

mod ast;
mod db;
mod lexer;
mod parser;
mod predicate;
mod printer;

pub use ast::{GuardedSpec, ModifierAst, NamedSpec, Program, RegexAst, SpecAst};
pub use db::{DbError, LocationDb, LocationRecord};
pub use parser::{parse_program, resolve_where};
pub use predicate::{match_predicate, parse_prefix, PrefixField, PrefixPredicate, PrefixTest};
pub use printer::{print_program, print_regex, print_spec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: undefined name {name:?}")]
    Undefined { line: usize, column: usize, name: String },
    #[error("line {line}, column {column}: {name:?} is already defined")]
    Duplicate { line: usize, column: usize, name: String },
    #[error("line {line}, column {column}: where({filter}) matches no location")]
    EmptyWhere { line: usize, column: usize, filter: String },
    #[error("line {line}, column {column}: unknown attribute {attribute:?}")]
    UnknownAttribute { line: usize, column: usize, attribute: String },
    #[error("line {line}, column {column}: {message}")]
    Prefix { line: usize, column: usize, message: String },
}

impl FrontendError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        FrontendError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// The `(line, column)` the error points at.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            FrontendError::Syntax { line, column, .. }
            | FrontendError::Undefined { line, column, .. }
            | FrontendError::Duplicate { line, column, .. }
            | FrontendError::EmptyWhere { line, column, .. }
            | FrontendError::UnknownAttribute { line, column, .. }
            | FrontendError::Prefix { line, column, .. } => Some((*line, *column)),
        }
    }
}
