//! Lexer, parser and printer for the annotated C subset.

pub mod ast;
mod lexer;
mod parser;
mod pretty;

use ast::{Pos, SourceUnit};
use thiserror::Error;

pub use pretty::print_expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{pos}: syntax error: expected {}, found {found}", expected_list(.expected))]
    Syntax { pos: Pos, expected: Vec<String>, found: String },
    #[error("{pos}: unknown annotation clause `{keyword}`")]
    UnknownClause { pos: Pos, keyword: String },
}

impl FrontendError {
    pub fn pos(&self) -> Pos {
        match self {
            FrontendError::Syntax { pos, .. } | FrontendError::UnknownClause { pos, .. } => *pos,
        }
    }
}

fn expected_list(e: &[String]) -> String {
    match e.len() {
        0 => "valid input".into(),
        1 => e[0].clone(),
        _ => format!("one of {}", e.join(", ")),
    }
}

/// Parses a standalone source text (registered as file 0).
pub fn parse_program(text: &str) -> Result<SourceUnit, FrontendError> {
    parser::parse_file(text, "<input>", 0)
}

/// Parses `text` as the file with index `file` in the unit's file table.
pub fn parse_file(text: &str, name: &str, file: u32) -> Result<SourceUnit, FrontendError> {
    parser::parse_file(text, name, file)
}

pub fn pretty_print(unit: &SourceUnit) -> String {
    pretty::print_unit(unit)
}
