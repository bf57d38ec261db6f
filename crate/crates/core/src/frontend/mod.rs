//! Front end for the Python-like subject language: lexing, parsing, and
//! lowering of control flow into flat statement lists.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ir::{IrError, NodeId, Program};

pub mod ast;
mod lexer;
mod lower;
mod parser;

pub use crate::analysis::item_of;
pub use lower::{always_returns, is_entry_name};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("{line}:{column}: unsupported construct: {construct}")]
    Unsupported {
        line: u32,
        column: u32,
        construct: String,
    },
    #[error(transparent)]
    Ir(#[from] IrError),
}

impl ParseError {
    pub fn line(&self) -> Option<u32> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Unsupported { line, .. } => Some(*line),
            ParseError::Ir(_) => None,
        }
    }
}

/// A source file and, once parsed, the source line of each lowered statement.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceModule {
    pub path: String,
    pub text: String,
    pub line_map: BTreeMap<NodeId, u32>,
}

impl SourceModule {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceModule {
            path: path.into(),
            text: text.into(),
            line_map: BTreeMap::new(),
        }
    }

    /// Parses the text and fills in `line_map`.
    pub fn load(
        path: impl Into<String>,
        text: impl Into<String>,
    ) -> Result<(Self, Program), ParseError> {
        let mut source = SourceModule::new(path, text);
        let program = parse(&source)?;
        source.line_map = program.line_map();
        Ok((source, program))
    }
}

/// Parses and lowers a source module into a flat [`Program`].
pub fn parse(source: &SourceModule) -> Result<Program, ParseError> {
    parse_str(&source.text)
}

pub fn parse_str(text: &str) -> Result<Program, ParseError> {
    lower::lower(&parse_ast(text)?)
}

/// Parses into the structured AST without lowering.
pub fn parse_ast(text: &str) -> Result<ast::Module, ParseError> {
    parser::parse_module(text)
}

/// Lowers an already-parsed module.
pub fn lower(module: &ast::Module) -> Result<Program, ParseError> {
    lower::lower(module)
}

/// Lowers one expression as it would appear inside a statement.
pub fn lower_expr(e: &ast::Expr) -> crate::ir::Expression {
    lower::expr(e)
}
