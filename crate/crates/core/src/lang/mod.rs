//! Concrete syntax: the lexer and parser for binding programs, plus the
//! template, binding and context file formats.

use std::fmt;

use thiserror::Error;

pub mod ast;
mod files;
pub mod lexer;
pub(crate) mod parser;

pub use ast::{CmpOp, ComAst, ExpAst};
pub use files::{parse_binding, parse_context, parse_template, Binding};
pub(crate) use files::key_value_lines;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_program;

/// 1-based source position. `0:0` marks synthesized nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

impl LexError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        LexError { pos, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("lex error at {0}")]
    Lex(#[from] LexError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{pos}: skeleton hole `{name}` has no slot declaration")]
    UndeclaredHole { name: String, pos: Pos },
    #[error("{pos}: duplicate key `{key}`")]
    DuplicateKey { key: String, pos: Pos },
}

impl LangError {
    pub fn pos(&self) -> Pos {
        match self {
            LangError::Lex(e) => e.pos,
            LangError::Parse(e) => e.pos,
            LangError::UndeclaredHole { pos, .. } | LangError::DuplicateKey { pos, .. } => *pos,
        }
    }

    pub(crate) fn custom(pos: Pos, message: impl Into<String>) -> Self {
        LangError::Parse(ParseError {
            pos,
            expected: vec![message.into()],
            found: "invalid input".to_string(),
        })
    }
}

/// Tokenizes and parses a bare binding program.
pub fn parse_program_source(source: &str) -> Result<ComAst, LangError> {
    Ok(parse_program(&tokenize(source)?)?)
}

impl std::str::FromStr for crate::value::ContentType {
    type Err = LangError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokenize(s)?;
        let mut cur = parser::Cursor::new(&toks);
        let ty = parser::parse_type(&mut cur)?;
        cur.expect_end()?;
        Ok(ty)
    }
}
