//! MiniPy: a small, deterministic, Python-like language.
//!
//! Integers are 64-bit with checked arithmetic, `//` and `%` floor like
//! Python, strings exist only as literals for `print`, and the only
//! library is the fixed `api.*` table in [`interp::API_FUNCTIONS`].

pub mod ast;
pub mod interp;
pub mod parser;
pub mod render;
pub mod token;

pub use ast::{BinOp, Callee, Expr, FunctionDef, Param, Prec, Program, RangeArgs, Stmt, UnaryOp};
pub use interp::{interpret, ExecResult, Outcome, RuntimeErrorKind, Value, DEFAULT_STEP_LIMIT};
pub use parser::{parse, ParseError};
pub use render::{render, render_expr};
pub use token::{tokenize, LexError, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("lex error: {0}")]
    Lex(#[from] LexError),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
}

/// `parse(tokenize(source))`.
pub fn parse_source(source: &str) -> Result<Program, SyntaxError> {
    Ok(parse(&tokenize(source)?)?)
}

/// Tokens of the canonical rendering of `program`.
pub fn program_tokens(program: &Program) -> alloc::vec::Vec<Token> {
    tokenize(&render(program)).expect("rendered programs always lex")
}
