//! Tokenizer and parser for the mini Horn-clause source language.

pub mod ast;
pub mod lexer;
pub mod parser;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_program;
