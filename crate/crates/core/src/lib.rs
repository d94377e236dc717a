//! Static analysis of Solidity corpora for external-data dependencies.
//!
//! The pipeline lexes and parses each source file ([`lexer`], [`parser`]),
//! collects declared names ([`names`]), matches them against a categorized
//! keyword list and classifies interaction strategies ([`detector`]),
//! scores cyclomatic complexity from control-flow graphs ([`cfg`]), and
//! aggregates corpus statistics ([`analytics`]). [`scan`] ties the stages
//! together over a directory or manifest and emits reports.

pub mod analytics;
pub mod ast;
pub mod cfg;
pub mod detector;
pub mod error;
pub mod lexer;
pub mod names;
pub mod parser;
pub mod scan;
pub mod source;

pub use ast::{AstNode, NodeKind, Position, Span};
pub use error::{Error, Result};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, ParseDiagnostic};
pub use source::{ContentHash, SourceFile};

/// Tokenizes and parses a source file.
pub fn parse_source(source: &SourceFile) -> (AstNode, Vec<ParseDiagnostic>) {
    parse(&tokenize(source))
}
