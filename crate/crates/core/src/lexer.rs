//! Lexer for the supported Solidity subset.
//!
//! Lexing never fails: characters outside the grammar become
//! [`TokenKind::ErrorChar`] tokens and the scan continues. Whitespace is the
//! only input not covered by a token.

use serde::Serialize;

use crate::source::SourceFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Punct,
    NumberLit,
    StringLit,
    Comment,
    ErrorChar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based line.
    pub line: u32,
    /// 1-based column, counted in characters.
    pub column: u32,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    pub fn is_punct(&self, lexeme: &str) -> bool {
        self.is(TokenKind::Punct, lexeme)
    }

    pub fn is_keyword(&self, lexeme: &str) -> bool {
        self.is(TokenKind::Keyword, lexeme)
    }

    /// Position just past the last character of the lexeme.
    pub fn end_position(&self) -> (u32, u32) {
        let mut line = self.line;
        let mut column = self.column;
        for c in self.lexeme.chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "address",
    "anonymous",
    "as",
    "assembly",
    "bool",
    "break",
    "byte",
    "bytes",
    "calldata",
    "catch",
    "constant",
    "constructor",
    "continue",
    "contract",
    "delete",
    "do",
    "else",
    "emit",
    "enum",
    "event",
    "external",
    "fallback",
    "false",
    "fixed",
    "for",
    "function",
    "if",
    "immutable",
    "import",
    "indexed",
    "interface",
    "internal",
    "is",
    "library",
    "mapping",
    "memory",
    "modifier",
    "new",
    "override",
    "payable",
    "pragma",
    "private",
    "public",
    "pure",
    "receive",
    "return",
    "returns",
    "storage",
    "string",
    "struct",
    "true",
    "try",
    "type",
    "ufixed",
    "unchecked",
    "using",
    "view",
    "virtual",
    "while",
];

/// Operators, longest first so that greedy matching picks the longest.
const PUNCTUATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "**=", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<", ">>", "**", "->", ":=", "{", "}", "(", ")",
    "[", "]", ";", ",", ".", "?", ":", "=", "+", "-", "*", "/", "%", "!", "<", ">", "&", "|", "^",
    "~",
];

/// Returns true for reserved words and sized elementary type names
/// (`uint256`, `bytes32`, `int8`, ...).
pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok() || is_sized_elementary(word)
}

/// Elementary type names: `address`, `bool`, `string`, `bytes`, `byte`,
/// `uintN`, `intN`, `bytesN`, `fixed`, `ufixed`.
pub fn is_elementary_type(word: &str) -> bool {
    matches!(
        word,
        "address" | "bool" | "string" | "bytes" | "byte" | "fixed" | "ufixed"
    ) || is_sized_elementary(word)
}

fn is_sized_elementary(word: &str) -> bool {
    fn digits_in(s: &str, lo: u32, hi: u32, step: u32) -> bool {
        if s.is_empty() {
            return true;
        }
        if s.starts_with('0') || !s.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
        match s.parse::<u32>() {
            Ok(n) => n >= lo && n <= hi && n % step == 0,
            Err(_) => false,
        }
    }
    if let Some(rest) = word.strip_prefix("uint") {
        digits_in(rest, 8, 256, 8)
    } else if let Some(rest) = word.strip_prefix("int") {
        digits_in(rest, 8, 256, 8)
    } else if let Some(rest) = word.strip_prefix("bytes") {
        !rest.is_empty() && digits_in(rest, 1, 32, 1)
    } else {
        false
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.text[self.offset..].chars().nth(n)
    }

    fn rest(&self) -> &'a str {
        &self.text[self.offset..]
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
    }
}

/// Splits a source file into tokens.
pub fn tokenize(source: &SourceFile) -> Vec<Token> {
    tokenize_str(&source.text)
}

pub fn tokenize_str(text: &str) -> Vec<Token> {
    let mut cur = Cursor {
        text,
        offset: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let (start, line, column) = (cur.offset, cur.line, cur.column);
        let kind = lex_one(&mut cur, c);
        tokens.push(Token {
            kind,
            lexeme: text[start..cur.offset].to_string(),
            line,
            column,
            offset: start,
        });
    }
    tokens
}

fn lex_one(cur: &mut Cursor<'_>, c: char) -> TokenKind {
    if c == '/' && cur.peek_nth(1) == Some('/') {
        cur.bump_while(|c| c != '\n');
        return TokenKind::Comment;
    }
    if c == '/' && cur.peek_nth(1) == Some('*') {
        cur.bump();
        cur.bump();
        // An unterminated block comment runs to end of input.
        while cur.peek().is_some() {
            if cur.rest().starts_with("*/") {
                cur.bump();
                cur.bump();
                break;
            }
            cur.bump();
        }
        return TokenKind::Comment;
    }
    if is_ident_start(c) {
        let start = cur.offset;
        cur.bump_while(is_ident_continue);
        let word = &cur.text[start..cur.offset];
        return if is_keyword(word) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
    }
    if c.is_ascii_digit() || (c == '.' && cur.peek_nth(1).is_some_and(|d| d.is_ascii_digit())) {
        lex_number(cur);
        return TokenKind::NumberLit;
    }
    if c == '"' || c == '\'' {
        return lex_string(cur, c);
    }
    for p in PUNCTUATORS {
        if cur.rest().starts_with(p) {
            for _ in 0..p.len() {
                cur.bump();
            }
            return TokenKind::Punct;
        }
    }
    cur.bump();
    TokenKind::ErrorChar
}

fn lex_number(cur: &mut Cursor<'_>) {
    if cur.rest().starts_with("0x") || cur.rest().starts_with("0X") {
        cur.bump();
        cur.bump();
        cur.bump_while(|c| c.is_ascii_hexdigit() || c == '_');
        return;
    }
    cur.bump_while(|c| c.is_ascii_digit() || c == '_');
    if cur.peek() == Some('.') && cur.peek_nth(1).is_some_and(|d| d.is_ascii_digit()) {
        cur.bump();
        cur.bump_while(|c| c.is_ascii_digit() || c == '_');
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let signed = matches!(cur.peek_nth(1), Some('-'));
        let digit_at = if signed { 2 } else { 1 };
        if cur.peek_nth(digit_at).is_some_and(|d| d.is_ascii_digit()) {
            for _ in 0..digit_at {
                cur.bump();
            }
            cur.bump_while(|c| c.is_ascii_digit() || c == '_');
        }
    }
}

fn lex_string(cur: &mut Cursor<'_>, quote: char) -> TokenKind {
    // Probe for the closing quote on the same line before consuming anything.
    let mut escaped = false;
    let mut len = None;
    for (i, c) in cur.rest().char_indices().skip(1) {
        if c == '\n' {
            break;
        }
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == quote {
            len = Some(i + c.len_utf8());
            break;
        }
    }
    match len {
        Some(len) => {
            let end = cur.offset + len;
            while cur.offset < end {
                cur.bump();
            }
            TokenKind::StringLit
        }
        None => {
            cur.bump();
            TokenKind::ErrorChar
        }
    }
}
