//! Recursive-descent parser for the supported Solidity subset.
//!
//! A syntax error inside a top-level definition drops that definition,
//! records a [`ParseDiagnostic`] and resumes at the next `contract`,
//! `interface` or `library` keyword. Constructs the grammar recognizes but
//! does not model (inline assembly, `try`, structs, enums, ...) become
//! [`NodeKind::Other`] nodes.

use serde::{Deserialize, Serialize};

use crate::ast::{AstNode, NodeKind, Position, Span};
use crate::lexer::{is_elementary_type, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub message: String,
    pub span: Span,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.start.line, self.span.start.column, self.message
        )
    }
}

/// Parses a token stream into a `SourceUnit` tree.
pub fn parse(tokens: &[Token]) -> (AstNode, Vec<ParseDiagnostic>) {
    let toks: Vec<&Token> = tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Comment)
        .collect();
    let mut parser = Parser {
        toks,
        pos: 0,
        prev_end: Position::new(1, 1),
    };
    let (children, diagnostics) = parser.source_unit();
    let end = tokens
        .last()
        .map(|t| {
            let (l, c) = t.end_position();
            Position::new(l, c)
        })
        .unwrap_or(Position::new(1, 1));
    let root = AstNode::new(NodeKind::SourceUnit, Span::new(Position::new(1, 1), end))
        .with_children(children);
    (root, diagnostics)
}

type PResult<T> = Result<T, ParseDiagnostic>;

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=", ">>>=", "**=",
];

const ATTRIBUTE_KEYWORDS: &[&str] = &[
    "public",
    "private",
    "internal",
    "external",
    "view",
    "pure",
    "payable",
    "virtual",
    "constant",
    "immutable",
];

const TIME_AND_ETHER_UNITS: &[&str] = &[
    "wei", "gwei", "ether", "seconds", "minutes", "hours", "days", "weeks", "years",
];

fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 1,
        "&&" => 2,
        "==" | "!=" => 3,
        "<" | ">" | "<=" | ">=" => 4,
        "|" => 5,
        "^" => 6,
        "&" => 7,
        "<<" | ">>" | ">>>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        "**" => 11,
        _ => return None,
    })
}

struct Parser<'t> {
    toks: Vec<&'t Token>,
    pos: usize,
    prev_end: Position,
}

fn token_start(t: &Token) -> Position {
    Position::new(t.line, t.column)
}

fn token_span(t: &Token) -> Span {
    let (l, c) = t.end_position();
    Span::new(token_start(t), Position::new(l, c))
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + n).copied()
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn at_identifier(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.toks[self.pos];
        self.pos += 1;
        let (l, c) = t.end_position();
        self.prev_end = Position::new(l, c);
        t
    }

    fn start(&self) -> Position {
        self.peek().map(token_start).unwrap_or(self.prev_end)
    }

    fn span_from(&self, start: Position) -> Span {
        Span::new(start, self.prev_end.max(start))
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(match self.peek() {
            Some(t) if t.kind == TokenKind::ErrorChar => ParseDiagnostic {
                message: format!("unexpected character '{}'", t.lexeme),
                span: token_span(t),
            },
            Some(t) => ParseDiagnostic {
                message: format!("expected {expected}, found '{}'", t.lexeme),
                span: token_span(t),
            },
            None => ParseDiagnostic {
                message: format!("expected {expected}, found end of input"),
                span: Span::new(self.prev_end, self.prev_end),
            },
        })
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<&'t Token> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            self.error(&format!("'{p}'"))
        }
    }

    fn expect_identifier(&mut self) -> PResult<&'t Token> {
        if self.at_identifier() {
            Ok(self.bump())
        } else {
            self.error("identifier")
        }
    }

    // ---- top level ----

    fn source_unit(&mut self) -> (Vec<AstNode>, Vec<ParseDiagnostic>) {
        let mut children = Vec::new();
        let mut diagnostics = Vec::new();
        while let Some(tok) = self.peek() {
            let before = self.pos;
            let result = if tok.is_keyword("pragma") || tok.is_keyword("import") {
                self.skip_directive();
                continue;
            } else if self.at_contract_start() {
                self.contract().map(Some)
            } else if tok.is_keyword("function") {
                self.function().map(Some)
            } else if self.at_skippable_item() {
                self.skipped_item().map(Some)
            } else if tok.is_punct(";") {
                self.bump();
                Ok(None)
            } else if tok.kind == TokenKind::Identifier
                || (tok.kind == TokenKind::Keyword && is_elementary_type(&tok.lexeme))
            {
                // File-level constant.
                self.state_variable().map(Some)
            } else {
                self.error("a top-level definition")
            };
            match result {
                Ok(Some(node)) => children.push(node),
                Ok(None) => {}
                Err(diag) => {
                    diagnostics.push(diag);
                    self.recover_to_definition(before);
                }
            }
        }
        (children, diagnostics)
    }

    fn at_contract_start(&self) -> bool {
        match self.peek() {
            Some(t) if t.is_keyword("abstract") => {
                self.peek_at(1).is_some_and(|n| n.is_keyword("contract"))
            }
            Some(t) => {
                t.is_keyword("contract") || t.is_keyword("interface") || t.is_keyword("library")
            }
            None => false,
        }
    }

    fn recover_to_definition(&mut self, failed_at: usize) {
        if self.pos == failed_at && self.peek().is_some() {
            self.bump();
        }
        while self.peek().is_some() && !self.at_contract_start() {
            self.bump();
        }
    }

    fn skip_directive(&mut self) {
        while let Some(t) = self.peek() {
            self.bump();
            if t.is_punct(";") {
                break;
            }
        }
    }

    /// Items parsed only as opaque `Other` nodes: struct, enum, using,
    /// user-defined value types and custom errors.
    fn at_skippable_item(&self) -> bool {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword => {
                matches!(t.lexeme.as_str(), "struct" | "enum" | "using" | "type")
            }
            Some(t) if t.kind == TokenKind::Identifier && t.lexeme == "error" => self
                .peek_at(1)
                .is_some_and(|n| n.kind == TokenKind::Identifier),
            _ => false,
        }
    }

    /// Consumes an item up to a `;` at depth zero or a closing brace that
    /// returns to depth zero.
    fn skipped_item(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let word = self.bump().lexeme.clone();
        let mut depth = 0usize;
        loop {
            let Some(t) = self.peek() else {
                return self.error("end of declaration");
            };
            if t.kind == TokenKind::ErrorChar {
                return self.error("end of declaration");
            }
            self.bump();
            match t.lexeme.as_str() {
                "{" | "(" | "[" if t.kind == TokenKind::Punct => depth += 1,
                "}" | ")" | "]" if t.kind == TokenKind::Punct => {
                    if depth == 0 {
                        return Err(ParseDiagnostic {
                            message: format!("unbalanced '{}'", t.lexeme),
                            span: token_span(t),
                        });
                    }
                    depth -= 1;
                    if depth == 0 && t.lexeme == "}" && word != "using" && word != "type" {
                        break;
                    }
                }
                ";" if t.kind == TokenKind::Punct && depth == 0 => break,
                _ => {}
            }
        }
        Ok(AstNode::named(NodeKind::Other, word, self.span_from(start)))
    }

    fn contract(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let mut attrs = Vec::new();
        if self.at_keyword("abstract") {
            let t = self.bump();
            attrs.push(AstNode::named(NodeKind::Other, "abstract", token_span(t)));
        }
        let kind = match self.bump().lexeme.as_str() {
            "contract" => NodeKind::ContractDef,
            "interface" => NodeKind::InterfaceDef,
            _ => NodeKind::LibraryDef,
        };
        let name = self.expect_identifier()?.lexeme.clone();
        let mut children = attrs;
        if self.at_keyword("is") {
            let is_start = self.start();
            self.bump();
            let mut bases = vec![self.postfix_expression()?];
            while self.eat_punct(",") {
                bases.push(self.postfix_expression()?);
            }
            children.push(
                AstNode::named(NodeKind::Other, "inheritance", self.span_from(is_start))
                    .with_children(bases),
            );
        }
        self.expect_punct("{")?;
        while !self.at_punct("}") {
            if self.peek().is_none() {
                return self.error("'}'");
            }
            if let Some(member) = self.contract_member()? {
                children.push(member);
            }
        }
        self.bump();
        Ok(AstNode::named(kind, name, self.span_from(start)).with_children(children))
    }

    fn contract_member(&mut self) -> PResult<Option<AstNode>> {
        let Some(tok) = self.peek() else {
            return self.error("contract member");
        };
        if tok.kind == TokenKind::Keyword {
            match tok.lexeme.as_str() {
                "function" => return self.function().map(Some),
                "constructor" => return self.constructor().map(Some),
                "modifier" => return self.modifier().map(Some),
                "event" => return self.event().map(Some),
                "fallback" | "receive" => return self.function().map(Some),
                _ => {}
            }
        }
        if tok.is_punct(";") {
            self.bump();
            return Ok(None);
        }
        if self.at_skippable_item() {
            return self.skipped_item().map(Some);
        }
        self.state_variable().map(Some)
    }

    fn state_variable(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let ty = self.type_name()?;
        let mut children = vec![ty];
        loop {
            let Some(t) = self.peek() else {
                return self.error("state variable name");
            };
            if t.kind == TokenKind::Keyword && ATTRIBUTE_KEYWORDS.contains(&t.lexeme.as_str()) {
                self.bump();
                children.push(AstNode::named(
                    NodeKind::Other,
                    t.lexeme.clone(),
                    token_span(t),
                ));
            } else if t.is_keyword("override") {
                children.push(self.override_specifier()?);
            } else {
                break;
            }
        }
        let name = self.expect_identifier()?.lexeme.clone();
        if self.eat_punct("=") {
            children.push(self.expression()?);
        }
        self.expect_punct(";")?;
        Ok(
            AstNode::named(NodeKind::StateVarDecl, name, self.span_from(start))
                .with_children(children),
        )
    }

    fn override_specifier(&mut self) -> PResult<AstNode> {
        let start = self.start();
        self.bump();
        let mut bases = Vec::new();
        if self.eat_punct("(") {
            if !self.at_punct(")") {
                bases.push(self.postfix_expression()?);
                while self.eat_punct(",") {
                    bases.push(self.postfix_expression()?);
                }
            }
            self.expect_punct(")")?;
        }
        Ok(AstNode::named(NodeKind::Other, "override", self.span_from(start)).with_children(bases))
    }

    fn function(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let head = self.bump();
        let name = if head.is_keyword("function") {
            if self.at_keyword("fallback") || self.at_keyword("receive") {
                self.bump().lexeme.clone()
            } else {
                self.expect_identifier()?.lexeme.clone()
            }
        } else {
            head.lexeme.clone()
        };
        let mut children = self.parameter_list()?;
        self.callable_attributes(&mut children)?;
        if !self.eat_punct(";") {
            children.push(self.block()?);
        }
        Ok(
            AstNode::named(NodeKind::FunctionDef, name, self.span_from(start))
                .with_children(children),
        )
    }

    fn constructor(&mut self) -> PResult<AstNode> {
        let start = self.start();
        self.bump();
        let mut children = self.parameter_list()?;
        self.callable_attributes(&mut children)?;
        children.push(self.block()?);
        Ok(AstNode::new(NodeKind::ConstructorDef, self.span_from(start)).with_children(children))
    }

    fn modifier(&mut self) -> PResult<AstNode> {
        let start = self.start();
        self.bump();
        let name = self.expect_identifier()?.lexeme.clone();
        let mut children = if self.at_punct("(") {
            self.parameter_list()?
        } else {
            Vec::new()
        };
        self.callable_attributes(&mut children)?;
        if !self.eat_punct(";") {
            children.push(self.block()?);
        }
        Ok(
            AstNode::named(NodeKind::ModifierDef, name, self.span_from(start))
                .with_children(children),
        )
    }

    fn event(&mut self) -> PResult<AstNode> {
        let start = self.start();
        self.bump();
        let name = self.expect_identifier()?.lexeme.clone();
        let mut children = self.parameter_list()?;
        if self.at_keyword("anonymous") {
            let t = self.bump();
            children.push(AstNode::named(NodeKind::Other, "anonymous", token_span(t)));
        }
        self.expect_punct(";")?;
        Ok(AstNode::named(NodeKind::EventDef, name, self.span_from(start)).with_children(children))
    }

    /// Visibility/mutability keywords, `override`, `returns (...)` and
    /// modifier invocations, up to the body or `;`.
    fn callable_attributes(&mut self, children: &mut Vec<AstNode>) -> PResult<()> {
        loop {
            let Some(t) = self.peek() else {
                return self.error("function body");
            };
            if t.is_punct("{") || t.is_punct(";") {
                return Ok(());
            }
            if t.kind == TokenKind::Keyword && ATTRIBUTE_KEYWORDS.contains(&t.lexeme.as_str()) {
                self.bump();
                children.push(AstNode::named(
                    NodeKind::Other,
                    t.lexeme.clone(),
                    token_span(t),
                ));
            } else if t.is_keyword("override") {
                children.push(self.override_specifier()?);
            } else if t.is_keyword("returns") {
                let start = self.start();
                self.bump();
                let params = self.parameter_list()?;
                children.push(
                    AstNode::named(NodeKind::Other, "returns", self.span_from(start))
                        .with_children(params),
                );
            } else if t.kind == TokenKind::Identifier {
                children.push(self.modifier_invocation()?);
            } else {
                return self.error("function attribute or body");
            }
        }
    }

    fn modifier_invocation(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let mut callee = {
            let t = self.bump();
            AstNode::named(NodeKind::Identifier, t.lexeme.clone(), token_span(t))
        };
        while self.at_punct(".") {
            self.bump();
            let member = self.expect_identifier()?.lexeme.clone();
            callee = AstNode::named(NodeKind::MemberAccess, member, self.span_from(start))
                .with_children(vec![callee]);
        }
        if self.at_punct("(") {
            let name = callee.name.clone().unwrap_or_default();
            let mut children = vec![callee];
            children.extend(self.call_arguments()?);
            return Ok(
                AstNode::named(NodeKind::FunctionCall, name, self.span_from(start))
                    .with_children(children),
            );
        }
        if callee.kind == NodeKind::MemberAccess {
            // A qualified modifier without arguments is still an invocation.
            let name = callee.name.clone().unwrap_or_default();
            return Ok(
                AstNode::named(NodeKind::FunctionCall, name, self.span_from(start))
                    .with_children(vec![callee]),
            );
        }
        Ok(callee)
    }

    fn parameter_list(&mut self) -> PResult<Vec<AstNode>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            params.push(self.parameter()?);
            if self.eat_punct(")") {
                return Ok(params);
            }
            self.expect_punct(",")?;
        }
    }

    fn parameter(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let ty = self.type_name()?;
        while self.at_keyword("memory")
            || self.at_keyword("storage")
            || self.at_keyword("calldata")
            || self.at_keyword("indexed")
        {
            self.bump();
        }
        let mut node = AstNode::new(NodeKind::ParamDecl, Span::new(start, start));
        if self.at_identifier() {
            node.name = Some(self.bump().lexeme.clone());
        }
        node.span = self.span_from(start);
        node.children.push(ty);
        Ok(node)
    }

    // ---- types ----

    fn type_name(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let Some(t) = self.peek() else {
            return self.error("type name");
        };
        let mut ty = if t.is_keyword("mapping") {
            self.bump();
            self.expect_punct("(")?;
            let key = self.type_name()?;
            if self.at_identifier() {
                self.bump();
            }
            self.expect_punct("=>")?;
            let value = self.type_name()?;
            if self.at_identifier() {
                self.bump();
            }
            self.expect_punct(")")?;
            AstNode::new(NodeKind::MappingType, self.span_from(start))
                .with_children(vec![key, value])
        } else if t.kind == TokenKind::Keyword && is_elementary_type(&t.lexeme) {
            self.bump();
            let mut name = t.lexeme.clone();
            if name == "address" && self.at_keyword("payable") {
                self.bump();
                name.push_str(" payable");
            }
            AstNode::named(NodeKind::ElementaryType, name, self.span_from(start))
        } else if t.is_keyword("function") {
            self.bump();
            let params = self.parameter_list()?;
            let mut children = params;
            while let Some(a) = self.peek() {
                if a.kind == TokenKind::Keyword && ATTRIBUTE_KEYWORDS.contains(&a.lexeme.as_str()) {
                    self.bump();
                } else if a.is_keyword("returns") {
                    self.bump();
                    children.extend(self.parameter_list()?);
                } else {
                    break;
                }
            }
            AstNode::named(NodeKind::Other, "function-type", self.span_from(start))
                .with_children(children)
        } else if t.kind == TokenKind::Identifier {
            self.bump();
            let mut node = AstNode::named(NodeKind::Identifier, t.lexeme.clone(), token_span(t));
            while self.at_punct(".")
                && self
                    .peek_at(1)
                    .is_some_and(|n| n.kind == TokenKind::Identifier)
            {
                self.bump();
                let member = self.bump().lexeme.clone();
                node = AstNode::named(NodeKind::MemberAccess, member, self.span_from(start))
                    .with_children(vec![node]);
            }
            node
        } else {
            return self.error("type name");
        };
        while self.at_punct("[") {
            self.bump();
            let mut children = vec![ty];
            if !self.at_punct("]") {
                children.push(self.expression()?);
            }
            self.expect_punct("]")?;
            ty = AstNode::new(NodeKind::ArrayType, self.span_from(start)).with_children(children);
        }
        Ok(ty)
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<AstNode> {
        let start = self.start();
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.at_punct("}") {
            if self.peek().is_none() {
                return self.error("'}'");
            }
            stmts.push(self.statement()?);
        }
        self.bump();
        Ok(AstNode::new(NodeKind::Block, self.span_from(start)).with_children(stmts))
    }

    fn statement(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let Some(t) = self.peek() else {
            return self.error("statement");
        };
        if t.is_punct("{") {
            return self.block();
        }
        if t.kind == TokenKind::Keyword {
            match t.lexeme.as_str() {
                "if" => {
                    self.bump();
                    self.expect_punct("(")?;
                    let cond = self.expression()?;
                    self.expect_punct(")")?;
                    let then = self.statement()?;
                    let mut children = vec![cond, then];
                    if self.at_keyword("else") {
                        self.bump();
                        children.push(self.statement()?);
                    }
                    return Ok(AstNode::new(NodeKind::IfStmt, self.span_from(start))
                        .with_children(children));
                }
                "for" => return self.for_statement(),
                "while" => {
                    self.bump();
                    self.expect_punct("(")?;
                    let cond = self.expression()?;
                    self.expect_punct(")")?;
                    let body = self.statement()?;
                    return Ok(AstNode::new(NodeKind::WhileStmt, self.span_from(start))
                        .with_children(vec![cond, body]));
                }
                "do" => {
                    self.bump();
                    let body = self.statement()?;
                    if !self.at_keyword("while") {
                        return self.error("'while'");
                    }
                    self.bump();
                    self.expect_punct("(")?;
                    let cond = self.expression()?;
                    self.expect_punct(")")?;
                    self.expect_punct(";")?;
                    return Ok(AstNode::new(NodeKind::DoWhileStmt, self.span_from(start))
                        .with_children(vec![body, cond]));
                }
                "return" => {
                    self.bump();
                    let mut children = Vec::new();
                    if !self.at_punct(";") {
                        children.push(self.expression()?);
                    }
                    self.expect_punct(";")?;
                    return Ok(AstNode::new(NodeKind::ReturnStmt, self.span_from(start))
                        .with_children(children));
                }
                "emit" => {
                    self.bump();
                    let call = self.expression()?;
                    self.expect_punct(";")?;
                    let name = match call.kind {
                        NodeKind::FunctionCall => call.name.clone(),
                        _ => None,
                    };
                    let mut node = AstNode::new(NodeKind::EmitStmt, self.span_from(start))
                        .with_children(vec![call]);
                    node.name = name;
                    return Ok(node);
                }
                "break" | "continue" => {
                    self.bump();
                    self.expect_punct(";")?;
                    return Ok(AstNode::named(
                        NodeKind::Other,
                        t.lexeme.clone(),
                        self.span_from(start),
                    ));
                }
                "unchecked" => {
                    self.bump();
                    let mut block = self.block()?;
                    block.name = Some("unchecked".into());
                    block.span = self.span_from(start);
                    return Ok(block);
                }
                "assembly" => {
                    self.bump();
                    while !self.at_punct("{") {
                        if self.peek().is_none() {
                            return self.error("'{'");
                        }
                        self.bump();
                    }
                    self.skip_balanced_braces()?;
                    return Ok(AstNode::named(
                        NodeKind::Other,
                        "assembly",
                        self.span_from(start),
                    ));
                }
                "try" => {
                    self.bump();
                    while !self.at_punct("{") {
                        if self.peek().is_none() {
                            return self.error("'{'");
                        }
                        self.bump();
                    }
                    self.skip_balanced_braces()?;
                    while self.at_keyword("catch") {
                        while !self.at_punct("{") {
                            if self.peek().is_none() {
                                return self.error("'{'");
                            }
                            self.bump();
                        }
                        self.skip_balanced_braces()?;
                    }
                    return Ok(AstNode::named(
                        NodeKind::Other,
                        "try",
                        self.span_from(start),
                    ));
                }
                _ => {}
            }
        }
        if let Some(decl) = self.try_variable_declaration()? {
            return Ok(decl);
        }
        self.expression_statement()
    }

    fn skip_balanced_braces(&mut self) -> PResult<()> {
        self.expect_punct("{")?;
        let mut depth = 1usize;
        while depth > 0 {
            let Some(t) = self.peek() else {
                return self.error("'}'");
            };
            self.bump();
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
            }
        }
        Ok(())
    }

    fn for_statement(&mut self) -> PResult<AstNode> {
        let start = self.start();
        self.bump();
        self.expect_punct("(")?;
        let empty =
            |p: &Self| AstNode::named(NodeKind::Other, "empty", Span::new(p.start(), p.start()));
        let init = if self.at_punct(";") {
            let node = empty(self);
            self.bump();
            node
        } else if let Some(decl) = self.try_variable_declaration()? {
            decl
        } else {
            self.expression_statement()?
        };
        let cond = if self.at_punct(";") {
            empty(self)
        } else {
            self.expression()?
        };
        self.expect_punct(";")?;
        let update = if self.at_punct(")") {
            empty(self)
        } else {
            self.expression()?
        };
        self.expect_punct(")")?;
        let body = self.statement()?;
        Ok(AstNode::new(NodeKind::ForStmt, self.span_from(start))
            .with_children(vec![init, cond, update, body]))
    }

    /// Attempts `Type [location] name [= expr];` or a tuple declaration
    /// `(Type a, , Type b) = expr;`. Restores the position on mismatch.
    fn try_variable_declaration(&mut self) -> PResult<Option<AstNode>> {
        let saved = (self.pos, self.prev_end);
        let start = self.start();
        let attempt = if self.at_punct("(") {
            self.tuple_declaration(start)
        } else {
            self.single_declaration(start)
        };
        match attempt {
            Some(node) => Ok(Some(node)),
            None => {
                self.pos = saved.0;
                self.prev_end = saved.1;
                Ok(None)
            }
        }
    }

    fn single_declaration(&mut self, start: Position) -> Option<AstNode> {
        let t = self.peek()?;
        let plausible = t.kind == TokenKind::Identifier
            || t.is_keyword("mapping")
            || (t.kind == TokenKind::Keyword && is_elementary_type(&t.lexeme));
        if !plausible {
            return None;
        }
        let item = self.parameter().ok()?;
        item.name.as_ref()?;
        let name = item.name.clone();
        let mut children = vec![item];
        if self.eat_punct("=") {
            children.push(self.expression().ok()?);
        }
        if !self.eat_punct(";") {
            return None;
        }
        let mut node =
            AstNode::new(NodeKind::VarDeclStmt, self.span_from(start)).with_children(children);
        node.name = name;
        Some(node)
    }

    fn tuple_declaration(&mut self, start: Position) -> Option<AstNode> {
        self.bump();
        let mut items = Vec::new();
        let mut declared_any = false;
        loop {
            if self.at_punct(",") || self.at_punct(")") {
                let here = self.start();
                items.push(AstNode::named(
                    NodeKind::Other,
                    "empty",
                    Span::new(here, here),
                ));
            } else {
                let item = self.parameter().ok()?;
                item.name.as_ref()?;
                declared_any = true;
                items.push(item);
            }
            if self.eat_punct(")") {
                break;
            }
            if !self.eat_punct(",") {
                return None;
            }
        }
        if !declared_any || !self.eat_punct("=") {
            return None;
        }
        items.push(self.expression().ok()?);
        if !self.eat_punct(";") {
            return None;
        }
        Some(AstNode::new(NodeKind::VarDeclStmt, self.span_from(start)).with_children(items))
    }

    fn expression_statement(&mut self) -> PResult<AstNode> {
        let start = self.start();
        // `revert CustomError(args);`
        if self
            .peek()
            .is_some_and(|t| t.kind == TokenKind::Identifier && t.lexeme == "revert")
            && self
                .peek_at(1)
                .is_some_and(|t| t.kind == TokenKind::Identifier)
        {
            self.bump();
            let call = self.expression()?;
            self.expect_punct(";")?;
            return Ok(
                AstNode::named(NodeKind::RequireCall, "revert", self.span_from(start))
                    .with_children(vec![call]),
            );
        }
        let expr = self.expression()?;
        self.expect_punct(";")?;
        let span = self.span_from(start);
        if expr.kind == NodeKind::FunctionCall {
            if let Some(callee) = expr.children.first() {
                if callee.kind == NodeKind::Identifier
                    && matches!(callee.name(), Some("require" | "assert" | "revert"))
                {
                    let name = callee.name.clone().unwrap_or_default();
                    let args = expr.children.into_iter().skip(1).collect();
                    return Ok(
                        AstNode::named(NodeKind::RequireCall, name, span).with_children(args)
                    );
                }
            }
        }
        Ok(AstNode::new(NodeKind::ExprStmt, span).with_children(vec![expr]))
    }

    // ---- expressions ----

    fn expression(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let lhs = self.ternary()?;
        if let Some(op) = self
            .peek()
            .filter(|t| t.kind == TokenKind::Punct && ASSIGN_OPS.contains(&t.lexeme.as_str()))
        {
            self.bump();
            let rhs = self.expression()?;
            return Ok(AstNode::named(
                NodeKind::Assignment,
                op.lexeme.clone(),
                self.span_from(start),
            )
            .with_children(vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let cond = self.binary(1)?;
        if self.eat_punct("?") {
            let a = self.ternary()?;
            self.expect_punct(":")?;
            let b = self.ternary()?;
            return Ok(AstNode::new(NodeKind::Ternary, self.span_from(start))
                .with_children(vec![cond, a, b]));
        }
        Ok(cond)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<AstNode> {
        let start = self.start();
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek().filter(|t| t.kind == TokenKind::Punct) {
            let Some(prec) = binary_precedence(&op.lexeme) else {
                break;
            };
            if prec < min_prec {
                break;
            }
            self.bump();
            // `**` is right-associative.
            let next_min = if op.lexeme == "**" { prec } else { prec + 1 };
            let rhs = self.binary(next_min)?;
            lhs = AstNode::named(NodeKind::BinaryOp, op.lexeme.clone(), self.span_from(start))
                .with_children(vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let Some(t) = self.peek() else {
            return self.error("expression");
        };
        let prefix = (t.kind == TokenKind::Punct
            && matches!(t.lexeme.as_str(), "!" | "-" | "~" | "++" | "--" | "+"))
            || t.is_keyword("delete");
        if prefix {
            self.bump();
            let operand = self.unary()?;
            return Ok(
                AstNode::named(NodeKind::UnaryOp, t.lexeme.clone(), self.span_from(start))
                    .with_children(vec![operand]),
            );
        }
        if t.is_keyword("new") {
            self.bump();
            let ty = self.type_name()?;
            let node = AstNode::named(NodeKind::UnaryOp, "new", self.span_from(start))
                .with_children(vec![ty]);
            return self.postfix_tail(node, start);
        }
        self.postfix_expression()
    }

    fn postfix_expression(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let primary = self.primary()?;
        self.postfix_tail(primary, start)
    }

    fn postfix_tail(&mut self, mut node: AstNode, start: Position) -> PResult<AstNode> {
        while let Some(t) = self.peek() {
            if t.is_punct(".") {
                self.bump();
                let member = match self.peek() {
                    Some(m) if m.kind == TokenKind::Identifier || m.kind == TokenKind::Keyword => {
                        self.bump().lexeme.clone()
                    }
                    _ => return self.error("member name"),
                };
                node = AstNode::named(NodeKind::MemberAccess, member, self.span_from(start))
                    .with_children(vec![node]);
            } else if t.is_punct("(") {
                let name = callee_name(&node);
                let mut children = vec![node];
                children.extend(self.call_arguments()?);
                let mut call = AstNode::new(NodeKind::FunctionCall, self.span_from(start))
                    .with_children(children);
                call.name = name;
                node = call;
            } else if t.is_punct("{") && self.at_call_options() {
                self.bump();
                let mut children = vec![node];
                loop {
                    self.expect_identifier()?;
                    self.expect_punct(":")?;
                    children.push(self.expression()?);
                    if self.eat_punct("}") {
                        break;
                    }
                    self.expect_punct(",")?;
                }
                node = AstNode::named(NodeKind::Other, "call-options", self.span_from(start))
                    .with_children(children);
            } else if t.is_punct("[") {
                self.bump();
                let mut children = vec![node];
                if !self.at_punct("]") && !self.at_punct(":") {
                    children.push(self.expression()?);
                }
                if self.eat_punct(":") && !self.at_punct("]") {
                    children.push(self.expression()?);
                }
                self.expect_punct("]")?;
                node = AstNode::new(NodeKind::IndexAccess, self.span_from(start))
                    .with_children(children);
            } else if t.is_punct("++") || t.is_punct("--") {
                self.bump();
                node = AstNode::named(
                    NodeKind::UnaryOp,
                    format!("{}post", t.lexeme),
                    self.span_from(start),
                )
                .with_children(vec![node]);
            } else {
                break;
            }
        }
        Ok(node)
    }

    fn at_call_options(&self) -> bool {
        self.peek_at(1)
            .is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_at(2).is_some_and(|t| t.is_punct(":"))
    }

    fn call_arguments(&mut self) -> PResult<Vec<AstNode>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        if self.at_punct("{") {
            let start = self.start();
            self.bump();
            let mut named = Vec::new();
            if !self.at_punct("}") {
                loop {
                    self.expect_identifier()?;
                    self.expect_punct(":")?;
                    named.push(self.expression()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            }
            self.expect_punct("}")?;
            args.push(
                AstNode::named(NodeKind::Other, "named-args", self.span_from(start))
                    .with_children(named),
            );
            self.expect_punct(")")?;
            return Ok(args);
        }
        loop {
            args.push(self.expression()?);
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }

    fn primary(&mut self) -> PResult<AstNode> {
        let start = self.start();
        let Some(t) = self.peek() else {
            return self.error("expression");
        };
        match t.kind {
            TokenKind::Identifier => {
                self.bump();
                if matches!(t.lexeme.as_str(), "hex" | "unicode")
                    && self.peek().is_some_and(|n| n.kind == TokenKind::StringLit)
                {
                    self.bump();
                    return Ok(AstNode::named(
                        NodeKind::Literal,
                        t.lexeme.clone(),
                        self.span_from(start),
                    ));
                }
                Ok(AstNode::named(
                    NodeKind::Identifier,
                    t.lexeme.clone(),
                    token_span(t),
                ))
            }
            TokenKind::NumberLit => {
                self.bump();
                let mut lexeme = t.lexeme.clone();
                if let Some(unit) = self.peek().filter(|u| {
                    u.kind == TokenKind::Identifier
                        && TIME_AND_ETHER_UNITS.contains(&u.lexeme.as_str())
                }) {
                    self.bump();
                    lexeme = format!("{lexeme} {}", unit.lexeme);
                }
                Ok(AstNode::named(
                    NodeKind::Literal,
                    lexeme,
                    self.span_from(start),
                ))
            }
            TokenKind::StringLit => {
                self.bump();
                let mut lexeme = t.lexeme.clone();
                while let Some(next) = self.peek().filter(|n| n.kind == TokenKind::StringLit) {
                    self.bump();
                    lexeme.push(' ');
                    lexeme.push_str(&next.lexeme);
                }
                Ok(AstNode::named(
                    NodeKind::Literal,
                    lexeme,
                    self.span_from(start),
                ))
            }
            TokenKind::Keyword => {
                if t.is_keyword("true") || t.is_keyword("false") {
                    self.bump();
                    return Ok(AstNode::named(
                        NodeKind::Literal,
                        t.lexeme.clone(),
                        token_span(t),
                    ));
                }
                if is_elementary_type(&t.lexeme) || t.is_keyword("payable") {
                    let ty = self.type_name_or_payable()?;
                    return Ok(ty);
                }
                if t.is_keyword("type") {
                    self.bump();
                    return Ok(AstNode::named(NodeKind::Identifier, "type", token_span(t)));
                }
                self.error("expression")
            }
            TokenKind::Punct if t.lexeme == "(" => {
                self.bump();
                let mut items = Vec::new();
                let mut saw_comma = false;
                loop {
                    if self.at_punct(",") || self.at_punct(")") {
                        let here = self.start();
                        items.push(AstNode::named(
                            NodeKind::Other,
                            "empty",
                            Span::new(here, here),
                        ));
                    } else {
                        items.push(self.expression()?);
                    }
                    if self.eat_punct(")") {
                        break;
                    }
                    self.expect_punct(",")?;
                    saw_comma = true;
                }
                if !saw_comma {
                    let inner = items.pop().expect("one item");
                    if inner.is_named(NodeKind::Other, "empty") {
                        return Ok(AstNode::new(NodeKind::TupleExpr, self.span_from(start)));
                    }
                    return Ok(AstNode::new(NodeKind::TupleExpr, self.span_from(start))
                        .with_children(vec![inner]));
                }
                Ok(AstNode::new(NodeKind::TupleExpr, self.span_from(start)).with_children(items))
            }
            TokenKind::Punct if t.lexeme == "[" => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat_punct("]") {
                    loop {
                        items.push(self.expression()?);
                        if self.eat_punct("]") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
                Ok(
                    AstNode::named(NodeKind::Other, "array-literal", self.span_from(start))
                        .with_children(items),
                )
            }
            _ => self.error("expression"),
        }
    }

    fn type_name_or_payable(&mut self) -> PResult<AstNode> {
        if self.at_keyword("payable") {
            let t = self.bump();
            return Ok(AstNode::named(
                NodeKind::ElementaryType,
                "payable",
                token_span(t),
            ));
        }
        let start = self.start();
        let t = self.bump();
        let mut name = t.lexeme.clone();
        if name == "address" && self.at_keyword("payable") {
            self.bump();
            name.push_str(" payable");
        }
        let mut ty = AstNode::named(NodeKind::ElementaryType, name, self.span_from(start));
        // `uint256[](n)` style array types in expressions.
        while self.at_punct("[") && self.peek_at(1).is_some_and(|n| n.is_punct("]")) {
            self.bump();
            self.bump();
            ty = AstNode::new(NodeKind::ArrayType, self.span_from(start)).with_children(vec![ty]);
        }
        Ok(ty)
    }
}

/// The simple name a call is made through: the identifier, the accessed
/// member, or the converted-to type.
fn callee_name(callee: &AstNode) -> Option<String> {
    match callee.kind {
        NodeKind::Identifier | NodeKind::MemberAccess | NodeKind::ElementaryType => {
            callee.name.clone()
        }
        NodeKind::Other if callee.name() == Some("call-options") => {
            callee.children.first().and_then(callee_name)
        }
        _ => None,
    }
}
