use serde::{Deserialize, Serialize};

/// 1-based line/column position. Columns count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl Position {
    pub const fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

/// Half-open source range: `end` is the position just past the last character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: Position,
    pub end: Position,
}

impl Span {
    pub const fn new(start: Position, end: Position) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn join(&self, other: &Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    SourceUnit,
    ContractDef,
    InterfaceDef,
    LibraryDef,
    FunctionDef,
    ConstructorDef,
    ModifierDef,
    EventDef,
    StateVarDecl,
    ParamDecl,
    Block,
    IfStmt,
    ForStmt,
    WhileStmt,
    DoWhileStmt,
    ReturnStmt,
    EmitStmt,
    ExprStmt,
    VarDeclStmt,
    RequireCall,
    FunctionCall,
    MemberAccess,
    Identifier,
    Ternary,
    Assignment,
    BinaryOp,
    UnaryOp,
    IndexAccess,
    TupleExpr,
    Literal,
    MappingType,
    ElementaryType,
    ArrayType,
    Other,
}

impl NodeKind {
    /// Contract-level containers: contracts, interfaces and libraries.
    pub fn is_contract_like(self) -> bool {
        matches!(
            self,
            NodeKind::ContractDef | NodeKind::InterfaceDef | NodeKind::LibraryDef
        )
    }

    /// Definitions that own a body and therefore a control-flow component.
    pub fn is_callable(self) -> bool {
        matches!(
            self,
            NodeKind::FunctionDef | NodeKind::ConstructorDef | NodeKind::ModifierDef
        )
    }

    /// Constructs that add one decision point.
    pub fn is_decision(self) -> bool {
        matches!(
            self,
            NodeKind::IfStmt
                | NodeKind::ForStmt
                | NodeKind::WhileStmt
                | NodeKind::DoWhileStmt
                | NodeKind::Ternary
        )
    }
}

/// A node of the syntax tree.
///
/// The meaning of `name` and of the child order depends on `kind`:
///
/// * definitions (`ContractDef`, `FunctionDef`, ...) carry their declared name;
///   a function's children are its `ParamDecl`s, an optional `Other("returns")`
///   holding the return parameters, attribute keywords as `Other(<keyword>)`,
///   modifier invocations as `Identifier`/`FunctionCall`, and finally the body
///   `Block` when present.
/// * `ParamDecl`, `StateVarDecl` and `VarDeclStmt` items carry the variable
///   name; their first child is the type.
/// * `FunctionCall` children are the callee followed by the arguments.
/// * `MemberAccess` carries the member name; its child is the object.
/// * `BinaryOp`, `UnaryOp` and `Assignment` carry the operator.
/// * `IfStmt` children: condition, then-branch, optional else-branch.
/// * `ForStmt` children: init, condition, update, body; missing header
///   parts are `Other("empty")`.
/// * `WhileStmt`: condition, body. `DoWhileStmt`: body, condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstNode {
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub span: Span,
    #[serde(default)]
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn new(kind: NodeKind, span: Span) -> Self {
        Self {
            kind,
            name: None,
            span,
            children: Vec::new(),
        }
    }

    pub fn named(kind: NodeKind, name: impl Into<String>, span: Span) -> Self {
        Self {
            kind,
            name: Some(name.into()),
            span,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<AstNode>) -> Self {
        self.children = children;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn is(&self, kind: NodeKind) -> bool {
        self.kind == kind
    }

    pub fn is_named(&self, kind: NodeKind, name: &str) -> bool {
        self.kind == kind && self.name.as_deref() == Some(name)
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Walk<'_> {
        Walk { stack: vec![self] }
    }

    /// The body block of a callable definition, if it has one.
    pub fn body(&self) -> Option<&AstNode> {
        if !self.kind.is_callable() {
            return None;
        }
        self.children.last().filter(|c| c.kind == NodeKind::Block)
    }

    pub fn params(&self) -> impl Iterator<Item = &AstNode> {
        self.children
            .iter()
            .filter(|c| c.kind == NodeKind::ParamDecl)
    }

    /// Attribute keywords (`public`, `view`, ...) attached to a definition.
    pub fn has_attribute(&self, keyword: &str) -> bool {
        self.children
            .iter()
            .any(|c| c.is_named(NodeKind::Other, keyword))
    }

    /// Modifier invocations attached to a function or constructor.
    pub fn modifier_invocations(&self) -> impl Iterator<Item = &str> {
        self.children.iter().filter_map(|c| match c.kind {
            NodeKind::Identifier => c.name(),
            NodeKind::FunctionCall => c.name(),
            _ => None,
        })
    }

    /// The declared type of a `ParamDecl`, `StateVarDecl` or declaration item.
    pub fn declared_type(&self) -> Option<&AstNode> {
        match self.kind {
            NodeKind::ParamDecl | NodeKind::StateVarDecl => self.children.first(),
            _ => None,
        }
    }

    pub fn count(&self, pred: impl Fn(&AstNode) -> bool) -> usize {
        self.walk().filter(|n| pred(n)).count()
    }

    /// JSON rendering with the fields `kind`, `name`, `span`, `children`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("AST serializes");
        s.push('\n');
        s
    }
}

pub struct Walk<'a> {
    stack: Vec<&'a AstNode>,
}

impl<'a> Iterator for Walk<'a> {
    type Item = &'a AstNode;

    fn next(&mut self) -> Option<&'a AstNode> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}
