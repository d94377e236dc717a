//! Control-flow graphs and cyclomatic complexity.
//!
//! Every function, constructor and modifier body becomes one connected
//! component: `Entry -> ... -> Exit`. Decision constructs add a `Branch`
//! node with two successors (and a `Merge` node where paths rejoin), loops
//! add a back edge. Complexity is `E - N + 2P`, which equals one plus the
//! number of decision points for each component.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use crate::ast::{AstNode, NodeKind, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CfgNodeKind {
    Entry,
    Exit,
    Statement,
    Branch,
    Merge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfgNode {
    pub id: usize,
    pub kind: CfgNodeKind,
    pub ast_ref: Option<Span>,
}

/// The definition a component was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Enclosing contract, interface or library; `None` for free functions.
    pub owner: Option<String>,
    /// Function or modifier name; `"constructor"` for constructors.
    pub name: String,
    pub kind: NodeKind,
    pub span: Span,
    pub entry: usize,
    pub exit: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CfgOptions {
    /// Treat `require`/`assert`/`revert` as decision points.
    pub require_branches: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ControlFlowGraph {
    nodes: Vec<CfgNode>,
    edges: BTreeSet<(usize, usize)>,
    component_of: Vec<usize>,
    components: Vec<Component>,
}

impl ControlFlowGraph {
    pub fn nodes(&self) -> &[CfgNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.component_of[node]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Connected components of the underlying undirected graph, computed
    /// from the edges alone.
    pub fn connected_components(&self) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        let mut g = UnGraph::<(), ()>::with_capacity(self.nodes.len(), self.edges.len());
        let ids: Vec<_> = self.nodes.iter().map(|_| g.add_node(())).collect();
        for &(a, b) in &self.edges {
            g.add_edge(ids[a], ids[b], ());
        }
        petgraph::algo::connected_components(&g)
    }

    /// `E - N + 2` restricted to one component.
    pub fn component_complexity(&self, component: usize) -> i64 {
        let n = self
            .component_of
            .iter()
            .filter(|&&c| c == component)
            .count() as i64;
        let e = self
            .edges
            .iter()
            .filter(|(a, _)| self.component_of[*a] == component)
            .count() as i64;
        e - n + 2
    }

    /// Nodes reachable from `from` along directed edges.
    pub fn reachable_from(&self, from: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([from]);
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            for &(_, b) in self.edges.range((n, 0)..(n + 1, 0)) {
                if seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen
    }

    /// DOT rendering of one component. Node labels are kinds; ids are the
    /// graph-wide node ids.
    pub fn to_dot(&self, component: usize) -> String {
        let c = &self.components[component];
        let title = match &c.owner {
            Some(owner) => format!("{owner}.{}", c.name),
            None => c.name.clone(),
        };
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{title}\" {{");
        for node in self
            .nodes
            .iter()
            .filter(|n| self.component_of[n.id] == component)
        {
            let _ = writeln!(out, "    n{} [label=\"{:?}\"];", node.id, node.kind);
        }
        for (a, b) in self
            .edges
            .iter()
            .filter(|(a, _)| self.component_of[*a] == component)
        {
            let _ = writeln!(out, "    n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the control-flow graph of every body in a source unit.
pub fn build_cfg(ast: &AstNode, opts: CfgOptions) -> ControlFlowGraph {
    let mut graph = ControlFlowGraph::default();
    for (owner, def) in callables(ast) {
        let Some(body) = def.body() else { continue };
        let component = graph.components.len();
        let mut b = Builder {
            g: &mut graph,
            component,
            opts,
        };
        let entry = b.add(CfgNodeKind::Entry, Some(def.span));
        let end = b.statement(body, entry);
        let exit = b.add(CfgNodeKind::Exit, None);
        b.edge(end, exit);
        graph.components.push(Component {
            owner: owner.map(str::to_string),
            name: def.name().unwrap_or("constructor").to_string(),
            kind: def.kind,
            span: def.span,
            entry,
            exit,
        });
    }
    graph
}

/// `E - N + 2P`; zero for an empty graph.
pub fn cyclomatic(cfg: &ControlFlowGraph) -> i64 {
    if cfg.nodes.is_empty() {
        return 0;
    }
    cfg.edge_count() as i64 - cfg.node_count() as i64 + 2 * cfg.connected_components() as i64
}

/// Number of bodies plus the number of decision constructs inside them.
/// Computed from the tree alone, independently of graph construction.
pub fn decision_point_count(ast: &AstNode, opts: CfgOptions) -> i64 {
    callables(ast)
        .into_iter()
        .filter_map(|(_, def)| def.body())
        .map(|body| {
            1 + body.count(|n| {
                n.kind.is_decision() || (opts.require_branches && n.kind == NodeKind::RequireCall)
            }) as i64
        })
        .sum()
}

/// Callable definitions in source order, with their enclosing container name.
pub fn callables(ast: &AstNode) -> Vec<(Option<&str>, &AstNode)> {
    let mut out = Vec::new();
    for top in &ast.children {
        if top.kind.is_callable() {
            out.push((None, top));
        } else if top.kind.is_contract_like() {
            for member in top.children.iter().filter(|m| m.kind.is_callable()) {
                out.push((top.name(), member));
            }
        }
    }
    out
}

struct Builder<'g> {
    g: &'g mut ControlFlowGraph,
    component: usize,
    opts: CfgOptions,
}

impl Builder<'_> {
    fn add(&mut self, kind: CfgNodeKind, ast_ref: Option<Span>) -> usize {
        let id = self.g.nodes.len();
        self.g.nodes.push(CfgNode { id, kind, ast_ref });
        self.g.component_of.push(self.component);
        id
    }

    fn edge(&mut self, from: usize, to: usize) {
        self.g.edges.insert((from, to));
    }

    fn mark(&self) -> usize {
        self.g.nodes.len()
    }

    /// First node created since `mark`, or `fallback` when none was.
    fn first_since(&self, mark: usize, fallback: usize) -> usize {
        if self.g.nodes.len() > mark {
            mark
        } else {
            fallback
        }
    }

    /// A branch arm: always contributes at least one node so that the arm
    /// edge never coincides with the branch's other successor.
    fn arm(&mut self, stmt: &AstNode, from: usize) -> usize {
        let mark = self.mark();
        let end = self.statement(stmt, from);
        if self.g.nodes.len() > mark {
            end
        } else {
            let placeholder = self.add(CfgNodeKind::Statement, Some(stmt.span));
            self.edge(from, placeholder);
            placeholder
        }
    }

    fn statement(&mut self, node: &AstNode, cur: usize) -> usize {
        match node.kind {
            NodeKind::Block => node
                .children
                .iter()
                .fold(cur, |cur, s| self.statement(s, cur)),
            NodeKind::IfStmt => {
                let cond = self.expression(&node.children[0], cur);
                let branch = self.add(CfgNodeKind::Branch, Some(node.children[0].span));
                self.edge(cond, branch);
                let then_end = self.arm(&node.children[1], branch);
                let merge = self.add(CfgNodeKind::Merge, Some(node.span));
                self.edge(then_end, merge);
                match node.children.get(2) {
                    Some(else_branch) => {
                        let else_end = self.arm(else_branch, branch);
                        self.edge(else_end, merge);
                    }
                    None => self.edge(branch, merge),
                }
                merge
            }
            NodeKind::WhileStmt => {
                let mark = self.mark();
                let cond = self.expression(&node.children[0], cur);
                let branch = self.add(CfgNodeKind::Branch, Some(node.children[0].span));
                self.edge(cond, branch);
                let head = self.first_since(mark, branch);
                let body_end = self.arm(&node.children[1], branch);
                self.edge(body_end, head);
                branch
            }
            NodeKind::ForStmt => {
                let init = &node.children[0];
                let cur = if init.is_named(NodeKind::Other, "empty") {
                    cur
                } else {
                    self.statement(init, cur)
                };
                let mark = self.mark();
                let cond = self.expression(&node.children[1], cur);
                let branch = self.add(CfgNodeKind::Branch, Some(node.children[1].span));
                self.edge(cond, branch);
                let head = self.first_since(mark, branch);
                let body_end = self.arm(&node.children[3], branch);
                let update_end = self.expression(&node.children[2], body_end);
                self.edge(update_end, head);
                branch
            }
            NodeKind::DoWhileStmt => {
                let mark = self.mark();
                let body_end = self.arm(&node.children[0], cur);
                let body_start = mark;
                let cond = self.expression(&node.children[1], body_end);
                let branch = self.add(CfgNodeKind::Branch, Some(node.children[1].span));
                self.edge(cond, branch);
                self.edge(branch, body_start);
                branch
            }
            NodeKind::RequireCall if self.opts.require_branches => {
                let args = node.children.iter().fold(cur, |c, a| self.expression(a, c));
                let branch = self.add(CfgNodeKind::Branch, Some(node.span));
                self.edge(args, branch);
                let pass = self.add(CfgNodeKind::Statement, Some(node.span));
                self.edge(branch, pass);
                let merge = self.add(CfgNodeKind::Merge, Some(node.span));
                self.edge(pass, merge);
                self.edge(branch, merge);
                merge
            }
            _ => {
                let before = node
                    .children
                    .iter()
                    .fold(cur, |c, child| self.expression(child, c));
                let stmt = self.add(CfgNodeKind::Statement, Some(node.span));
                self.edge(before, stmt);
                stmt
            }
        }
    }

    /// Expressions add nodes only for conditional (`?:`) subexpressions.
    fn expression(&mut self, node: &AstNode, cur: usize) -> usize {
        if node.kind != NodeKind::Ternary {
            return node
                .children
                .iter()
                .fold(cur, |c, child| self.expression(child, c));
        }
        let cond = self.expression(&node.children[0], cur);
        let branch = self.add(CfgNodeKind::Branch, Some(node.children[0].span));
        self.edge(cond, branch);
        let merge_ends: Vec<usize> = node.children[1..]
            .iter()
            .map(|arm| {
                let start = self.add(CfgNodeKind::Statement, Some(arm.span));
                self.edge(branch, start);
                self.expression(arm, start)
            })
            .collect();
        let merge = self.add(CfgNodeKind::Merge, Some(node.span));
        for end in merge_ends {
            self.edge(end, merge);
        }
        merge
    }
}
