//! Seeded random Solidity generator shared by the integration tests.
//!
//! Sources are produced from a small statement model so that tests can
//! count decision points on the model itself and mutate it structurally.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn listing_paths() -> Vec<PathBuf> {
    (1..=5)
        .map(|i| {
            fixtures_dir()
                .join("listings")
                .join(format!("listing{i}.sol"))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub enum Expr {
    Var(&'static str),
    Num(u32),
    Member(Box<Expr>, &'static str),
    Index(Box<Expr>, Box<Expr>),
    Call(&'static str, Vec<Expr>),
    Binary(Box<Expr>, &'static str, Box<Expr>),
    Not(Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Assign(&'static str, &'static str, Expr),
    Decl(&'static str, &'static str, Expr),
    Call(Expr),
    If(Expr, Vec<Stmt>, Option<Vec<Stmt>>),
    For(Expr, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    DoWhile(Vec<Stmt>, Expr),
    Block(Vec<Stmt>),
    Require(Expr),
    Emit(Expr),
    Return(Expr),
    Break,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FnKind {
    Function,
    Modifier,
    Constructor,
}

#[derive(Debug, Clone)]
pub struct GenFunction {
    pub kind: FnKind,
    pub name: String,
    pub body: Option<Vec<Stmt>>,
}

#[derive(Debug, Clone)]
pub struct GenContract {
    pub keyword: &'static str,
    pub name: String,
    pub functions: Vec<GenFunction>,
}

#[derive(Debug, Clone, Default)]
pub struct GenUnit {
    pub contracts: Vec<GenContract>,
    pub free_functions: Vec<GenFunction>,
}

const VARS: [&str; 6] = ["a", "b", "total", "price", "amount", "count"];
const MEMBERS: [&str; 4] = ["value", "sender", "length", "rate"];
const CALLEES: [&str; 4] = ["compute", "fetch", "helper", "transferOut"];
const BINOPS: [&str; 10] = ["+", "-", "*", "/", "<", ">", "==", "!=", "&&", "||"];
const ASSIGN: [&str; 3] = ["=", "+=", "-="];
const NAME_PARTS: [&str; 10] = [
    "Price", "Oracle", "Vault", "Bridge", "Token", "Api", "Pool", "Relay", "Feed", "Store",
];

pub struct Generator {
    rng: ChaCha8Rng,
    max_depth: usize,
    counter: usize,
}

impl Generator {
    pub fn new(seed: u64, max_depth: usize) -> Self {
        Self {
            rng: rng(seed),
            max_depth,
            counter: 0,
        }
    }

    fn fresh(&mut self, stem: &str) -> String {
        self.counter += 1;
        let part = NAME_PARTS.choose(&mut self.rng).unwrap();
        format!("{stem}{part}{}", self.counter)
    }

    pub fn expr(&mut self, depth: usize) -> Expr {
        let leaf = depth == 0 || self.rng.gen_bool(0.4);
        if leaf {
            return if self.rng.gen_bool(0.5) {
                Expr::Var(VARS.choose(&mut self.rng).unwrap())
            } else {
                Expr::Num(self.rng.gen_range(0..1000))
            };
        }
        match self.rng.gen_range(0..6) {
            0 => Expr::Member(
                Box::new(self.expr(depth - 1)),
                MEMBERS.choose(&mut self.rng).unwrap(),
            ),
            1 => Expr::Index(
                Box::new(self.expr(depth - 1)),
                Box::new(self.expr(depth - 1)),
            ),
            2 => {
                let n = self.rng.gen_range(0..3);
                Expr::Call(
                    CALLEES.choose(&mut self.rng).unwrap(),
                    (0..n).map(|_| self.expr(depth - 1)).collect(),
                )
            }
            3 => Expr::Not(Box::new(self.expr(depth - 1))),
            4 => Expr::Ternary(
                Box::new(self.expr(depth - 1)),
                Box::new(self.expr(depth - 1)),
                Box::new(self.expr(depth - 1)),
            ),
            _ => Expr::Binary(
                Box::new(self.expr(depth - 1)),
                BINOPS.choose(&mut self.rng).unwrap(),
                Box::new(self.expr(depth - 1)),
            ),
        }
    }

    fn block(&mut self, depth: usize) -> Vec<Stmt> {
        let n = self.rng.gen_range(0..4);
        (0..n).map(|_| self.stmt(depth)).collect()
    }

    pub fn stmt(&mut self, depth: usize) -> Stmt {
        let nested = depth < self.max_depth && self.rng.gen_bool(0.45);
        if nested {
            let d = depth + 1;
            return match self.rng.gen_range(0..5) {
                0 => {
                    let c = self.expr(2);
                    let then = self.block(d);
                    let els = self.rng.gen_bool(0.5).then(|| self.block(d));
                    Stmt::If(c, then, els)
                }
                1 => Stmt::For(self.expr(2), self.block(d)),
                2 => Stmt::While(self.expr(2), self.block(d)),
                3 => Stmt::DoWhile(self.block(d), self.expr(2)),
                _ => Stmt::Block(self.block(d)),
            };
        }
        match self.rng.gen_range(0..8) {
            0 | 1 => Stmt::Assign(
                VARS.choose(&mut self.rng).unwrap(),
                ASSIGN.choose(&mut self.rng).unwrap(),
                self.expr(2),
            ),
            2 => Stmt::Decl(
                "uint256",
                ["x", "y", "tmp"].choose(&mut self.rng).unwrap(),
                self.expr(2),
            ),
            3 => Stmt::Call(Expr::Call(
                CALLEES.choose(&mut self.rng).unwrap(),
                vec![self.expr(1)],
            )),
            4 => Stmt::Require(self.expr(2)),
            5 => Stmt::Emit(self.expr(1)),
            6 => Stmt::Return(self.expr(2)),
            _ => Stmt::Break,
        }
    }

    fn function(&mut self, kind: FnKind, with_body: bool) -> GenFunction {
        let name = match kind {
            FnKind::Constructor => "constructor".to_string(),
            FnKind::Modifier => self.fresh("only"),
            FnKind::Function => self.fresh("get"),
        };
        let body = with_body.then(|| {
            let mut b = self.block(0);
            if b.is_empty() && self.rng.gen_bool(0.5) {
                b.push(self.stmt(0));
            }
            b
        });
        GenFunction { kind, name, body }
    }

    pub fn unit(&mut self) -> GenUnit {
        let mut unit = GenUnit::default();
        for _ in 0..self.rng.gen_range(1..4) {
            let keyword = *["contract", "library", "interface", "abstract contract"]
                .choose(&mut self.rng)
                .unwrap();
            let name = self.fresh("");
            let mut functions = Vec::new();
            let interface = keyword == "interface";
            if !interface && self.rng.gen_bool(0.3) {
                functions.push(self.function(FnKind::Constructor, true));
            }
            if !interface && self.rng.gen_bool(0.3) {
                functions.push(self.function(FnKind::Modifier, true));
            }
            for _ in 0..self.rng.gen_range(0..4) {
                let body = !interface && self.rng.gen_bool(0.85);
                functions.push(self.function(FnKind::Function, body));
            }
            unit.contracts.push(GenContract {
                keyword,
                name,
                functions,
            });
        }
        if self.rng.gen_bool(0.2) {
            let f = self.function(FnKind::Function, true);
            unit.free_functions.push(f);
        }
        unit
    }

    /// Inserts `if (cond) { ... }` into a randomly chosen statement list of
    /// a random body. Returns false when the unit has no body.
    pub fn insert_if(&mut self, unit: &mut GenUnit) -> bool {
        let mut bodies: Vec<&mut Vec<Stmt>> = Vec::new();
        for c in &mut unit.contracts {
            for f in &mut c.functions {
                if let Some(b) = &mut f.body {
                    bodies.push(b);
                }
            }
        }
        for f in &mut unit.free_functions {
            if let Some(b) = &mut f.body {
                bodies.push(b);
            }
        }
        if bodies.is_empty() {
            return false;
        }
        let pick = self.rng.gen_range(0..bodies.len());
        let body = bodies.swap_remove(pick);
        let target = self.rng.gen_range(0..count_lists(body));
        // The inserted condition and arm contain no decision constructs.
        let stmt = Stmt::If(
            Expr::Binary(Box::new(Expr::Var("a")), ">", Box::new(Expr::Num(1))),
            vec![Stmt::Assign("b", "=", Expr::Num(2))],
            None,
        );
        let position = self.rng.gen::<usize>();
        insert_into_list(body, &mut { target }, stmt, position).is_none()
    }
}

fn nested_lists(s: &mut Stmt) -> Vec<&mut Vec<Stmt>> {
    match s {
        Stmt::If(_, t, e) => {
            let mut v = vec![t];
            if let Some(e) = e {
                v.push(e);
            }
            v
        }
        Stmt::For(_, b) | Stmt::While(_, b) | Stmt::DoWhile(b, _) | Stmt::Block(b) => vec![b],
        _ => Vec::new(),
    }
}

fn count_lists(list: &mut [Stmt]) -> usize {
    1 + list
        .iter_mut()
        .flat_map(nested_lists)
        .map(|l| count_lists(l))
        .sum::<usize>()
}

/// Pre-order search for the `target`-th statement list; inserts `stmt` there
/// and returns `None`, or gives `stmt` back if the target was not reached.
fn insert_into_list(
    list: &mut Vec<Stmt>,
    target: &mut usize,
    stmt: Stmt,
    position: usize,
) -> Option<Stmt> {
    if *target == 0 {
        let at = position % (list.len() + 1);
        list.insert(at, stmt);
        return None;
    }
    *target -= 1;
    let mut stmt = stmt;
    for s in list.iter_mut() {
        for nested in nested_lists(s) {
            stmt = insert_into_list(nested, target, stmt, position)?;
        }
    }
    Some(stmt)
}

fn expr_decisions(e: &Expr) -> usize {
    match e {
        Expr::Var(_) | Expr::Num(_) => 0,
        Expr::Member(x, _) | Expr::Not(x) => expr_decisions(x),
        Expr::Index(a, b) | Expr::Binary(a, _, b) => expr_decisions(a) + expr_decisions(b),
        Expr::Call(_, args) => args.iter().map(expr_decisions).sum(),
        Expr::Ternary(c, a, b) => 1 + expr_decisions(c) + expr_decisions(a) + expr_decisions(b),
    }
}

fn stmts_decisions(list: &[Stmt]) -> usize {
    list.iter()
        .map(|s| match s {
            Stmt::Assign(_, _, e)
            | Stmt::Decl(_, _, e)
            | Stmt::Call(e)
            | Stmt::Require(e)
            | Stmt::Emit(e)
            | Stmt::Return(e) => expr_decisions(e),
            Stmt::If(c, t, e) => {
                1 + expr_decisions(c) + stmts_decisions(t) + e.as_deref().map_or(0, stmts_decisions)
            }
            Stmt::For(c, b) | Stmt::While(c, b) | Stmt::DoWhile(b, c) => {
                1 + expr_decisions(c) + stmts_decisions(b)
            }
            Stmt::Block(b) => stmts_decisions(b),
            Stmt::Break => 0,
        })
        .sum()
}

/// One plus the decision constructs of every body, counted on the model.
pub fn model_complexity(unit: &GenUnit) -> i64 {
    unit.contracts
        .iter()
        .flat_map(|c| &c.functions)
        .chain(&unit.free_functions)
        .filter_map(|f| f.body.as_deref())
        .map(|b| 1 + stmts_decisions(b) as i64)
        .sum()
}

pub fn render_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Var(v) => out.push_str(v),
        Expr::Num(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Member(x, m) => {
            render_expr(x, out);
            let _ = write!(out, ".{m}");
        }
        Expr::Index(a, b) => {
            render_expr(a, out);
            out.push('[');
            render_expr(b, out);
            out.push(']');
        }
        Expr::Call(f, args) => {
            let _ = write!(out, "{f}(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_expr(a, out);
            }
            out.push(')');
        }
        Expr::Binary(a, op, b) => {
            out.push('(');
            render_expr(a, out);
            let _ = write!(out, " {op} ");
            render_expr(b, out);
            out.push(')');
        }
        Expr::Not(x) => {
            out.push('!');
            render_expr(x, out);
        }
        Expr::Ternary(c, a, b) => {
            out.push('(');
            render_expr(c, out);
            out.push_str(" ? ");
            render_expr(a, out);
            out.push_str(" : ");
            render_expr(b, out);
            out.push(')');
        }
    }
}

fn expr_string(e: &Expr) -> String {
    let mut s = String::new();
    render_expr(e, &mut s);
    s
}

fn render_block(list: &[Stmt], indent: usize, out: &mut String) {
    out.push_str("{\n");
    for s in list {
        render_stmt(s, indent + 1, out);
    }
    out.push_str(&"    ".repeat(indent));
    out.push('}');
}

fn render_stmt(s: &Stmt, indent: usize, out: &mut String) {
    out.push_str(&"    ".repeat(indent));
    match s {
        Stmt::Assign(v, op, e) => {
            let _ = writeln!(out, "{v} {op} {};", expr_string(e));
        }
        Stmt::Decl(ty, v, e) => {
            let _ = writeln!(out, "{ty} {v} = {};", expr_string(e));
        }
        Stmt::Call(e) => {
            let _ = writeln!(out, "{};", expr_string(e));
        }
        Stmt::Require(e) => {
            let _ = writeln!(out, "require({}, \"check\");", expr_string(e));
        }
        Stmt::Emit(e) => {
            let _ = writeln!(out, "emit Updated({});", expr_string(e));
        }
        Stmt::Return(e) => {
            let _ = writeln!(out, "return {};", expr_string(e));
        }
        Stmt::Break => out.push_str("break;\n"),
        Stmt::If(c, t, e) => {
            let _ = write!(out, "if ({}) ", expr_string(c));
            render_block(t, indent, out);
            if let Some(e) = e {
                out.push_str(" else ");
                render_block(e, indent, out);
            }
            out.push('\n');
        }
        Stmt::For(c, b) => {
            let _ = write!(out, "for (uint256 i = 0; {}; i++) ", expr_string(c));
            render_block(b, indent, out);
            out.push('\n');
        }
        Stmt::While(c, b) => {
            let _ = write!(out, "while ({}) ", expr_string(c));
            render_block(b, indent, out);
            out.push('\n');
        }
        Stmt::DoWhile(b, c) => {
            out.push_str("do ");
            render_block(b, indent, out);
            let _ = writeln!(out, " while ({});", expr_string(c));
        }
        Stmt::Block(b) => {
            render_block(b, indent, out);
            out.push('\n');
        }
    }
}

fn render_function(f: &GenFunction, indent: usize, out: &mut String) {
    out.push_str(&"    ".repeat(indent));
    match f.kind {
        FnKind::Constructor => out.push_str("constructor(address _a) "),
        FnKind::Modifier => {
            let _ = write!(out, "modifier {}() ", f.name);
        }
        FnKind::Function => {
            let _ = write!(
                out,
                "function {}(uint256 x, address to) public returns (uint256) ",
                f.name
            );
        }
    }
    match &f.body {
        Some(b) => {
            render_block(b, indent, out);
            out.push('\n');
        }
        None => out.push_str(";\n"),
    }
}

pub fn render(unit: &GenUnit) -> String {
    let mut out = String::from("// SPDX-License-Identifier: MIT\npragma solidity ^0.8.0;\n\n");
    for c in &unit.contracts {
        let _ = writeln!(out, "{} {} {{", c.keyword, c.name);
        out.push_str("    uint256 public total;\n    event Updated(uint256 v);\n");
        for f in &c.functions {
            render_function(f, 1, &mut out);
        }
        out.push_str("}\n\n");
    }
    for f in &unit.free_functions {
        render_function(f, 0, &mut out);
    }
    out
}

/// Writes `n` generated sources under `dir` and returns their paths.
pub fn write_corpus(dir: &Path, n: usize, seed: u64) -> Vec<PathBuf> {
    (0..n)
        .map(|i| {
            let mut g = Generator::new(seed.wrapping_add(i as u64), 4);
            let sub = dir.join(format!("p{:02}", i % 7));
            std::fs::create_dir_all(&sub).unwrap();
            let path = sub.join(format!("unit{i:03}.sol"));
            std::fs::write(&path, render(&g.unit())).unwrap();
            path
        })
        .collect()
}
