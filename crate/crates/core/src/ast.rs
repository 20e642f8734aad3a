//! Syntax tree of belief programs and its pretty printer.
//!
//! The printer emits the same concrete syntax the parser accepts, so
//! `parse(program.to_string())` reproduces the tree for every source program.

use std::collections::BTreeSet;
use std::fmt;

use crate::rational::{Compact, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    /// Natural-number semantics: subtraction truncates at zero, division
    /// truncates and `c / 0 = 0`. Overflow saturates.
    pub fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            BinOp::Add => a.saturating_add(b),
            BinOp::Sub => a.saturating_sub(b),
            BinOp::Mul => a.saturating_mul(b),
            BinOp::Div => a.checked_div(b).unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ne, CmpOp::Ge, CmpOp::Gt];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    /// The complementary comparison: `!(a op b)` iff `a op.negate() b`.
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
        }
    }

    pub fn holds<T: Ord + ?Sized>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }
}

/// Natural-valued expressions. `Iverson` only occurs inside predicates
/// (grammar-G expressions); program expressions never contain it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(String),
    Const(u64),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Iverson(Box<Prop>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    Cmp(CmpOp, Expr, Expr),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Not(Box<Prop>),
    Bool(bool),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn iverson(p: Prop) -> Expr {
        Expr::Iverson(Box::new(p))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Mul, a, b)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) => {}
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Iverson(p) => p.collect_vars(out),
        }
    }

    /// Simultaneous, capture-free substitution `self[x / by]`.
    pub fn substitute(&self, x: &str, by: &Expr) -> Expr {
        match self {
            Expr::Var(v) if v == x => by.clone(),
            Expr::Var(_) | Expr::Const(_) => self.clone(),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(x, by), b.substitute(x, by)),
            Expr::Iverson(p) => Expr::iverson(p.substitute(x, by)),
        }
    }

    pub fn contains_iverson(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Const(_) => false,
            Expr::Bin(_, a, b) => a.contains_iverson() || b.contains_iverson(),
            Expr::Iverson(_) => true,
        }
    }
}

impl Prop {
    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Prop {
        Prop::Cmp(op, a, b)
    }

    pub fn eq(a: Expr, b: Expr) -> Prop {
        Prop::Cmp(CmpOp::Eq, a, b)
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Prop) -> Prop {
        Prop::Not(Box::new(a))
    }

    /// `x = c` for a variable and a constant.
    pub fn var_is(x: &str, c: u64) -> Prop {
        Prop::eq(Expr::var(x), Expr::Const(c))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Prop::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Prop::And(a, b) | Prop::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Prop::Not(a) => a.collect_vars(out),
            Prop::Bool(_) => {}
        }
    }

    pub fn substitute(&self, x: &str, by: &Expr) -> Prop {
        match self {
            Prop::Cmp(op, a, b) => Prop::Cmp(*op, a.substitute(x, by), b.substitute(x, by)),
            Prop::And(a, b) => Prop::and(a.substitute(x, by), b.substitute(x, by)),
            Prop::Or(a, b) => Prop::or(a.substitute(x, by), b.substitute(x, by)),
            Prop::Not(a) => Prop::not(a.substitute(x, by)),
            Prop::Bool(_) => self.clone(),
        }
    }

    pub fn contains_iverson(&self) -> bool {
        match self {
            Prop::Cmp(_, a, b) => a.contains_iverson() || b.contains_iverson(),
            Prop::And(a, b) | Prop::Or(a, b) => a.contains_iverson() || b.contains_iverson(),
            Prop::Not(a) => a.contains_iverson(),
            Prop::Bool(_) => false,
        }
    }
}

/// One weighted branch `p|E>` of a sampling distribution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub weight: Rational,
    pub value: Expr,
}

/// A finite sampling distribution `p1|E1> + ... + pn|En>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SampleSpec {
    pub branches: Vec<Branch>,
}

impl SampleSpec {
    pub fn new(branches: impl IntoIterator<Item = (Rational, Expr)>) -> SampleSpec {
        SampleSpec {
            branches: branches
                .into_iter()
                .map(|(weight, value)| Branch { weight, value })
                .collect(),
        }
    }

    pub fn total_weight(&self) -> Rational {
        self.branches.iter().map(|b| b.weight.clone()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Const(Rational),
    Param(String),
}

/// Infer condition `p(P) op bound`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold {
    pub op: CmpOp,
    pub bound: Bound,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Skip,
    Assign {
        target: String,
        value: Expr,
    },
    Seq(Box<Statement>, Box<Statement>),
    If {
        guard: Prop,
        then_branch: Box<Statement>,
        else_branch: Box<Statement>,
    },
    While {
        guard: Prop,
        body: Box<Statement>,
    },
    Sample {
        target: String,
        spec: SampleSpec,
    },
    /// `target = observe source`; a missing target is the bare `observe x`
    /// form, removed by desugaring.
    Observe {
        target: Option<String>,
        source: String,
    },
    Infer {
        prop: Prop,
        threshold: Threshold,
        then_branch: Box<Statement>,
        else_branch: Box<Statement>,
    },
    /// Only produced by bounded loop unrolling.
    Diverge,
}

impl Statement {
    /// Right-nested sequence; an empty list is `skip`.
    pub fn seq(items: impl IntoIterator<Item = Statement>) -> Statement {
        let mut items: Vec<Statement> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Statement::Skip;
        };
        while let Some(prev) = items.pop() {
            acc = Statement::Seq(Box::new(prev), Box::new(acc));
        }
        acc
    }

    pub fn assign(target: impl Into<String>, value: Expr) -> Statement {
        Statement::Assign { target: target.into(), value }
    }

    pub fn sample(target: impl Into<String>, spec: SampleSpec) -> Statement {
        Statement::Sample { target: target.into(), spec }
    }

    pub fn observe(target: impl Into<String>, source: impl Into<String>) -> Statement {
        Statement::Observe { target: Some(target.into()), source: source.into() }
    }

    pub fn if_then_else(guard: Prop, a: Statement, b: Statement) -> Statement {
        Statement::If { guard, then_branch: Box::new(a), else_branch: Box::new(b) }
    }

    pub fn while_loop(guard: Prop, body: Statement) -> Statement {
        Statement::While { guard, body: Box::new(body) }
    }

    pub fn infer(prop: Prop, threshold: Threshold, a: Statement, b: Statement) -> Statement {
        Statement::Infer { prop, threshold, then_branch: Box::new(a), else_branch: Box::new(b) }
    }

    /// Flattens nested sequences into their statement list.
    pub fn flatten(&self) -> Vec<&Statement> {
        let mut out = Vec::new();
        fn go<'a>(s: &'a Statement, out: &mut Vec<&'a Statement>) {
            match s {
                Statement::Seq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn is_loop_free(&self) -> bool {
        match self {
            Statement::While { .. } => false,
            Statement::Seq(a, b) => a.is_loop_free() && b.is_loop_free(),
            Statement::If { then_branch, else_branch, .. }
            | Statement::Infer { then_branch, else_branch, .. } => {
                then_branch.is_loop_free() && else_branch.is_loop_free()
            }
            _ => true,
        }
    }

    pub fn contains_diverge(&self) -> bool {
        match self {
            Statement::Diverge => true,
            Statement::Seq(a, b) => a.contains_diverge() || b.contains_diverge(),
            Statement::If { then_branch, else_branch, .. }
            | Statement::Infer { then_branch, else_branch, .. } => {
                then_branch.contains_diverge() || else_branch.contains_diverge()
            }
            Statement::While { body, .. } => body.contains_diverge(),
            _ => false,
        }
    }

    /// Replaces every loop by its bounded unrolling `while^n`:
    /// `while^0 = diverge`, `while^k = if (P) {C; while^(k-1)} else {skip}`.
    /// Inner loops are unrolled independently on every entry.
    pub fn unroll_loops(&self, n: usize) -> Statement {
        match self {
            Statement::While { guard, body } => {
                let body = body.unroll_loops(n);
                let mut acc = Statement::Diverge;
                for _ in 0..n {
                    acc = Statement::if_then_else(
                        guard.clone(),
                        Statement::Seq(Box::new(body.clone()), Box::new(acc)),
                        Statement::Skip,
                    );
                }
                acc
            }
            Statement::Seq(a, b) => Statement::Seq(Box::new(a.unroll_loops(n)), Box::new(b.unroll_loops(n))),
            Statement::If { guard, then_branch, else_branch } => Statement::if_then_else(
                guard.clone(),
                then_branch.unroll_loops(n),
                else_branch.unroll_loops(n),
            ),
            Statement::Infer { prop, threshold, then_branch, else_branch } => Statement::infer(
                prop.clone(),
                threshold.clone(),
                then_branch.unroll_loops(n),
                else_branch.unroll_loops(n),
            ),
            other => other.clone(),
        }
    }

    /// Loops in pre-order; the index of a loop in this list is its identity
    /// for strategy maps.
    pub fn loops(&self) -> Vec<&Statement> {
        let mut out = Vec::new();
        fn go<'a>(s: &'a Statement, out: &mut Vec<&'a Statement>) {
            match s {
                Statement::While { body, .. } => {
                    out.push(s);
                    go(body, out);
                }
                Statement::Seq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Statement::If { then_branch, else_branch, .. }
                | Statement::Infer { then_branch, else_branch, .. } => {
                    go(then_branch, out);
                    go(else_branch, out);
                }
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Observable,
    Unobservable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    /// Sorted, duplicate-free. Required for unobservable variables.
    pub domain: Option<Vec<u64>>,
}

impl VarDecl {
    pub fn observable(name: impl Into<String>) -> VarDecl {
        VarDecl { name: name.into(), kind: VarKind::Observable, domain: None }
    }

    pub fn unobservable(name: impl Into<String>, domain: impl IntoIterator<Item = u64>) -> VarDecl {
        let mut d: Vec<u64> = domain.into_iter().collect();
        d.sort_unstable();
        d.dedup();
        VarDecl { name: name.into(), kind: VarKind::Unobservable, domain: Some(d) }
    }

    pub fn with_domain(mut self, domain: impl IntoIterator<Item = u64>) -> VarDecl {
        let mut d: Vec<u64> = domain.into_iter().collect();
        d.sort_unstable();
        d.dedup();
        self.domain = Some(d);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub params: Vec<String>,
    pub decls: Vec<VarDecl>,
    pub body: Statement,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

// ---------------------------------------------------------------------------
// Pretty printing

struct ExprPrec<'a>(&'a Expr, u8);

impl fmt::Display for ExprPrec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ExprPrec(e, ctx) = *self;
        match e {
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Iverson(p) => write!(f, "[{p}]"),
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                let paren = p < ctx;
                if paren {
                    write!(f, "(")?;
                }
                // left-associative: the right operand binds one level tighter
                write!(f, "{} {} {}", ExprPrec(a, p), op.symbol(), ExprPrec(b, p + 1))?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ExprPrec(self, 0))
    }
}

struct PropPrec<'a>(&'a Prop, u8);

impl fmt::Display for PropPrec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let PropPrec(p, ctx) = *self;
        match p {
            Prop::Bool(true) => write!(f, "true"),
            Prop::Bool(false) => write!(f, "false"),
            Prop::Cmp(op, a, b) => {
                if ctx > 3 {
                    write!(f, "({} {} {})", a, op.symbol(), b)
                } else {
                    write!(f, "{} {} {}", a, op.symbol(), b)
                }
            }
            Prop::Not(a) => write!(f, "!{}", PropPrec(a, 4)),
            Prop::And(a, b) => {
                if ctx > 2 {
                    write!(f, "(")?;
                }
                write!(f, "{} && {}", PropPrec(a, 2), PropPrec(b, 3))?;
                if ctx > 2 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Prop::Or(a, b) => {
                if ctx > 1 {
                    write!(f, "(")?;
                }
                write!(f, "{} || {}", PropPrec(a, 1), PropPrec(b, 2))?;
                if ctx > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", PropPrec(self, 0))
    }
}

impl fmt::Display for SampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sample(")?;
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}|{}>", Compact(&b.weight), b.value)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Const(r) => write!(f, "{}", Compact(r)),
            Bound::Param(p) => write!(f, "{p}"),
        }
    }
}

fn indent(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    for _ in 0..depth {
        write!(f, "  ")?;
    }
    Ok(())
}

fn write_block(f: &mut fmt::Formatter<'_>, s: &Statement, depth: usize) -> fmt::Result {
    for item in s.flatten() {
        write_stmt(f, item, depth)?;
    }
    Ok(())
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Statement, depth: usize) -> fmt::Result {
    indent(f, depth)?;
    match s {
        Statement::Skip => writeln!(f, "skip;"),
        Statement::Diverge => writeln!(f, "diverge;"),
        Statement::Assign { target, value } => writeln!(f, "{target} = {value};"),
        Statement::Sample { target, spec } => writeln!(f, "{target} = {spec};"),
        Statement::Observe { target: Some(t), source } => writeln!(f, "{t} = observe {source};"),
        Statement::Observe { target: None, source } => writeln!(f, "observe {source};"),
        Statement::Seq(..) => {
            // only reached for a nested sequence printed as a statement
            writeln!(f, "{{")?;
            write_block(f, s, depth + 1)?;
            indent(f, depth)?;
            writeln!(f, "}}")
        }
        Statement::If { guard, then_branch, else_branch } => {
            writeln!(f, "if ({guard}) {{")?;
            write_block(f, then_branch, depth + 1)?;
            indent(f, depth)?;
            writeln!(f, "}} else {{")?;
            write_block(f, else_branch, depth + 1)?;
            indent(f, depth)?;
            writeln!(f, "}}")
        }
        Statement::While { guard, body } => {
            writeln!(f, "while ({guard}) {{")?;
            write_block(f, body, depth + 1)?;
            indent(f, depth)?;
            writeln!(f, "}}")
        }
        Statement::Infer { prop, threshold, then_branch, else_branch } => {
            writeln!(f, "infer (p({prop}) {} {}) {{", threshold.op.symbol(), threshold.bound)?;
            write_block(f, then_branch, depth + 1)?;
            indent(f, depth)?;
            writeln!(f, "}} else {{")?;
            write_block(f, else_branch, depth + 1)?;
            indent(f, depth)?;
            writeln!(f, "}}")
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, self, 0)
    }
}

fn write_domain(f: &mut fmt::Formatter<'_>, d: &[u64]) -> fmt::Result {
    write!(f, " in {{")?;
    for (i, v) in d.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.params {
            writeln!(f, "param {p};")?;
        }
        for d in &self.decls {
            let kw = match d.kind {
                VarKind::Observable => "ovar",
                VarKind::Unobservable => "uvar",
            };
            write!(f, "{kw} {}", d.name)?;
            if let Some(dom) = &d.domain {
                write_domain(f, dom)?;
            }
            writeln!(f, ";")?;
        }
        write!(f, "{}", self.body)
    }
}

/// One-line summary of a statement, used in diagnostics.
pub fn statement_head(s: &Statement) -> String {
    match s {
        Statement::Skip => "skip".into(),
        Statement::Diverge => "diverge".into(),
        Statement::Assign { target, value } => format!("{target} = {value}"),
        Statement::Sample { target, spec } => format!("{target} = {spec}"),
        Statement::Observe { target: Some(t), source } => format!("{t} = observe {source}"),
        Statement::Observe { target: None, source } => format!("observe {source}"),
        Statement::Seq(a, _) => statement_head(a),
        Statement::If { guard, .. } => format!("if ({guard})"),
        Statement::While { guard, .. } => format!("while ({guard})"),
        Statement::Infer { prop, threshold, .. } => {
            format!("infer (p({prop}) {} {})", threshold.op.symbol(), threshold.bound)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_minimal_parentheses() {
        let e = Expr::bin(
            BinOp::Sub,
            Expr::Const(1),
            Expr::bin(BinOp::Sub, Expr::var("d"), Expr::Const(1)),
        );
        assert_eq!(e.to_string(), "1 - (d - 1)");
        let e = Expr::bin(BinOp::Mul, Expr::bin(BinOp::Add, Expr::var("a"), Expr::var("b")), Expr::var("c"));
        assert_eq!(e.to_string(), "(a + b) * c");
    }

    #[test]
    fn negation_and_connectives() {
        let p = Prop::not(Prop::and(Prop::var_is("x", 1), Prop::Bool(true)));
        assert_eq!(p.to_string(), "!(x = 1 && true)");
        assert_eq!(CmpOp::Gt.negate(), CmpOp::Le);
    }

    #[test]
    fn bounded_unrolling_shape() {
        let w = Statement::while_loop(Prop::Bool(true), Statement::Skip);
        assert_eq!(w.unroll_loops(0), Statement::Diverge);
        let one = w.unroll_loops(1);
        assert_eq!(
            one,
            Statement::if_then_else(
                Prop::Bool(true),
                Statement::Seq(Box::new(Statement::Skip), Box::new(Statement::Diverge)),
                Statement::Skip
            )
        );
    }

    #[test]
    fn natural_arithmetic() {
        assert_eq!(BinOp::Sub.apply(3, 5), 0);
        assert_eq!(BinOp::Div.apply(7, 2), 3);
        assert_eq!(BinOp::Div.apply(7, 0), 0);
    }
}
