//! Static checks (declarations, observability discipline) and desugaring.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed};

use crate::ast::*;
use crate::parser::{parse, ParseError};
use crate::rational::{is_probability, Compact};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    /// One-line rendering of the offending statement or declaration.
    pub statement: String,
    /// The variable (or parameter) responsible, when there is one.
    pub variable: Option<String>,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (in `{}`)", self.message, self.statement)
    }
}

impl std::error::Error for TypeError {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{}", render_type_errors(.0))]
    Type(Vec<TypeError>),
}

fn render_type_errors(errs: &[TypeError]) -> String {
    errs.iter().map(|e| format!("type error: {e}")).collect::<Vec<_>>().join("\n")
}

struct Checker<'a> {
    prog: &'a Program,
    errors: Vec<TypeError>,
}

impl Checker<'_> {
    fn push(&mut self, stmt: &str, var: Option<&str>, message: String) {
        self.errors.push(TypeError {
            statement: stmt.to_string(),
            variable: var.map(str::to_string),
            message,
        });
    }

    fn kind(&self, v: &str) -> Option<VarKind> {
        self.prog.decl(v).map(|d| d.kind)
    }

    fn declared(&mut self, stmt: &str, vars: &BTreeSet<String>) {
        for v in vars {
            if self.kind(v).is_none() {
                self.push(stmt, Some(v), format!("undeclared variable `{v}`"));
            }
        }
    }

    /// Reports every unobservable variable among `vars` as leaking into `what`.
    fn observable_only(&mut self, stmt: &str, what: &str, vars: &BTreeSet<String>) {
        self.declared(stmt, vars);
        for v in vars {
            if self.kind(v) == Some(VarKind::Unobservable) {
                self.push(stmt, Some(v), format!("{what} uses unobservable `{v}`"));
            }
        }
    }

    fn no_iverson(&mut self, stmt: &str, found: bool) {
        if found {
            self.push(stmt, None, "Iverson brackets are only allowed in predicates".into());
        }
    }

    fn statement(&mut self, s: &Statement) {
        let head = statement_head(s);
        match s {
            Statement::Skip | Statement::Diverge => {}
            Statement::Seq(a, b) => {
                self.statement(a);
                self.statement(b);
            }
            Statement::Assign { target, value } => {
                match self.kind(target) {
                    None => self.push(&head, Some(target), format!("undeclared variable `{target}`")),
                    Some(VarKind::Unobservable) => self.push(
                        &head,
                        Some(target),
                        format!("assignment target `{target}` is unobservable; use sample"),
                    ),
                    Some(VarKind::Observable) => {}
                }
                self.no_iverson(&head, value.contains_iverson());
                self.observable_only(&head, "assignment source", &value.vars());
            }
            Statement::Sample { target, spec } => {
                match self.kind(target) {
                    None => self.push(&head, Some(target), format!("undeclared variable `{target}`")),
                    Some(VarKind::Observable) => {
                        self.push(&head, Some(target), format!("sample target `{target}` must be unobservable"))
                    }
                    Some(VarKind::Unobservable) => {}
                }
                if spec.branches.is_empty() {
                    self.push(&head, None, "sample needs at least one branch".into());
                }
                for b in &spec.branches {
                    if !b.weight.is_positive() {
                        self.push(&head, None, format!("branch weight {} is not positive", Compact(&b.weight)));
                    }
                    self.no_iverson(&head, b.value.contains_iverson());
                    self.declared(&head, &b.value.vars());
                }
                let total = spec.total_weight();
                if !total.is_one() {
                    self.push(&head, None, format!("branch weights sum to {}, not 1", Compact(&total)));
                }
            }
            Statement::Observe { target, source } => {
                match self.kind(source) {
                    None => self.push(&head, Some(source), format!("undeclared variable `{source}`")),
                    Some(VarKind::Observable) => {
                        self.push(&head, Some(source), format!("observe source `{source}` must be unobservable"))
                    }
                    Some(VarKind::Unobservable) => {}
                }
                if let Some(t) = target {
                    match self.kind(t) {
                        None => self.push(&head, Some(t), format!("undeclared variable `{t}`")),
                        Some(VarKind::Unobservable) => {
                            self.push(&head, Some(t), format!("observe target `{t}` must be observable"))
                        }
                        Some(VarKind::Observable) => {}
                    }
                }
            }
            Statement::If { guard, then_branch, else_branch } => {
                self.no_iverson(&head, guard.contains_iverson());
                self.observable_only(&head, "if-guard", &guard.vars());
                self.statement(then_branch);
                self.statement(else_branch);
            }
            Statement::While { guard, body } => {
                self.no_iverson(&head, guard.contains_iverson());
                self.observable_only(&head, "while-guard", &guard.vars());
                self.statement(body);
            }
            Statement::Infer { prop, threshold, then_branch, else_branch } => {
                self.no_iverson(&head, prop.contains_iverson());
                self.declared(&head, &prop.vars());
                match &threshold.bound {
                    Bound::Const(r) => {
                        if !is_probability(r) {
                            self.push(&head, None, format!("threshold {} lies outside [0, 1]", Compact(r)));
                        }
                    }
                    Bound::Param(p) => {
                        if !self.prog.params.contains(p) {
                            self.push(&head, Some(p), format!("undeclared parameter `{p}`"));
                        }
                    }
                }
                self.statement(then_branch);
                self.statement(else_branch);
            }
        }
    }
}

/// Checks declarations and the observable/unobservable discipline.
pub fn check_observability(prog: &Program) -> Result<(), Vec<TypeError>> {
    let mut c = Checker { prog, errors: Vec::new() };
    let mut seen = BTreeSet::new();
    for p in &prog.params {
        if !seen.insert(p.clone()) {
            c.push(&format!("param {p}"), Some(p), format!("duplicate declaration of `{p}`"));
        }
    }
    for d in &prog.decls {
        let head = match d.kind {
            VarKind::Observable => format!("ovar {}", d.name),
            VarKind::Unobservable => format!("uvar {}", d.name),
        };
        if !seen.insert(d.name.clone()) {
            c.push(&head, Some(&d.name), format!("duplicate declaration of `{}`", d.name));
        }
        match &d.domain {
            Some(dom) if dom.is_empty() => c.push(&head, Some(&d.name), "empty domain".into()),
            None if d.kind == VarKind::Unobservable => c.push(
                &head,
                Some(&d.name),
                format!("unobservable `{}` needs a finite domain (`in {{...}}`)", d.name),
            ),
            _ => {}
        }
    }
    c.statement(&prog.body);
    if c.errors.is_empty() {
        Ok(())
    } else {
        Err(c.errors)
    }
}

/// Replaces every bare `observe x` by `_obsN = observe x` with a fresh
/// observable `_obsN`, declared in the header.
pub fn desugar(prog: &Program) -> Program {
    let mut used: BTreeSet<String> = prog.decls.iter().map(|d| d.name.clone()).collect();
    used.extend(prog.params.iter().cloned());
    let mut next = 0usize;
    let mut fresh = Vec::new();
    let body = desugar_stmt(&prog.body, &mut |_| {
        let name = loop {
            let cand = format!("_obs{next}");
            next += 1;
            if !used.contains(&cand) {
                break cand;
            }
        };
        used.insert(name.clone());
        fresh.push(name.clone());
        name
    });
    let mut decls = prog.decls.clone();
    decls.extend(fresh.into_iter().map(VarDecl::observable));
    Program { params: prog.params.clone(), decls, body }
}

fn desugar_stmt(s: &Statement, fresh: &mut dyn FnMut(&str) -> String) -> Statement {
    match s {
        Statement::Observe { target: None, source } => {
            Statement::Observe { target: Some(fresh(source)), source: source.clone() }
        }
        Statement::Seq(a, b) => Statement::Seq(Box::new(desugar_stmt(a, fresh)), Box::new(desugar_stmt(b, fresh))),
        Statement::If { guard, then_branch, else_branch } => Statement::if_then_else(
            guard.clone(),
            desugar_stmt(then_branch, fresh),
            desugar_stmt(else_branch, fresh),
        ),
        Statement::While { guard, body } => Statement::while_loop(guard.clone(), desugar_stmt(body, fresh)),
        Statement::Infer { prop, threshold, then_branch, else_branch } => Statement::infer(
            prop.clone(),
            threshold.clone(),
            desugar_stmt(then_branch, fresh),
            desugar_stmt(else_branch, fresh),
        ),
        other => other.clone(),
    }
}

/// Parse, check and desugar in one go.
pub fn load(src: &str) -> Result<Program, FrontendError> {
    let prog = parse(src)?;
    check_observability(&prog).map_err(FrontendError::Type)?;
    Ok(desugar(&prog))
}

/// Checks that a sample spec is a probability distribution.
pub fn spec_is_distribution(spec: &SampleSpec) -> bool {
    !spec.branches.is_empty()
        && spec.branches.iter().all(|b| b.weight.is_positive())
        && spec.total_weight().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    const COIN: &str = "uvar coin in {0, 1};
ovar guess;
ovar actual;
coin = sample(0.5|1> + 0.5|0>);
if (coin = 1) { guess = 1; } else { guess = 0; }
actual = observe coin;
";

    #[test]
    fn coin_guess_leaks_through_if_guard() {
        let prog = parse(COIN).unwrap();
        let errs = check_observability(&prog).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].variable.as_deref(), Some("coin"));
        assert!(errs[0].message.contains("if-guard"), "{}", errs[0]);
    }

    #[test]
    fn observable_program_is_fine() {
        let prog = parse("ovar x;\nx = 1;").unwrap();
        assert!(check_observability(&prog).is_ok());
    }

    #[test]
    fn kind_and_declaration_errors() {
        let prog = parse("uvar u in {0,1}; ovar x; ovar x; uvar w;\nu = 1; x = sample(1|0>); x = u + y;").unwrap();
        let errs = check_observability(&prog).unwrap_err();
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        let all = msgs.join("\n");
        assert!(all.contains("duplicate declaration of `x`"));
        assert!(all.contains("needs a finite domain"));
        assert!(all.contains("assignment target `u` is unobservable"));
        assert!(all.contains("sample target `x` must be unobservable"));
        assert!(all.contains("assignment source uses unobservable `u`"));
        assert!(all.contains("undeclared variable `y`"));
    }

    #[test]
    fn weights_and_thresholds() {
        let prog = parse("uvar u in {0,1}; u = sample(0.5|0> + 0.4|1>); infer(p(u = 1) > 2) {skip;}").unwrap();
        let all: Vec<String> = check_observability(&prog).unwrap_err().iter().map(|e| e.to_string()).collect();
        assert!(all.iter().any(|m| m.contains("sum to 9/10")));
        assert!(all.iter().any(|m| m.contains("outside [0, 1]")));
        let prog = parse("uvar u in {0,1}; infer(p(u = 1) > q) {skip;}").unwrap();
        assert!(check_observability(&prog).unwrap_err()[0].message.contains("undeclared parameter"));
    }

    #[test]
    fn desugar_names_are_fresh_and_idempotent() {
        let prog = parse("uvar t in {0,1}; ovar _obs0; observe t; observe t;").unwrap();
        let d = desugar(&prog);
        let targets: Vec<String> = d
            .body
            .flatten()
            .iter()
            .filter_map(|s| match s {
                Statement::Observe { target, .. } => target.clone(),
                _ => None,
            })
            .collect();
        assert_eq!(targets, vec!["_obs1".to_string(), "_obs2".to_string()]);
        assert_eq!(desugar(&d), d);
        assert!(check_observability(&d).is_ok());

        let plain = parse("uvar t in {0,1}; observe t; observe t;").unwrap();
        let names: Vec<String> = desugar(&plain).decls.iter().map(|d| d.name.clone()).collect();
        assert_eq!(names, vec!["t", "_obs0", "_obs1"]);
    }
}
