//! Predicates over belief states: guarded sums of expected values.
//!
//! A [`GPredicate`] denotes `Σ coef·Πparams·Π[guard]·Ex(atom)`, where
//! `Ex(E)(β) = Σ β(σ)·σ(E)` and each guard compares two weighted sums of
//! expected values, `[Σ rᵢ·Ex(Eᵢ) ∼ c·Σ sⱼ·Ex(Fⱼ)]`, with `c` a rational or a
//! parameter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::ast::*;
use crate::belief::{BeliefState, Signature};
use crate::lexer::Tok;
use crate::parser::{ParseError, Parser};
use crate::rational::{Compact, Rational};
use crate::semantics::Params;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PredError {
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
}

/// Product of parameters with multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn param(p: &str) -> Monomial {
        let mut m = BTreeMap::new();
        m.insert(p.to_string(), 1);
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            *m.entry(k.clone()).or_insert(0) += v;
        }
        Monomial(m)
    }

    pub fn eval(&self, params: &Params) -> Result<Rational, PredError> {
        let mut acc = Rational::one();
        for (p, k) in &self.0 {
            let v = params.get(p).ok_or_else(|| PredError::UnboundParameter(p.clone()))?;
            for _ in 0..*k {
                acc *= v;
            }
        }
        Ok(acc)
    }

    pub fn degree_in(&self, p: &str) -> u32 {
        self.0.get(p).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coeff {
    Const(Rational),
    Param(String),
}

impl Coeff {
    pub fn one() -> Coeff {
        Coeff::Const(Rational::one())
    }

    pub fn eval(&self, params: &Params) -> Result<Rational, PredError> {
        match self {
            Coeff::Const(r) => Ok(r.clone()),
            Coeff::Param(p) => params.get(p).cloned().ok_or_else(|| PredError::UnboundParameter(p.clone())),
        }
    }
}

/// `Σ rᵢ·Ex(Eᵢ)`, kept sorted by expression with like entries merged and
/// zero weights dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExForm(pub Vec<(Rational, Expr)>);

impl ExForm {
    pub fn zero() -> ExForm {
        ExForm(Vec::new())
    }

    pub fn ex(e: Expr) -> ExForm {
        ExForm(vec![(Rational::one(), e)])
    }

    pub fn from_entries(items: impl IntoIterator<Item = (Rational, Expr)>) -> ExForm {
        let mut m: BTreeMap<Expr, Rational> = BTreeMap::new();
        for (r, e) in items {
            *m.entry(e).or_insert_with(Rational::zero) += r;
        }
        ExForm(m.into_iter().filter(|(_, r)| !r.is_zero()).map(|(e, r)| (r, e)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, k: &Rational) -> ExForm {
        ExForm::from_entries(self.0.iter().map(|(r, e)| (r * k, e.clone())))
    }

    pub fn map(&self, f: &dyn Fn(&Expr) -> Expr) -> ExForm {
        ExForm::from_entries(self.0.iter().map(|(r, e)| (r.clone(), f(e))))
    }

    pub fn eval(&self, b: &BeliefState) -> Rational {
        self.0.iter().map(|(r, e)| r * b.expect(e)).sum()
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (_, e) in &self.0 {
            e.collect_vars(&mut out);
        }
        out
    }
}

/// `[lhs op coeff·rhs]`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    pub lhs: ExForm,
    pub op: CmpOp,
    pub coeff: Coeff,
    pub rhs: ExForm,
}

impl Guard {
    pub fn new(lhs: ExForm, op: CmpOp, coeff: Coeff, rhs: ExForm) -> Guard {
        Guard { lhs, op, coeff, rhs }
    }

    /// `[Ex([P]) = v·Ex(1)]` for v ∈ {0, 1}: the truth of an observable
    /// proposition on a consistent belief.
    pub fn flag(p: &Prop, holds: bool) -> Guard {
        let rhs = if holds { ExForm::ex(Expr::Const(1)) } else { ExForm::zero() };
        Guard::new(ExForm::ex(Expr::iverson(p.clone())), CmpOp::Eq, Coeff::one(), rhs)
    }

    /// `[Ex([P]) op bound·Ex(1)]` for an infer threshold.
    pub fn threshold(p: &Prop, op: CmpOp, bound: &Bound) -> Guard {
        let coeff = match bound {
            Bound::Const(r) => Coeff::Const(r.clone()),
            Bound::Param(q) => Coeff::Param(q.clone()),
        };
        Guard::new(ExForm::ex(Expr::iverson(p.clone())), op, coeff, ExForm::ex(Expr::Const(1)))
    }

    pub fn negate(&self) -> Guard {
        Guard { op: self.op.negate(), ..self.clone() }
    }

    pub fn eval(&self, b: &BeliefState, params: &Params) -> Result<bool, PredError> {
        let l = self.lhs.eval(b);
        let r = self.coeff.eval(params)? * self.rhs.eval(b);
        Ok(self.op.holds(&l, &r))
    }

    pub fn map(&self, f: &dyn Fn(&Expr) -> Expr) -> Guard {
        Guard { lhs: self.lhs.map(f), op: self.op, coeff: self.coeff.clone(), rhs: self.rhs.map(f) }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn params(&self) -> Option<&str> {
        match &self.coeff {
            Coeff::Param(p) => Some(p),
            Coeff::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub coef: Rational,
    pub mono: Monomial,
    /// Sorted and duplicate-free after normalization.
    pub guards: Vec<Guard>,
    pub atom: Expr,
}

impl Term {
    pub fn ex(e: Expr) -> Term {
        Term { coef: Rational::one(), mono: Monomial::one(), guards: Vec::new(), atom: e }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.atom.vars();
        for g in &self.guards {
            v.extend(g.vars());
        }
        v
    }

    pub fn eval(&self, b: &BeliefState, params: &Params) -> Result<Rational, PredError> {
        for g in &self.guards {
            if !g.eval(b, params)? {
                return Ok(Rational::zero());
            }
        }
        Ok(&self.coef * self.mono.eval(params)? * b.expect(&self.atom))
    }

    pub fn map(&self, f: &dyn Fn(&Expr) -> Expr) -> Term {
        Term {
            coef: self.coef.clone(),
            mono: self.mono.clone(),
            guards: self.guards.iter().map(|g| g.map(f)).collect(),
            atom: f(&self.atom),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GPredicate {
    pub terms: Vec<Term>,
}

impl GPredicate {
    /// The predicate 𝟎.
    pub fn zero() -> GPredicate {
        GPredicate { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn ex(e: Expr) -> GPredicate {
        GPredicate { terms: vec![Term::ex(e)] }
    }

    /// `Pr(P) = Ex([P])`
    pub fn pr(p: Prop) -> GPredicate {
        GPredicate::ex(Expr::iverson(p))
    }

    pub fn constant(r: Rational) -> GPredicate {
        GPredicate::ex(Expr::Const(1)).scale(&r)
    }

    pub fn param(p: &str) -> GPredicate {
        GPredicate { terms: vec![Term { mono: Monomial::param(p), ..Term::ex(Expr::Const(1)) }] }
    }

    pub fn add(mut self, other: GPredicate) -> GPredicate {
        self.terms.extend(other.terms);
        self
    }

    pub fn scale(&self, k: &Rational) -> GPredicate {
        GPredicate {
            terms: self.terms.iter().map(|t| Term { coef: &t.coef * k, ..t.clone() }).collect(),
        }
    }

    pub fn scale_mono(&self, m: &Monomial) -> GPredicate {
        GPredicate {
            terms: self.terms.iter().map(|t| Term { mono: t.mono.mul(m), ..t.clone() }).collect(),
        }
    }

    /// `[g]·F`
    pub fn guarded(&self, g: &Guard) -> GPredicate {
        GPredicate {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.guards.push(g.clone());
                    t
                })
                .collect(),
        }
    }

    pub fn eval(&self, b: &BeliefState, params: &Params) -> Result<Rational, PredError> {
        let mut acc = Rational::zero();
        for t in &self.terms {
            acc += t.eval(b, params)?;
        }
        Ok(acc)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = BTreeSet::new();
        for t in &self.terms {
            v.extend(t.vars());
        }
        v
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            out.extend(t.mono.0.keys().cloned());
            for g in &t.guards {
                if let Some(p) = g.params() {
                    out.insert(p.to_string());
                }
            }
        }
        out
    }

    pub fn map(&self, f: &dyn Fn(&Expr) -> Expr) -> GPredicate {
        GPredicate { terms: self.terms.iter().map(|t| t.map(f)).collect() }
    }

    /// Replaces bound parameters by their values.
    pub fn bind_params(&self, params: &Params) -> GPredicate {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut coef = t.coef.clone();
                let mut mono = BTreeMap::new();
                for (p, k) in &t.mono.0 {
                    match params.get(p) {
                        Some(v) => {
                            for _ in 0..*k {
                                coef *= v;
                            }
                        }
                        None => {
                            mono.insert(p.clone(), *k);
                        }
                    }
                }
                let guards = t
                    .guards
                    .iter()
                    .map(|g| match &g.coeff {
                        Coeff::Param(p) if params.contains_key(p) => Guard { coeff: Coeff::Const(params[p].clone()), ..g.clone() },
                        _ => g.clone(),
                    })
                    .collect();
                Term { coef, mono: Monomial(mono), guards, atom: t.atom.clone() }
            })
            .collect();
        GPredicate { terms }
    }
}

/// Ex(E)(β)
pub fn eval_ex(e: &Expr, b: &BeliefState) -> Rational {
    b.expect(e)
}

/// `Ex(E)[x ↦ E'] = Ex(E[x/E'])`, applied to every atom and guard side.
pub fn rewrite_assign(f: &GPredicate, x: &str, by: &Expr) -> GPredicate {
    f.map(&|e| e.substitute(x, by))
}

/// `Ex(E)[x ↦ f] = Σ pᵢ·Ex(E[x/Eᵢ])` for `f = Σ pᵢ|Eᵢ⟩`.
pub fn rewrite_sample(f: &GPredicate, x: &str, spec: &SampleSpec) -> GPredicate {
    let form = |ef: &ExForm| {
        ExForm::from_entries(ef.0.iter().flat_map(|(r, e)| {
            spec.branches.iter().map(move |b| (r * &b.weight, e.substitute(x, &b.value)))
        }))
    };
    let mut terms = Vec::new();
    for t in &f.terms {
        let guards: Vec<Guard> = t
            .guards
            .iter()
            .map(|g| Guard { lhs: form(&g.lhs), op: g.op, coeff: g.coeff.clone(), rhs: form(&g.rhs) })
            .collect();
        for b in &spec.branches {
            terms.push(Term {
                coef: &t.coef * &b.weight,
                mono: t.mono.clone(),
                guards: guards.clone(),
                atom: t.atom.substitute(x, &b.value),
            });
        }
    }
    GPredicate { terms }
}

/// `F|_{x=c}` as a quotient: its value at β is `numerator(β) / Ex([x=c])(β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conditioned {
    pub numerator: GPredicate,
    pub denominator: Expr,
}

impl Conditioned {
    pub fn eval(&self, b: &BeliefState, params: &Params) -> Result<Rational, PredError> {
        let z = b.expect(&self.denominator);
        if z.is_zero() {
            return Ok(Rational::zero());
        }
        Ok(self.numerator.eval(b, params)? / z)
    }
}

fn times_indicator(e: &Expr, ind: &Expr) -> Expr {
    match e {
        Expr::Const(1) => ind.clone(),
        _ => Expr::mul(e.clone(), ind.clone()),
    }
}

fn observable_only(sig: &Signature, vars: &BTreeSet<String>) -> bool {
    vars.iter().all(|v| sig.kind_of(v) == Some(VarKind::Observable))
}

/// Conditioning on `x = c`. Atoms become `Ex(E·[x=c])` over the common
/// denominator `Ex([x=c])`; guard sides are multiplied by `[x=c]` on both
/// sides, which cancels the denominator. Guards over observable variables
/// only are unaffected by conditioning a consistent belief and are kept.
pub fn rewrite_observe(f: &GPredicate, x: &str, c: u64, sig: &Signature) -> Conditioned {
    let ind = Expr::iverson(Prop::var_is(x, c));
    let mul = |e: &Expr| times_indicator(e, &ind);
    let terms = f
        .terms
        .iter()
        .map(|t| Term {
            coef: t.coef.clone(),
            mono: t.mono.clone(),
            guards: t
                .guards
                .iter()
                .map(|g| if observable_only(sig, &g.vars()) { g.clone() } else { g.map(&mul) })
                .collect(),
            atom: mul(&t.atom),
        })
        .collect();
    Conditioned { numerator: GPredicate { terms }, denominator: ind }
}

// ---------------------------------------------------------------------------
// Printing. The output is accepted by `parse_predicate`.

fn write_ex(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Iverson(p) => write!(f, "Pr({p})"),
        other => write!(f, "Ex({other})"),
    }
}

impl fmt::Display for ExForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *e == Expr::Const(1) {
                write!(f, "{}", Compact(r))?;
            } else {
                if !r.is_one() {
                    write!(f, "{} * ", Compact(r))?;
                }
                write_ex(f, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {} ", self.lhs, self.op.symbol())?;
        let trivial_rhs = self.rhs.0 == [(Rational::one(), Expr::Const(1))];
        match &self.coeff {
            Coeff::Const(c) if c.is_one() => write!(f, "{}", self.rhs)?,
            Coeff::Const(c) => write!(f, "{} * ({})", Compact(c), self.rhs)?,
            Coeff::Param(p) if trivial_rhs => write!(f, "{p}")?,
            Coeff::Param(p) => write!(f, "{p} * ({})", self.rhs)?,
        }
        write!(f, "]")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.coef.is_one() {
            parts.push(Compact(&self.coef).to_string());
        }
        for (p, k) in &self.mono.0 {
            for _ in 0..*k {
                parts.push(p.clone());
            }
        }
        for g in &self.guards {
            parts.push(g.to_string());
        }
        match &self.atom {
            Expr::Const(1) => {}
            Expr::Iverson(p) => parts.push(format!("Pr({p})")),
            other => parts.push(format!("Ex({other})")),
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

impl fmt::Display for GPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Surface syntax
//
//   pred   ::= prod ("+" prod)*
//   prod   ::= factor ("*" factor)*
//   factor ::= rational | param | "Pr(" prop ")" | "Ex(" expr ")"
//            | "(" "1" "-" "Pr(" prop ")" ")" | "(" pred ")" | guard
//   guard  ::= "[" form cmp rhs "]"
//   rhs    ::= param ("*" (atom | "(" form ")"))? | rational "*" "(" form ")" | form
//   form   ::= fterm ("+" fterm)*        fterm ::= rational ("*" atom)? | atom
//   atom   ::= "Pr(" prop ")" | "Ex(" expr ")"
//
// Expressions inside Ex may contain Iverson brackets `[P]`.

struct PredParser<'a> {
    p: Parser,
    sig: &'a Signature,
    params: &'a [String],
}

impl PredParser<'_> {
    fn is_param(&self) -> Option<String> {
        match self.p.peek() {
            Tok::Ident(s) if self.params.contains(s) => Some(s.clone()),
            _ => None,
        }
    }

    fn observable_prop(&self, p: &Prop) -> bool {
        observable_only(self.sig, &p.vars())
    }

    fn atom(&mut self) -> Result<Option<Expr>, ParseError> {
        let Tok::Ident(name) = self.p.peek().clone() else {
            return Ok(None);
        };
        if !matches!(self.p.peek_at(1), Tok::LParen) {
            return Ok(None);
        }
        match name.as_str() {
            "Pr" => {
                self.p.expect_keyword("Pr")?;
                self.p.expect(&Tok::LParen)?;
                let prop = self.p.prop()?;
                self.p.expect(&Tok::RParen)?;
                Ok(Some(Expr::iverson(prop)))
            }
            "Ex" => {
                self.p.expect_keyword("Ex")?;
                self.p.expect(&Tok::LParen)?;
                let e = self.p.expr()?;
                self.p.expect(&Tok::RParen)?;
                Ok(Some(e))
            }
            _ => Ok(None),
        }
    }

    fn form(&mut self) -> Result<ExForm, ParseError> {
        let mut items = Vec::new();
        loop {
            if matches!(self.p.peek(), Tok::Number(_)) {
                let r = self.p.rational()?;
                if self.p.eat(&Tok::Star) {
                    match self.atom()? {
                        Some(e) => items.push((r, e)),
                        None => return Err(self.p.error_msg("expected `Pr(..)` or `Ex(..)` after `*`")),
                    }
                } else {
                    items.push((r, Expr::Const(1)));
                }
            } else {
                match self.atom()? {
                    Some(e) => items.push((Rational::one(), e)),
                    None => return Err(self.p.error_msg("expected `Pr(..)`, `Ex(..)` or a number")),
                }
            }
            if !self.p.eat(&Tok::Plus) {
                break;
            }
        }
        Ok(ExForm::from_entries(items))
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        self.p.expect(&Tok::LBracket)?;
        let lhs = self.form()?;
        let Some(op) = self.p.cmp_op() else {
            return Err(self.p.error());
        };
        let (coeff, rhs) = if let Some(q) = self.is_param() {
            self.p.ident()?;
            let rhs = if self.p.eat(&Tok::Star) { self.paren_form_or_atom()? } else { ExForm::ex(Expr::Const(1)) };
            (Coeff::Param(q), rhs)
        } else if matches!(self.p.peek(), Tok::Number(_))
            && matches!(self.p.peek_at(1), Tok::Star)
            && matches!(self.p.peek_at(2), Tok::LParen)
        {
            let c = self.p.rational()?;
            self.p.expect(&Tok::Star)?;
            (Coeff::Const(c), self.paren_form_or_atom()?)
        } else {
            (Coeff::one(), self.form()?)
        };
        self.p.expect(&Tok::RBracket)?;
        Ok(Guard::new(lhs, op, coeff, rhs))
    }

    fn paren_form_or_atom(&mut self) -> Result<ExForm, ParseError> {
        if self.p.eat(&Tok::LParen) {
            let f = self.form()?;
            self.p.expect(&Tok::RParen)?;
            Ok(f)
        } else {
            match self.atom()? {
                Some(e) => Ok(ExForm::ex(e)),
                None => Err(self.p.error_msg("expected `Pr(..)`, `Ex(..)` or a parenthesized sum")),
            }
        }
    }

    fn pred(&mut self) -> Result<GPredicate, ParseError> {
        let mut acc = self.prod()?;
        while self.p.eat(&Tok::Plus) {
            acc = acc.add(self.prod()?);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<GPredicate, ParseError> {
        let mut acc = self.factor()?;
        while self.p.eat(&Tok::Star) {
            let rhs = self.factor()?;
            acc = self.multiply(acc, rhs)?;
        }
        Ok(acc)
    }

    /// Products stay inside the grammar only when at most one factor has a
    /// non-constant atom; an observable `Pr(P)` factor turns into a guard.
    fn multiply(&self, a: GPredicate, b: GPredicate) -> Result<GPredicate, ParseError> {
        let mut terms = Vec::new();
        for s in &a.terms {
            for t in &b.terms {
                let mut guards = s.guards.clone();
                guards.extend(t.guards.iter().cloned());
                let atom = match (&s.atom, &t.atom) {
                    (Expr::Const(1), other) | (other, Expr::Const(1)) => other.clone(),
                    (x, y) => {
                        if let Expr::Iverson(p) = x {
                            if self.observable_prop(p) {
                                guards.push(Guard::flag(p, true));
                                terms.push(Term { coef: &s.coef * &t.coef, mono: s.mono.mul(&t.mono), guards, atom: y.clone() });
                                continue;
                            }
                        }
                        if let Expr::Iverson(p) = y {
                            if self.observable_prop(p) {
                                guards.push(Guard::flag(p, true));
                                terms.push(Term { coef: &s.coef * &t.coef, mono: s.mono.mul(&t.mono), guards, atom: x.clone() });
                                continue;
                            }
                        }
                        return Err(self.p.error_msg(format!(
                            "product of Ex({x}) and Ex({y}) is not expressible; only observable Pr(..) factors may be multiplied"
                        )));
                    }
                };
                terms.push(Term { coef: &s.coef * &t.coef, mono: s.mono.mul(&t.mono), guards, atom });
            }
        }
        Ok(GPredicate { terms })
    }

    fn factor(&mut self) -> Result<GPredicate, ParseError> {
        if matches!(self.p.peek(), Tok::Number(_)) {
            return Ok(GPredicate::constant(self.p.rational()?));
        }
        if let Some(q) = self.is_param() {
            self.p.ident()?;
            return Ok(GPredicate::param(&q));
        }
        if matches!(self.p.peek(), Tok::LBracket) {
            let g = self.guard()?;
            return Ok(GPredicate::constant(Rational::one()).guarded(&g));
        }
        if let Some(e) = self.atom()? {
            return Ok(GPredicate::ex(e));
        }
        if self.p.eat(&Tok::LParen) {
            // (1 - Pr(P))
            if matches!(self.p.peek(), Tok::Number(n) if n == "1") && matches!(self.p.peek_at(1), Tok::Minus) {
                self.p.rational()?;
                self.p.expect(&Tok::Minus)?;
                self.p.expect_keyword("Pr")?;
                self.p.expect(&Tok::LParen)?;
                let prop = self.p.prop()?;
                self.p.expect(&Tok::RParen)?;
                self.p.expect(&Tok::RParen)?;
                return Ok(if self.observable_prop(&prop) {
                    GPredicate::constant(Rational::one()).guarded(&Guard::flag(&prop, false))
                } else {
                    GPredicate::pr(Prop::not(prop))
                });
            }
            let inner = self.pred()?;
            self.p.expect(&Tok::RParen)?;
            return Ok(inner);
        }
        Err(self.p.error_msg("expected a number, parameter, `Pr(..)`, `Ex(..)`, guard or `(`"))
    }
}

/// Parses predicate surface syntax. Variables are resolved against `sig`
/// (observability decides how products are encoded) and identifiers in
/// `params` are parameters.
pub fn parse_predicate(src: &str, sig: &Signature, params: &[String]) -> Result<GPredicate, ParseError> {
    let mut p = Parser::new(src)?;
    p.allow_iverson = true;
    let mut pp = PredParser { p, sig, params };
    let f = if matches!(pp.p.peek(), Tok::Eof) { GPredicate::zero() } else { pp.pred()? };
    pp.p.expect(&Tok::Eof)?;
    for v in f.vars() {
        if sig.index_of(&v).is_none() {
            return Err(pp.p.error_msg(format!("undeclared variable `{v}` in predicate")));
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::parse_belief;
    use crate::parser::{parse_expr, parse_prop};
    use crate::rational::ratio;
    use std::sync::Arc;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::new(&[
            VarDecl::observable("inCare"),
            VarDecl::unobservable("d", [0, 1]),
            VarDecl::unobservable("t", [0, 1]),
        ]))
    }

    fn params(q: Rational) -> Params {
        let mut p = Params::new();
        p.insert("q".into(), q);
        p
    }

    #[test]
    fn eval_ex_examples() {
        let s = sig();
        let b = parse_belief(s.clone(), "9/10|inCare=0,d=1,t=0> + 1/10|inCare=0,d=0,t=0>").unwrap();
        assert_eq!(eval_ex(&parse_prop_expr("[d = 1]"), &b), ratio(9, 10));
        assert_eq!(eval_ex(&Expr::Const(1), &b), ratio(1, 1));
        let s2 = Arc::new(Signature::new(&[VarDecl::unobservable("d", [0, 1, 2])]));
        let b2 = parse_belief(s2, "1/2|d=0> + 1/2|d=2>").unwrap();
        assert_eq!(eval_ex(&parse_expr("d * 2").unwrap(), &b2), ratio(2, 1));
    }

    fn parse_prop_expr(src: &str) -> Expr {
        let mut p = Parser::new(src).unwrap();
        p.allow_iverson = true;
        p.expr().unwrap()
    }

    fn invariant(s: &Signature) -> GPredicate {
        parse_predicate("(1 - Pr(inCare)) * Pr(d = 1) + Pr(inCare) * q", s, &["q".to_string()]).unwrap()
    }

    #[test]
    fn invariant_at_in_care_belief_is_q() {
        let s = sig();
        let i = invariant(&s);
        let b = parse_belief(s.clone(), "9/10|inCare=1,d=1,t=0> + 1/10|inCare=1,d=0,t=0>").unwrap();
        assert_eq!(i.eval(&b, &params(ratio(1, 10))).unwrap(), ratio(1, 10));
        let out = parse_belief(s.clone(), "9/10|inCare=0,d=1,t=0> + 1/10|inCare=0,d=0,t=0>").unwrap();
        assert_eq!(i.eval(&out, &params(ratio(1, 10))).unwrap(), ratio(9, 10));
        assert!(i.eval(&b, &Params::new()).is_err());
        assert_eq!(GPredicate::zero().eval(&b, &Params::new()).unwrap(), ratio(0, 1));
    }

    #[test]
    fn guarded_example() {
        let s = sig();
        let f = parse_predicate("[Pr(d = 1) > 1/10] * Pr(d = 1)", &s, &[]).unwrap();
        let b = parse_belief(s.clone(), "9/10|inCare=0,d=1,t=0> + 1/10|inCare=0,d=0,t=0>").unwrap();
        assert_eq!(f.eval(&b, &Params::new()).unwrap(), ratio(9, 10));
    }

    #[test]
    fn printing_round_trips() {
        let s = sig();
        let q = vec!["q".to_string()];
        for src in [
            "(1 - Pr(inCare)) * Pr(d = 1) + Pr(inCare) * q",
            "3/4 * q * [Pr(d = 1) + 1/2 * Ex(d * t) > q * (Pr(t = 1))] * Ex(d + 1)",
            "[Pr(d = 1) <= 2 * (Pr(t = 1) + 1)] * 5",
            "0",
        ] {
            let f = parse_predicate(src, &s, &q).unwrap();
            let again = parse_predicate(&f.to_string(), &s, &q).unwrap();
            assert_eq!(again, f, "{src} printed as {f}");
        }
    }

    #[test]
    fn products_outside_the_grammar_are_rejected() {
        let s = sig();
        assert!(parse_predicate("Pr(d = 1) * Pr(t = 1)", &s, &[]).is_err());
        assert!(parse_predicate("Pr(z = 1)", &s, &[]).is_err());
    }

    #[test]
    fn rewrite_assign_examples() {
        let s = sig();
        let f = parse_predicate("Pr(inCare = 1)", &s, &[]).unwrap();
        let g = rewrite_assign(&f, "inCare", &Expr::Const(0));
        let b = BeliefState::initial(s.clone());
        assert_eq!(g.eval(&b, &Params::new()).unwrap(), ratio(0, 1));
        let f = parse_predicate("Ex(d)", &s, &[]).unwrap();
        assert_eq!(rewrite_assign(&f, "d", &Expr::var("d")), f);
    }

    #[test]
    fn rewrite_sample_example() {
        let s = sig();
        let f = parse_predicate("Pr(d = 1)", &s, &[]).unwrap();
        let spec = SampleSpec::new([(ratio(3, 4), Expr::var("d")), (ratio(1, 4), Expr::Const(0))]);
        let g = rewrite_sample(&f, "d", &spec);
        let b = parse_belief(s.clone(), "9/10|inCare=0,d=1,t=0> + 1/10|inCare=0,d=0,t=0>").unwrap();
        let direct = b.sample_update("d", &spec).unwrap().prob(&parse_prop("d = 1").unwrap());
        assert_eq!(g.eval(&b, &Params::new()).unwrap(), direct);
        assert_eq!(direct, ratio(27, 40));
    }

    #[test]
    fn rewrite_observe_guard_cancels_denominators() {
        let s = sig();
        let q = vec!["q".to_string()];
        let f = parse_predicate("[Pr(d = 1) > q] * 1", &s, &q).unwrap();
        let c = rewrite_observe(&f, "t", 1, &s);
        let expected = parse_predicate("[Ex([d = 1] * [t = 1]) > q * (Pr(t = 1))] * Pr(t = 1)", &s, &q).unwrap();
        assert_eq!(c.numerator, expected);
    }
}
