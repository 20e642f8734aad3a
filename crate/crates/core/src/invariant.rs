//! Checking `I ≥ Φ_F(I)` for candidate loop invariants.
//!
//! The check case-splits on observable facts (which a consistent belief
//! fixes), then looks for a term-by-term domination certificate: every term
//! of `Φ_F(I)` is charged to a term of `I` with the same atom and weaker
//! guards, and the leftover coefficient polynomials must be nonnegative over
//! the parameter box. A guard `[Ex(A) ≤ c·Ex(B)]` may be used to replace an
//! unmatched atom `A` by the bound `c·B`. Failing that, a seeded random
//! search looks for a counterexample.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ast::*;
use crate::belief::{BeliefState, Signature};
use crate::gen::random_belief;
use crate::normal::{normalize_with, NormalizeOptions};
use crate::predicate::*;
use crate::rational::{ratio, Rational};
use crate::semantics::Params;
use crate::wp::{characteristic, WpError, WpOptions};

#[derive(Debug, Clone)]
pub struct InvariantOptions {
    /// At most `2^case_cap` observable cases are explored.
    pub case_cap: u32,
    /// Random beliefs tried by the falsifier.
    pub samples: usize,
    pub seed: u64,
    /// Closed intervals for free parameters; unlisted ones range over [0, 1].
    pub assumptions: BTreeMap<String, (Rational, Rational)>,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions { case_cap: 8, samples: 1000, seed: 0, assumptions: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Proved,
    /// `lhs = I(β)` and `rhs = Φ_F(I)(β)` with `lhs < rhs`.
    Falsified { witness: BeliefState, params: Params, lhs: Rational, rhs: Rational },
    Unknown(String),
}

/// Checks `I ≥ Φ_F(I)` for the loop `lp` (a `while` with loop-free body).
pub fn check_invariant(
    sig: &Arc<Signature>,
    lp: &Statement,
    f: &GPredicate,
    i: &GPredicate,
    opts: &WpOptions,
) -> Result<CheckResult, WpError> {
    let i = normalize_with(&i.bind_params(&opts.params), sig, &opts.normalize);
    let delta = characteristic(sig, lp, f, &i, opts)?;
    Ok(check_domination(sig, &i, &delta, &opts.invariant, &opts.normalize))
}

/// Checks `I ≥ Δ` pointwise on consistent beliefs.
pub fn check_domination(
    sig: &Signature,
    i: &GPredicate,
    delta: &GPredicate,
    opts: &InvariantOptions,
    nopts: &NormalizeOptions,
) -> CheckResult {
    let mut free: BTreeSet<String> = i.params();
    free.extend(delta.params());
    let bounds: Vec<(String, (Rational, Rational))> = free
        .iter()
        .map(|p| (p.clone(), opts.assumptions.get(p).cloned().unwrap_or((Rational::zero(), Rational::one()))))
        .collect();
    let proof = prove(sig, i, delta, &bounds, opts.case_cap, nopts);
    if proof.is_ok() {
        return CheckResult::Proved;
    }
    if let Some(cex) = falsify(sig, i, delta, &bounds, opts) {
        return cex;
    }
    CheckResult::Unknown(proof.unwrap_err())
}

// -- case splitting ---------------------------------------------------------

fn replace_prop_in_expr(e: &Expr, p: &Prop, v: bool) -> Expr {
    match e {
        Expr::Var(_) | Expr::Const(_) => e.clone(),
        Expr::Bin(op, a, b) => Expr::bin(*op, replace_prop_in_expr(a, p, v), replace_prop_in_expr(b, p, v)),
        Expr::Iverson(q) => Expr::iverson(replace_prop(q, p, v)),
    }
}

fn replace_prop(q: &Prop, p: &Prop, v: bool) -> Prop {
    if q == p {
        return Prop::Bool(v);
    }
    match q {
        Prop::Bool(_) => q.clone(),
        Prop::Cmp(op, a, b) => Prop::Cmp(*op, replace_prop_in_expr(a, p, v), replace_prop_in_expr(b, p, v)),
        Prop::Not(a) => Prop::not(replace_prop(a, p, v)),
        Prop::And(a, b) => Prop::and(replace_prop(a, p, v), replace_prop(b, p, v)),
        Prop::Or(a, b) => Prop::or(replace_prop(a, p, v), replace_prop(b, p, v)),
    }
}

fn observable_only(sig: &Signature, vars: &BTreeSet<String>) -> bool {
    !vars.is_empty() && vars.iter().all(|v| sig.kind_of(v) == Some(VarKind::Observable))
}

fn props_in_prop(sig: &Signature, q: &Prop, out: &mut BTreeSet<Prop>) {
    if observable_only(sig, &q.vars()) {
        out.insert(q.clone());
        return;
    }
    match q {
        Prop::Bool(_) => {}
        Prop::Cmp(_, a, b) => {
            props_in_expr(sig, a, out);
            props_in_expr(sig, b, out);
        }
        Prop::Not(a) => props_in_prop(sig, a, out),
        Prop::And(a, b) | Prop::Or(a, b) => {
            props_in_prop(sig, a, out);
            props_in_prop(sig, b, out);
        }
    }
}

fn props_in_expr(sig: &Signature, e: &Expr, out: &mut BTreeSet<Prop>) {
    match e {
        Expr::Var(_) | Expr::Const(_) => {}
        Expr::Bin(_, a, b) => {
            props_in_expr(sig, a, out);
            props_in_expr(sig, b, out);
        }
        Expr::Iverson(q) => props_in_prop(sig, q, out),
    }
}

fn observable_props(sig: &Signature, f: &GPredicate) -> BTreeSet<Prop> {
    let mut out = BTreeSet::new();
    for t in &f.terms {
        props_in_expr(sig, &t.atom, &mut out);
        for g in &t.guards {
            for (_, e) in g.lhs.0.iter().chain(&g.rhs.0) {
                props_in_expr(sig, e, &mut out);
            }
        }
    }
    out
}

/// Observable variables with finite domains that occur in `f`.
fn split_vars(sig: &Signature, f: &GPredicate) -> Vec<(String, Vec<u64>)> {
    f.vars()
        .into_iter()
        .filter(|v| sig.kind_of(v) == Some(VarKind::Observable))
        .filter_map(|v| sig.domain_of(&v).map(|d| (v.clone(), d.to_vec())))
        .collect()
}

/// All cases as substitutions on predicates, or an error when there are too many.
fn cases(sig: &Signature, i: &GPredicate, delta: &GPredicate, cap: u32, nopts: &NormalizeOptions) -> Result<Vec<(GPredicate, GPredicate)>, String> {
    let both = i.clone().add(delta.clone());
    let limit = 1usize << cap;
    let mut out = vec![(i.clone(), delta.clone())];
    for (v, dom) in split_vars(sig, &both) {
        if out.len() * dom.len() > limit {
            return Err(format!("more than {limit} observable cases"));
        }
        out = out
            .iter()
            .flat_map(|(a, b)| {
                let v = v.clone();
                dom.iter().map(move |&c| {
                    let e = Expr::Const(c);
                    (rewrite_assign(a, &v, &e), rewrite_assign(b, &v, &e))
                })
            })
            .collect();
    }
    let mut done = Vec::new();
    while let Some((a, b)) = out.pop() {
        let a = normalize_with(&a, sig, nopts);
        let b = normalize_with(&b, sig, nopts);
        let mut props = observable_props(sig, &a);
        props.extend(observable_props(sig, &b));
        let Some(p) = props.into_iter().next() else {
            done.push((a, b));
            continue;
        };
        if done.len() + out.len() + 2 > limit {
            return Err(format!("more than {limit} observable cases"));
        }
        for v in [true, false] {
            let f = |e: &Expr| replace_prop_in_expr(e, &p, v);
            out.push((a.map(&f), b.map(&f)));
        }
    }
    Ok(done)
}

// -- domination -------------------------------------------------------------

type Poly = BTreeMap<Monomial, Rational>;

fn poly_add(p: &mut Poly, m: &Monomial, c: &Rational) {
    let e = p.entry(m.clone()).or_insert_with(Rational::zero);
    *e += c;
}

/// `p ≥ 0` on the box, decided for multilinear `p` by checking vertices.
fn nonneg_on_box(p: &Poly, bounds: &[(String, (Rational, Rational))]) -> bool {
    let p: Vec<(&Monomial, &Rational)> = p.iter().filter(|(_, c)| !c.is_zero()).collect();
    if p.iter().any(|(m, _)| m.0.values().any(|&k| k > 1)) {
        return false;
    }
    let used: Vec<&(String, (Rational, Rational))> =
        bounds.iter().filter(|(n, _)| p.iter().any(|(m, _)| m.0.contains_key(n))).collect();
    for mask in 0..(1u64 << used.len()) {
        let mut params = Params::new();
        for (k, (n, (lo, hi))) in used.iter().enumerate() {
            params.insert(n.clone(), if mask >> k & 1 == 1 { hi.clone() } else { lo.clone() });
        }
        let mut acc = Rational::zero();
        for (m, c) in &p {
            acc += *c * m.eval(&params).expect("bound parameter");
        }
        if acc.is_negative() {
            return false;
        }
    }
    true
}

fn term_poly(t: &Term) -> Poly {
    let mut p = Poly::new();
    poly_add(&mut p, &t.mono, &t.coef);
    p
}

fn neg(p: &Poly) -> Poly {
    p.iter().map(|(m, c)| (m.clone(), -c)).collect()
}

/// The `I` term a `Δ` term is charged to: same atom, guards a subset,
/// preferring the most specific.
fn host(i: &GPredicate, t: &Term) -> Option<usize> {
    i.terms
        .iter()
        .enumerate()
        .filter(|(_, it)| it.atom == t.atom && it.guards.iter().all(|g| t.guards.contains(g)))
        .max_by_key(|(_, it)| it.guards.len())
        .map(|(k, _)| k)
}

fn dominated(i: &GPredicate, delta: &GPredicate, bounds: &[(String, (Rational, Rational))]) -> Result<(), String> {
    let mut slack: Vec<Poly> = i.terms.iter().map(term_poly).collect();
    for t in &delta.terms {
        let p = term_poly(t);
        if nonneg_on_box(&neg(&p), bounds) {
            continue;
        }
        if !nonneg_on_box(&p, bounds) {
            return Err(format!("coefficient of `{t}` changes sign"));
        }
        let Some(k) = host(i, t) else {
            return Err(format!("no invariant term covers `{t}`"));
        };
        for (m, c) in p {
            poly_add(&mut slack[k], &m, &-c);
        }
    }
    for (k, s) in slack.iter().enumerate() {
        if !nonneg_on_box(s, bounds) {
            return Err(format!("invariant term `{}` does not cover its share", i.terms[k]));
        }
    }
    Ok(())
}

/// An upper bound `Ex(atom) ≤ Σ w·Ex(e)` read off a guard of `t`.
fn upper_bound(t: &Term, g: &Guard) -> Option<(Monomial, Rational, ExForm)> {
    let one_entry = |f: &ExForm| match f.0.as_slice() {
        [(r, e)] if *e == t.atom && r.is_positive() => Some(r.clone()),
        _ => None,
    };
    match g.op {
        CmpOp::Le | CmpOp::Lt => {
            let r = one_entry(&g.lhs)?;
            let (mono, k) = match &g.coeff {
                Coeff::Const(c) => (Monomial::one(), c.clone()),
                Coeff::Param(q) => (Monomial::param(q), Rational::one()),
            };
            Some((mono, k / r, g.rhs.clone()))
        }
        CmpOp::Ge | CmpOp::Gt if g.coeff == Coeff::one() => {
            let r = one_entry(&g.rhs)?;
            Some((Monomial::one(), Rational::one() / r, g.lhs.clone()))
        }
        _ => None,
    }
}

/// Replaces atoms of uncovered `Δ` terms by the upper bounds their own
/// guards provide.
fn apply_guard_bounds(i: &GPredicate, delta: &GPredicate) -> GPredicate {
    let mut out = Vec::new();
    for t in &delta.terms {
        if host(i, t).is_some() || !t.coef.is_positive() {
            out.push(t.clone());
            continue;
        }
        match t.guards.iter().find_map(|g| upper_bound(t, g)) {
            Some((mono, k, form)) => {
                for (w, e) in &form.0 {
                    out.push(Term {
                        coef: &t.coef * &k * w,
                        mono: t.mono.mul(&mono),
                        guards: t.guards.clone(),
                        atom: e.clone(),
                    });
                }
            }
            None => out.push(t.clone()),
        }
    }
    GPredicate { terms: out }
}

fn prove(
    sig: &Signature,
    i: &GPredicate,
    delta: &GPredicate,
    bounds: &[(String, (Rational, Rational))],
    cap: u32,
    nopts: &NormalizeOptions,
) -> Result<(), String> {
    for (ic, dc) in cases(sig, i, delta, cap, nopts)? {
        if dominated(&ic, &dc, bounds).is_ok() {
            continue;
        }
        let relaxed = normalize_with(&apply_guard_bounds(&ic, &dc), sig, nopts);
        dominated(&ic, &relaxed, bounds)?;
    }
    Ok(())
}

// -- falsifier --------------------------------------------------------------

fn grid(lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut out: Vec<Rational> = [ratio(0, 1), ratio(1, 10), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(1, 1)]
        .iter()
        .map(|t| lo + (hi - lo) * t)
        .collect();
    out.dedup();
    out
}

fn falsify(
    sig: &Signature,
    i: &GPredicate,
    delta: &GPredicate,
    bounds: &[(String, (Rational, Rational))],
    opts: &InvariantOptions,
) -> Option<CheckResult> {
    let sig = Arc::new(sig.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let grids: Vec<(String, Vec<Rational>)> = bounds.iter().map(|(n, (lo, hi))| (n.clone(), grid(lo, hi))).collect();
    for _ in 0..opts.samples {
        let b = random_belief(&sig, &mut rng);
        let params: Params = grids.iter().map(|(n, g)| (n.clone(), g.choose(&mut rng).expect("nonempty grid").clone())).collect();
        let (Ok(lhs), Ok(rhs)) = (i.eval(&b, &params), delta.eval(&b, &params)) else {
            continue;
        };
        if lhs < rhs {
            return Some(CheckResult::Falsified { witness: b, params, lhs, rhs });
        }
    }
    None
}
