//! Weakest preexpectations over guarded predicates.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::belief::Signature;
use crate::check::spec_is_distribution;
use crate::invariant::{check_domination, CheckResult, InvariantOptions};
use crate::normal::{normalize_with, NormalizeOptions};
use crate::predicate::*;
use crate::rational::is_probability;
use crate::semantics::Params;

#[derive(Debug, Clone)]
pub struct WpOptions {
    /// Pass terms whose variables the statement leaves untouched straight
    /// through instead of rewriting them.
    pub independence: bool,
    pub normalize: NormalizeOptions,
    /// Parameter values substituted into thresholds and predicates.
    pub params: Params,
    pub invariant: InvariantOptions,
}

impl Default for WpOptions {
    fn default() -> Self {
        WpOptions {
            independence: true,
            normalize: NormalizeOptions::default(),
            params: Params::new(),
            invariant: InvariantOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WpError {
    #[error("`{0}` contains a loop; give it a strategy")]
    NotLoopFree(String),
    #[error("observed variable `{0}` has no finite domain")]
    DomainRequired(String),
    #[error("`{0}` is outside the expressible fragment")]
    NotExpressible(String),
    #[error("loop #{0} has no strategy")]
    StrategyMissing(usize),
    #[error("strategy for loop #{0}, but the program has no such loop")]
    UnknownLoop(usize),
    #[error("invariant for loop #{index} not proved: {reason}")]
    UnprovedInvariant { index: usize, reason: String },
    #[error("unrolling and invariant strategies cannot be mixed in one query")]
    MixedStrategies,
    #[error("not a while loop: `{0}`")]
    NotALoop(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopStrategy {
    Unroll(usize),
    Invariant(GPredicate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BoundTag {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramBound {
    pub predicate: GPredicate,
    pub tag: BoundTag,
}

/// Variables a loop-free statement may change. Observation conditions the
/// whole belief, so it counts every unobservable variable.
pub fn mod_set(sig: &Signature, c: &Statement) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn go(sig: &Signature, c: &Statement, out: &mut BTreeSet<String>) {
        match c {
            Statement::Skip | Statement::Diverge => {}
            Statement::Assign { target, .. } | Statement::Sample { target, .. } => {
                out.insert(target.clone());
            }
            Statement::Observe { target, .. } => {
                out.extend(sig.unobservable_names());
                out.extend(target.iter().cloned());
            }
            Statement::Seq(a, b) => {
                go(sig, a, out);
                go(sig, b, out);
            }
            Statement::If { then_branch, else_branch, .. } | Statement::Infer { then_branch, else_branch, .. } => {
                go(sig, then_branch, out);
                go(sig, else_branch, out);
            }
            Statement::While { body, .. } => go(sig, body, out),
        }
    }
    go(sig, c, &mut out);
    out
}

/// `Some(F)` when `wp(C, F) = F` follows from `C` not touching any variable
/// of `F`.
pub fn simplify_independent(sig: &Signature, c: &Statement, f: &GPredicate) -> Option<GPredicate> {
    if !c.is_loop_free() || c.contains_diverge() {
        return None;
    }
    let m = mod_set(sig, c);
    if f.vars().is_disjoint(&m) {
        Some(f.clone())
    } else {
        None
    }
}

fn threshold_guard(prop: &Prop, t: &Threshold, params: &Params) -> Guard {
    let bound = match &t.bound {
        Bound::Param(q) => match params.get(q) {
            Some(v) => Bound::Const(v.clone()),
            None => t.bound.clone(),
        },
        b => b.clone(),
    };
    Guard::threshold(prop, t.op, &bound)
}

struct Engine<'a> {
    sig: &'a Signature,
    opts: &'a WpOptions,
    loops: Vec<&'a Statement>,
    strategies: Option<&'a BTreeMap<usize, LoopStrategy>>,
}

impl<'a> Engine<'a> {
    fn norm(&self, f: &GPredicate) -> GPredicate {
        normalize_with(f, self.sig, &self.opts.normalize)
    }

    fn wp(&self, c: &'a Statement, f: GPredicate) -> Result<GPredicate, WpError> {
        match c {
            Statement::Skip => Ok(f),
            Statement::Diverge => Ok(GPredicate::zero()),
            Statement::Seq(a, b) => {
                let g = self.wp(b, f)?;
                self.wp(a, g)
            }
            _ if f.is_zero() && !matches!(c, Statement::While { .. }) => Ok(f),
            _ if self.opts.independence && c.is_loop_free() && !c.contains_diverge() => {
                let m = mod_set(self.sig, c);
                let (free, bound): (Vec<Term>, Vec<Term>) = f.terms.into_iter().partition(|t| t.vars().is_disjoint(&m));
                if bound.is_empty() {
                    return Ok(GPredicate { terms: free });
                }
                let g = self.wp_node(c, GPredicate { terms: bound })?;
                Ok(self.norm(&g.add(GPredicate { terms: free })))
            }
            _ => {
                let g = self.wp_node(c, f)?;
                Ok(self.norm(&g))
            }
        }
    }

    fn wp_node(&self, c: &'a Statement, f: GPredicate) -> Result<GPredicate, WpError> {
        Ok(match c {
            Statement::Skip | Statement::Diverge | Statement::Seq(..) => self.wp(c, f)?,
            Statement::Assign { target, value } => rewrite_assign(&f, target, value),
            Statement::Sample { target, spec } => {
                if !spec_is_distribution(spec) {
                    return Err(WpError::NotExpressible(statement_head(c)));
                }
                rewrite_sample(&f, target, spec)
            }
            Statement::Observe { target, source } => {
                let dom = self.sig.domain_of(source).ok_or_else(|| WpError::DomainRequired(source.clone()))?;
                let mut acc = GPredicate::zero();
                for &v in dom {
                    let g = match target {
                        Some(y) => rewrite_assign(&f, y, &Expr::Const(v)),
                        None => f.clone(),
                    };
                    acc = acc.add(rewrite_observe(&g, source, v, self.sig).numerator);
                }
                acc
            }
            Statement::If { guard, then_branch, else_branch } => {
                let a = self.wp(then_branch, f.clone())?;
                let b = self.wp(else_branch, f)?;
                a.guarded(&Guard::flag(guard, true)).add(b.guarded(&Guard::flag(guard, false)))
            }
            Statement::Infer { prop, threshold, then_branch, else_branch } => {
                if let Bound::Const(r) = &threshold.bound {
                    if !is_probability(r) {
                        return Err(WpError::NotExpressible(statement_head(c)));
                    }
                }
                let g = threshold_guard(prop, threshold, &self.opts.params);
                let a = self.wp(then_branch, f.clone())?;
                let b = self.wp(else_branch, f)?;
                a.guarded(&g).add(b.guarded(&g.negate()))
            }
            Statement::While { guard, body } => self.wp_loop(c, guard, body, f)?,
        })
    }

    fn phi(&self, guard: &Prop, body: &'a Statement, f: &GPredicate, x: GPredicate) -> Result<GPredicate, WpError> {
        let inner = self.wp(body, x)?;
        Ok(self.norm(&f.guarded(&Guard::flag(guard, false)).add(inner.guarded(&Guard::flag(guard, true)))))
    }

    fn wp_loop(&self, c: &'a Statement, guard: &Prop, body: &'a Statement, f: GPredicate) -> Result<GPredicate, WpError> {
        let (Some(strategies), Some(index)) = (self.strategies, self.loops.iter().position(|l| std::ptr::eq(*l, c)))
        else {
            return Err(WpError::NotLoopFree(statement_head(c)));
        };
        match strategies.get(&index).ok_or(WpError::StrategyMissing(index))? {
            LoopStrategy::Unroll(n) => {
                let mut x = GPredicate::zero();
                for _ in 0..*n {
                    x = self.phi(guard, body, &f, x)?;
                }
                Ok(x)
            }
            LoopStrategy::Invariant(i) => {
                let i = self.norm(&i.bind_params(&self.opts.params));
                let delta = self.phi(guard, body, &f, i.clone())?;
                match check_domination(self.sig, &i, &delta, &self.opts.invariant, &self.opts.normalize) {
                    CheckResult::Proved => Ok(i),
                    CheckResult::Falsified { witness, lhs, rhs, .. } => Err(WpError::UnprovedInvariant {
                        index,
                        reason: format!("falsified at {witness}: I = {lhs} < {rhs} = step"),
                    }),
                    CheckResult::Unknown(reason) => Err(WpError::UnprovedInvariant { index, reason }),
                }
            }
        }
    }
}

fn loop_free_engine<'a>(sig: &'a Signature, opts: &'a WpOptions) -> Engine<'a> {
    Engine { sig, opts, loops: Vec::new(), strategies: None }
}

/// `wp(C, F)` for loop-free `C`.
pub fn wp_loopfree(sig: &Signature, c: &Statement, f: &GPredicate, opts: &WpOptions) -> Result<GPredicate, WpError> {
    let e = loop_free_engine(sig, opts);
    let f = e.norm(&f.bind_params(&opts.params));
    e.wp(c, f)
}

fn as_loop(c: &Statement) -> Result<(&Prop, &Statement), WpError> {
    match c {
        Statement::While { guard, body } => Ok((guard, body)),
        other => Err(WpError::NotALoop(statement_head(other))),
    }
}

/// `Φ_F(X) = [¬P]·F + [P]·wp(body, X)` for a loop with loop-free body.
pub fn characteristic(
    sig: &Signature,
    lp: &Statement,
    f: &GPredicate,
    x: &GPredicate,
    opts: &WpOptions,
) -> Result<GPredicate, WpError> {
    let (guard, body) = as_loop(lp)?;
    let e = loop_free_engine(sig, opts);
    let f = e.norm(&f.bind_params(&opts.params));
    let x = e.norm(&x.bind_params(&opts.params));
    e.phi(guard, body, &f, x)
}

/// `Φ_F^k(0)` for `k = 1..=n`.
pub fn wp_unroll_sequence(
    sig: &Signature,
    lp: &Statement,
    f: &GPredicate,
    n: usize,
    opts: &WpOptions,
) -> Result<Vec<GPredicate>, WpError> {
    let (guard, body) = as_loop(lp)?;
    let e = loop_free_engine(sig, opts);
    let f = e.norm(&f.bind_params(&opts.params));
    let mut x = GPredicate::zero();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        x = e.phi(guard, body, &f, x)?;
        out.push(x.clone());
    }
    Ok(out)
}

/// `Φ_F^n(0)`, the wp of the loop cut off after `n` iterations.
pub fn wp_unroll(sig: &Signature, lp: &Statement, f: &GPredicate, n: usize, opts: &WpOptions) -> Result<GPredicate, WpError> {
    Ok(wp_unroll_sequence(sig, lp, f, n, opts)?.pop().unwrap_or_else(GPredicate::zero))
}

/// Pushes `F` back through the whole program. Loops are numbered in
/// pre-order and each needs a strategy; unrolling gives a lower bound and a
/// proved invariant an upper bound.
pub fn bound_program(
    prog: &Program,
    f: &GPredicate,
    strategies: &BTreeMap<usize, LoopStrategy>,
    opts: &WpOptions,
) -> Result<ProgramBound, WpError> {
    let sig = Signature::of_program(prog);
    let loops = prog.body.loops();
    if let Some(&k) = strategies.keys().find(|&&k| k >= loops.len()) {
        return Err(WpError::UnknownLoop(k));
    }
    if let Some(k) = (0..loops.len()).find(|k| !strategies.contains_key(k)) {
        return Err(WpError::StrategyMissing(k));
    }
    let unroll = strategies.values().filter(|s| matches!(s, LoopStrategy::Unroll(_))).count();
    let tag = match (unroll, strategies.len()) {
        (_, 0) => BoundTag::Exact,
        (u, n) if u == n => BoundTag::LowerBound,
        (0, _) => BoundTag::UpperBound,
        _ => return Err(WpError::MixedStrategies),
    };
    let e = Engine { sig: &sig, opts, loops, strategies: Some(strategies) };
    let f = e.norm(&f.bind_params(&opts.params));
    let predicate = e.wp(&prog.body, f)?;
    Ok(ProgramBound { predicate, tag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{parse_belief, BeliefState};
    use crate::check::load;
    use crate::rational::ratio;
    use crate::semantics::exec_from_belief;
    use std::sync::Arc;

    const TREATMENT: &str = "param q;
uvar d in {0, 1};
uvar t in {0, 1};
ovar inCare;
d = sample(0.9|1> + 0.1|0>);
inCare = true;
while(inCare){
  infer(p(d = 1) > q) {
    d = sample(0.75|d> + 0.25|0>);
    t = sample(0.95|d> + 0.05|1-d>);
    observe t;
  } else {
    inCare = false;
  }
}
";

    fn treatment() -> (Program, Arc<Signature>) {
        let p = load(TREATMENT).unwrap();
        let sig = Signature::of_program(&p);
        (p, sig)
    }

    fn pred(sig: &Signature, src: &str) -> GPredicate {
        parse_predicate(src, sig, &["q".to_string()]).unwrap()
    }

    fn q_tenth() -> WpOptions {
        let mut o = WpOptions::default();
        o.params.insert("q".into(), ratio(1, 10));
        o
    }

    #[test]
    fn skip_and_sample() {
        let (_, sig) = treatment();
        let f = pred(&sig, "Pr(d = 1)");
        assert_eq!(wp_loopfree(&sig, &Statement::Skip, &f, &WpOptions::default()).unwrap(), f);
        let s = crate::parser::parse_statement("d = sample(0.9|1> + 0.1|0>);").unwrap();
        let w = wp_loopfree(&sig, &s, &f, &WpOptions::default()).unwrap();
        assert_eq!(w, GPredicate::constant(ratio(9, 10)));
    }

    #[test]
    fn loop_body_matches_execution() {
        let (p, sig) = treatment();
        let Statement::While { body, .. } = p.body.loops()[0] else { unreachable!() };
        let f = pred(&sig, "Pr(d = 1)");
        let opts = q_tenth();
        let w = wp_loopfree(&sig, body, &f, &opts).unwrap();
        let b = parse_belief(sig.clone(), "9/10|d=1,t=0,inCare=1,_obs0=0> + 1/10|d=0,t=0,inCare=1,_obs0=0>").unwrap();
        let dist = exec_from_belief(body, &b, 0, &opts.params).unwrap().marginal();
        let expected = dist.expectation(|b2| f.eval(b2, &opts.params)).unwrap();
        assert_eq!(w.eval(&b, &opts.params).unwrap(), expected);
    }

    #[test]
    fn mod_sets() {
        let (_, sig) = treatment();
        assert_eq!(mod_set(&sig, &Statement::assign("x", Expr::Const(1))), BTreeSet::from(["x".to_string()]));
        assert_eq!(
            mod_set(&sig, &Statement::observe("inCare", "t")),
            BTreeSet::from(["d".to_string(), "t".to_string(), "inCare".to_string()])
        );
        assert!(mod_set(&sig, &Statement::Skip).is_empty());
    }

    #[test]
    fn independent_term_passes_through() {
        let (p, sig) = treatment();
        let Statement::While { body, .. } = p.body.loops()[0] else { unreachable!() };
        let Statement::Infer { then_branch, .. } = &**body else { unreachable!() };
        let f = pred(&sig, "Pr(inCare)");
        assert_eq!(simplify_independent(&sig, then_branch, &f), Some(f.clone()));
        let off = WpOptions { independence: false, ..WpOptions::default() };
        assert_eq!(wp_loopfree(&sig, then_branch, &f, &off).unwrap(), normalize_with(&f, &sig, &off.normalize));
    }

    #[test]
    fn unrolling_is_monotone_and_below_q() {
        let (p, sig) = treatment();
        let lp = p.body.loops()[0];
        let f = pred(&sig, "Pr(d = 1)");
        let opts = q_tenth();
        let seq = wp_unroll_sequence(&sig, lp, &f, 8, &opts).unwrap();
        let b = parse_belief(sig.clone(), "9/10|d=1,t=0,inCare=1,_obs0=0> + 1/10|d=0,t=0,inCare=1,_obs0=0>").unwrap();
        let mut last = ratio(0, 1);
        for (k, x) in seq.iter().enumerate() {
            let v = x.eval(&b, &opts.params).unwrap();
            assert!(v >= last && v <= ratio(1, 10), "n = {}: {v}", k + 1);
            let op = crate::semantics::exec_alt(lp, &b, k + 1, &opts.params).unwrap();
            assert_eq!(v, op.expectation(|b2| f.eval(b2, &opts.params)).unwrap());
            last = v;
        }
    }

    #[test]
    fn whole_program_with_invariant() {
        let (p, sig) = treatment();
        let f = pred(&sig, "Pr(d = 1)");
        let inv = pred(&sig, "(1 - Pr(inCare)) * Pr(d = 1) + Pr(inCare) * q");
        let strategies = BTreeMap::from([(0, LoopStrategy::Invariant(inv))]);
        let opts = q_tenth();
        let r = bound_program(&p, &f, &strategies, &opts).unwrap();
        assert_eq!(r.tag, BoundTag::UpperBound);
        let b0 = BeliefState::initial(sig);
        assert_eq!(r.predicate.eval(&b0, &opts.params).unwrap(), ratio(1, 10));
    }

    #[test]
    fn strategy_errors() {
        let (p, sig) = treatment();
        let f = pred(&sig, "Pr(d = 1)");
        let opts = q_tenth();
        assert_eq!(bound_program(&p, &f, &BTreeMap::new(), &opts), Err(WpError::StrategyMissing(0)));
        let bad = BTreeMap::from([(0, LoopStrategy::Invariant(GPredicate::zero()))]);
        assert!(matches!(bound_program(&p, &f, &bad, &opts), Err(WpError::UnprovedInvariant { index: 0, .. })));
        assert!(matches!(wp_loopfree(&sig, &p.body, &f, &opts), Err(WpError::NotLoopFree(_))));
    }
}
