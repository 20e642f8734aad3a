//! Exact execution under the two operational semantics.
//!
//! Full configurations `(C, β, σ, p)` carry the true assignment: sampling
//! branches on the drawn value and observation is deterministic. Belief-only
//! configurations `⟨C, β, p⟩` sample deterministically and branch on the
//! observed value instead.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::belief::*;
use crate::rational::{nat, Rational};

pub type Params = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("guard `{0}` is not determined by an inconsistent belief state")]
    InconsistentBelief(String),
    #[error("true assignment is not in the support of the belief")]
    TruthNotInSupport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    /// `None` is the terminated continuation ⊤.
    pub cont: Option<Statement>,
    pub belief: BeliefState,
    pub truth: Assignment,
    pub pathprob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltConfiguration {
    pub cont: Option<Statement>,
    pub belief: BeliefState,
    pub pathprob: Rational,
}

fn threshold_holds(r: &Rational, t: &Threshold, params: &Params) -> Result<bool, ExecError> {
    let bound = match &t.bound {
        Bound::Const(c) => c.clone(),
        Bound::Param(p) => params.get(p).cloned().ok_or_else(|| ExecError::UnboundParameter(p.clone()))?,
    };
    Ok(t.op.holds(r, &bound))
}

/// Truth value of an observable guard on a consistent belief.
fn belief_guard(b: &BeliefState, p: &Prop) -> Result<bool, ExecError> {
    let r = b.prob(p);
    if r.is_one() {
        Ok(true)
    } else if r.is_zero() {
        Ok(false)
    } else {
        Err(ExecError::InconsistentBelief(p.to_string()))
    }
}

/// Probability of each sampled value, ascending, with zero-weight values dropped.
fn sample_weights(sig: &Signature, s: &Assignment, spec: &SampleSpec) -> BTreeMap<u64, Rational> {
    let mut m: BTreeMap<u64, Rational> = BTreeMap::new();
    for b in &spec.branches {
        *m.entry(eval_expr(sig, s, &b.value)).or_insert_with(Rational::zero) += &b.weight;
    }
    m.retain(|_, w| !w.is_zero());
    m
}

fn observe_update(b: &BeliefState, target: &Option<String>, source: &str, c: u64) -> Result<BeliefState, BeliefError> {
    let conditioned = b.condition(source, c)?;
    match target {
        Some(y) => conditioned.assign_update(y, &Expr::Const(c)),
        None => Ok(conditioned),
    }
}

fn unroll_while(guard: &Prop, body: &Statement) -> Statement {
    Statement::if_then_else(
        guard.clone(),
        Statement::Seq(Box::new(body.clone()), Box::new(Statement::while_loop(guard.clone(), body.clone()))),
        Statement::Skip,
    )
}

/// One small step of the full semantics. Successor order is ascending in the
/// sampled value.
pub fn step(cfg: &Configuration, params: &Params) -> Result<Vec<Configuration>, ExecError> {
    let Some(c) = &cfg.cont else {
        return Ok(vec![cfg.clone()]);
    };
    let sig = cfg.belief.signature().clone();
    let done = |belief: BeliefState, truth: Assignment, pathprob: Rational| Configuration {
        cont: None,
        belief,
        truth,
        pathprob,
    };
    let goto = |cont: Statement| Configuration {
        cont: Some(cont),
        belief: cfg.belief.clone(),
        truth: cfg.truth.clone(),
        pathprob: cfg.pathprob.clone(),
    };
    Ok(match c {
        Statement::Skip => vec![done(cfg.belief.clone(), cfg.truth.clone(), cfg.pathprob.clone())],
        Statement::Diverge => vec![],
        Statement::Assign { target, value } => {
            let i = sig.index_of(target).ok_or_else(|| BeliefError::UnknownVariable(target.clone()))?;
            let belief = cfg.belief.assign_update(target, value)?;
            let truth = cfg.truth.with(i, eval_expr(&sig, &cfg.truth, value));
            vec![done(belief, truth, cfg.pathprob.clone())]
        }
        Statement::Sample { target, spec } => {
            let i = sig.index_of(target).ok_or_else(|| BeliefError::UnknownVariable(target.clone()))?;
            let belief = cfg.belief.sample_update(target, spec)?;
            sample_weights(&sig, &cfg.truth, spec)
                .into_iter()
                .map(|(v, q)| done(belief.clone(), cfg.truth.with(i, v), &cfg.pathprob * q))
                .collect()
        }
        Statement::Observe { target, source } => {
            let c = cfg.truth.get(&sig, source);
            let belief = observe_update(&cfg.belief, target, source, c).map_err(|e| match e {
                BeliefError::ZeroProbabilityObservation { .. } => ExecError::TruthNotInSupport,
                other => other.into(),
            })?;
            let truth = match target {
                Some(y) => cfg.truth.with(sig.index_of(y).ok_or_else(|| BeliefError::UnknownVariable(y.clone()))?, c),
                None => cfg.truth.clone(),
            };
            vec![done(belief, truth, cfg.pathprob.clone())]
        }
        Statement::If { guard, then_branch, else_branch } => {
            let branch = if eval_prop(&sig, &cfg.truth, guard) { then_branch } else { else_branch };
            vec![goto((**branch).clone())]
        }
        Statement::While { guard, body } => vec![goto(unroll_while(guard, body))],
        Statement::Infer { prop, threshold, then_branch, else_branch } => {
            let r = cfg.belief.prob(prop);
            let branch = if threshold_holds(&r, threshold, params)? { then_branch } else { else_branch };
            vec![goto((**branch).clone())]
        }
        Statement::Seq(first, rest) => {
            let head = Configuration { cont: Some((**first).clone()), ..cfg.clone() };
            step(&head, params)?
                .into_iter()
                .map(|mut s| {
                    s.cont = Some(match s.cont.take() {
                        None => (**rest).clone(),
                        Some(c1) => Statement::Seq(Box::new(c1), rest.clone()),
                    });
                    s
                })
                .collect()
        }
    })
}

/// One small step of the belief-only semantics. Successor order is ascending
/// in the observed value.
pub fn step_alt(cfg: &AltConfiguration, params: &Params) -> Result<Vec<AltConfiguration>, ExecError> {
    let Some(c) = &cfg.cont else {
        return Ok(vec![cfg.clone()]);
    };
    let done = |belief: BeliefState, pathprob: Rational| AltConfiguration { cont: None, belief, pathprob };
    let goto = |cont: Statement| AltConfiguration {
        cont: Some(cont),
        belief: cfg.belief.clone(),
        pathprob: cfg.pathprob.clone(),
    };
    Ok(match c {
        Statement::Skip => vec![done(cfg.belief.clone(), cfg.pathprob.clone())],
        Statement::Diverge => vec![],
        Statement::Assign { target, value } => {
            vec![done(cfg.belief.assign_update(target, value)?, cfg.pathprob.clone())]
        }
        Statement::Sample { target, spec } => {
            vec![done(cfg.belief.sample_update(target, spec)?, cfg.pathprob.clone())]
        }
        Statement::Observe { target, source } => {
            let mut out = Vec::new();
            for (v, q) in cfg.belief.marginal(source)? {
                let belief = observe_update(&cfg.belief, target, source, v)?;
                out.push(done(belief, &cfg.pathprob * q));
            }
            out
        }
        Statement::If { guard, then_branch, else_branch } => {
            let branch = if belief_guard(&cfg.belief, guard)? { then_branch } else { else_branch };
            vec![goto((**branch).clone())]
        }
        Statement::While { guard, body } => vec![goto(unroll_while(guard, body))],
        Statement::Infer { prop, threshold, then_branch, else_branch } => {
            let r = cfg.belief.prob(prop);
            let branch = if threshold_holds(&r, threshold, params)? { then_branch } else { else_branch };
            vec![goto((**branch).clone())]
        }
        Statement::Seq(first, rest) => {
            let head = AltConfiguration { cont: Some((**first).clone()), ..cfg.clone() };
            step_alt(&head, params)?
                .into_iter()
                .map(|mut s| {
                    s.cont = Some(match s.cont.take() {
                        None => (**rest).clone(),
                        Some(c1) => Statement::Seq(Box::new(c1), rest.clone()),
                    });
                    s
                })
                .collect()
        }
    })
}

/// Terminal sub-distribution over (belief, truth) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalDistribution {
    pub entries: BTreeMap<(BeliefState, Assignment), Rational>,
    /// Mass that did not terminate within the fuel bound.
    pub residual: Rational,
}

impl TerminalDistribution {
    pub fn marginal(&self) -> BeliefDistribution {
        let mut entries: BTreeMap<BeliefState, Rational> = BTreeMap::new();
        for ((b, _), p) in &self.entries {
            *entries.entry(b.clone()).or_insert_with(Rational::zero) += p;
        }
        BeliefDistribution { entries, residual: self.residual.clone() }
    }

    pub fn terminated_mass(&self) -> Rational {
        self.entries.values().cloned().sum()
    }
}

/// Terminal sub-distribution over belief states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefDistribution {
    pub entries: BTreeMap<BeliefState, Rational>,
    pub residual: Rational,
}

impl BeliefDistribution {
    pub fn terminated_mass(&self) -> Rational {
        self.entries.values().cloned().sum()
    }

    /// Σ_β' P(β')·g(β') over terminated beliefs.
    pub fn expectation<E>(&self, mut g: impl FnMut(&BeliefState) -> Result<Rational, E>) -> Result<Rational, E> {
        let mut acc = Rational::zero();
        for (b, p) in &self.entries {
            acc += p * g(b)?;
        }
        Ok(acc)
    }
}

/// Worklist discipline used by the exhaustive explorers. Results do not
/// depend on it; the alternatives exist so tests can check that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// Breadth-first, merging identical configurations level by level.
    #[default]
    Merged,
    /// Depth-first without merging, visiting successors in reverse order.
    DepthFirstReversed,
}

/// Computes `[C]^{β0,σ0}` with every loop bounded to `fuel` iterations.
pub fn explore(
    c: &Statement,
    beta0: &BeliefState,
    sigma0: &Assignment,
    fuel: usize,
    params: &Params,
) -> Result<TerminalDistribution, ExecError> {
    if beta0.mass(sigma0).is_zero() {
        return Err(ExecError::TruthNotInSupport);
    }
    run_full(c, vec![(beta0.clone(), sigma0.clone(), Rational::one())], fuel, params, Order::Merged)
}

/// `[C]^{β0}(β, σ) = Σ_σ0 β0(σ0)·[C]^{β0,σ0}(β, σ)`.
pub fn exec_from_belief(
    c: &Statement,
    beta0: &BeliefState,
    fuel: usize,
    params: &Params,
) -> Result<TerminalDistribution, ExecError> {
    exec_from_belief_ordered(c, beta0, fuel, params, Order::Merged)
}

pub fn exec_from_belief_ordered(
    c: &Statement,
    beta0: &BeliefState,
    fuel: usize,
    params: &Params,
    order: Order,
) -> Result<TerminalDistribution, ExecError> {
    let roots = beta0.support().map(|(s, p)| (beta0.clone(), s.clone(), p.clone())).collect();
    run_full(c, roots, fuel, params, order)
}

fn run_full(
    c: &Statement,
    roots: Vec<(BeliefState, Assignment, Rational)>,
    fuel: usize,
    params: &Params,
    order: Order,
) -> Result<TerminalDistribution, ExecError> {
    let program = c.unroll_loops(fuel);
    let mut entries: BTreeMap<(BeliefState, Assignment), Rational> = BTreeMap::new();
    let total: Rational = roots.iter().map(|r| r.2.clone()).sum();
    let init = roots.into_iter().map(|(belief, truth, pathprob)| Configuration {
        cont: Some(program.clone()),
        belief,
        truth,
        pathprob,
    });
    let mut finish = |cfg: Configuration| {
        *entries.entry((cfg.belief, cfg.truth)).or_insert_with(Rational::zero) += cfg.pathprob;
    };
    match order {
        Order::Merged => {
            let mut frontier: BTreeMap<(Statement, BeliefState, Assignment), Rational> = BTreeMap::new();
            for cfg in init {
                frontier.insert((cfg.cont.unwrap(), cfg.belief, cfg.truth), cfg.pathprob);
            }
            while !frontier.is_empty() {
                let mut next: BTreeMap<(Statement, BeliefState, Assignment), Rational> = BTreeMap::new();
                for ((cont, belief, truth), pathprob) in frontier {
                    let cfg = Configuration { cont: Some(cont), belief, truth, pathprob };
                    for s in step(&cfg, params)? {
                        match s.cont {
                            None => finish(s),
                            Some(k) => {
                                *next.entry((k, s.belief, s.truth)).or_insert_with(Rational::zero) += s.pathprob
                            }
                        }
                    }
                }
                frontier = next;
            }
        }
        Order::DepthFirstReversed => {
            let mut stack: Vec<Configuration> = init.collect();
            while let Some(cfg) = stack.pop() {
                for s in step(&cfg, params)? {
                    if s.cont.is_none() {
                        finish(s);
                    } else {
                        stack.push(s);
                    }
                }
            }
        }
    }
    let terminated: Rational = entries.values().cloned().sum();
    Ok(TerminalDistribution { entries, residual: total - terminated })
}

/// `⟦C⟧^{β0}` under the belief-only semantics, loops bounded by `fuel`.
pub fn exec_alt(c: &Statement, beta0: &BeliefState, fuel: usize, params: &Params) -> Result<BeliefDistribution, ExecError> {
    let program = c.unroll_loops(fuel);
    let mut entries: BTreeMap<BeliefState, Rational> = BTreeMap::new();
    let mut frontier: VecDeque<AltConfiguration> = VecDeque::new();
    frontier.push_back(AltConfiguration { cont: Some(program), belief: beta0.clone(), pathprob: Rational::one() });
    while let Some(cfg) = frontier.pop_front() {
        for s in step_alt(&cfg, params)? {
            if s.cont.is_none() {
                *entries.entry(s.belief).or_insert_with(Rational::zero) += s.pathprob;
            } else {
                frontier.push_back(s);
            }
        }
    }
    let terminated: Rational = entries.values().cloned().sum();
    Ok(BeliefDistribution { entries, residual: Rational::one() - terminated })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub belief: BeliefState,
    pub truth: Assignment,
    pub terminated: bool,
    pub steps: usize,
}

/// Exact uniform draw from {0, 1/2^64, ..., (2^64-1)/2^64}.
fn uniform(rng: &mut ChaCha8Rng) -> Rational {
    let k: u64 = rng.gen();
    Rational::new(nat(k).to_integer(), num_bigint::BigInt::from(1u8) << 64)
}

fn pick<T>(rng: &mut ChaCha8Rng, items: Vec<(T, Rational)>) -> T {
    let total: Rational = items.iter().map(|(_, w)| w.clone()).sum();
    let u = uniform(rng) * total;
    let mut acc = Rational::zero();
    let n = items.len();
    for (i, (item, w)) in items.into_iter().enumerate() {
        acc += w;
        if u < acc || i + 1 == n {
            return item;
        }
    }
    unreachable!("pick from an empty list")
}

/// One Monte-Carlo run: draws σ0 from β0 and then follows the full
/// semantics, choosing among successors by their path probability.
pub fn simulate(
    c: &Statement,
    beta0: &BeliefState,
    seed: u64,
    max_steps: usize,
    params: &Params,
) -> Result<Trajectory, ExecError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_with(c, beta0, &mut rng, max_steps, params)
}

pub fn simulate_with(
    c: &Statement,
    beta0: &BeliefState,
    rng: &mut ChaCha8Rng,
    max_steps: usize,
    params: &Params,
) -> Result<Trajectory, ExecError> {
    let truth = pick(rng, beta0.support().map(|(s, p)| (s.clone(), p.clone())).collect());
    let mut cfg = Configuration { cont: Some(c.clone()), belief: beta0.clone(), truth, pathprob: Rational::one() };
    let mut steps = 0;
    while cfg.cont.is_some() {
        if steps >= max_steps {
            return Ok(Trajectory { belief: cfg.belief, truth: cfg.truth, terminated: false, steps });
        }
        let succ = step(&cfg, params)?;
        steps += 1;
        if succ.is_empty() {
            // diverge
            return Ok(Trajectory { belief: cfg.belief, truth: cfg.truth, terminated: false, steps });
        }
        let weighted = succ.into_iter().map(|s| {
            let w = s.pathprob.clone();
            (s, w)
        });
        cfg = pick(rng, weighted.collect());
        cfg.pathprob = Rational::one();
    }
    Ok(Trajectory { belief: cfg.belief, truth: cfg.truth, terminated: true, steps })
}

// ---------------------------------------------------------------------------
// JSON reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalEntryJson {
    pub belief: BeliefJson,
    pub truth: BTreeMap<String, u64>,
    #[serde(with = "crate::rational::serde_fraction")]
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefEntryJson {
    pub belief: BeliefJson,
    #[serde(with = "crate::rational::serde_fraction")]
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalJson {
    pub terminals: Vec<TerminalEntryJson>,
    #[serde(with = "crate::rational::serde_fraction")]
    pub residual: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefDistributionJson {
    pub beliefs: Vec<BeliefEntryJson>,
    #[serde(with = "crate::rational::serde_fraction")]
    pub residual: Rational,
}

impl TerminalDistribution {
    pub fn to_json(&self) -> TerminalJson {
        TerminalJson {
            terminals: self
                .entries
                .iter()
                .map(|((b, s), p)| TerminalEntryJson {
                    belief: b.to_json(),
                    truth: s.to_map(b.signature()),
                    prob: p.clone(),
                })
                .collect(),
            residual: self.residual.clone(),
        }
    }
}

impl BeliefDistribution {
    pub fn to_json(&self) -> BeliefDistributionJson {
        BeliefDistributionJson {
            beliefs: self
                .entries
                .iter()
                .map(|(b, p)| BeliefEntryJson { belief: b.to_json(), prob: p.clone() })
                .collect(),
            residual: self.residual.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::parse_belief;
    use crate::check::load;
    use crate::parser::parse_prop;
    use crate::rational::ratio;
    use std::sync::Arc;

    fn d_sig() -> Arc<Signature> {
        Arc::new(Signature::new(&[VarDecl::unobservable("d", [0, 1])]))
    }

    fn cfg(c: Statement, b: &BeliefState, s: Assignment) -> Configuration {
        Configuration { cont: Some(c), belief: b.clone(), truth: s, pathprob: Rational::one() }
    }

    #[test]
    fn skip_steps_to_terminal() {
        let b = BeliefState::initial(d_sig());
        let out = step(&cfg(Statement::Skip, &b, Assignment(vec![0])), &Params::new()).unwrap();
        assert_eq!(out, vec![Configuration { cont: None, ..cfg(Statement::Skip, &b, Assignment(vec![0])) }]);
    }

    #[test]
    fn sample_branches_on_truth() {
        let b = BeliefState::initial(d_sig());
        let s = crate::parser::parse_statement("d = sample(0.9|1> + 0.1|0>);").unwrap();
        let out = step(&cfg(s, &b, Assignment(vec![0])), &Params::new()).unwrap();
        assert_eq!(out.len(), 2);
        // ascending sampled value
        assert_eq!(out[0].truth, Assignment(vec![0]));
        assert_eq!(out[0].pathprob, ratio(1, 10));
        assert_eq!(out[1].pathprob, ratio(9, 10));
        let expected = parse_belief(d_sig(), "9/10|d=1> + 1/10|d=0>").unwrap();
        assert!(out.iter().all(|c| c.belief == expected));
    }

    #[test]
    fn while_unfolds_once() {
        let b = BeliefState::initial(d_sig());
        let w = Statement::while_loop(Prop::Bool(true), Statement::Skip);
        let out = step(&cfg(w.clone(), &b, Assignment(vec![0])), &Params::new()).unwrap();
        assert_eq!(
            out[0].cont,
            Some(Statement::if_then_else(
                Prop::Bool(true),
                Statement::Seq(Box::new(Statement::Skip), Box::new(w)),
                Statement::Skip
            ))
        );
    }

    #[test]
    fn alt_semantics_examples() {
        let sig = Arc::new(Signature::new(&[VarDecl::unobservable("x", [0, 1]), VarDecl::observable("y")]));
        let b = parse_belief(sig.clone(), "1/2|x=0,y=0> + 1/2|x=1,y=0>").unwrap();
        let obs = Statement::Observe { target: None, source: "x".into() };
        let out = step_alt(&AltConfiguration { cont: Some(obs), belief: b.clone(), pathprob: Rational::one() }, &Params::new())
            .unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].pathprob, ratio(1, 2));
        assert_eq!(out[0].belief, parse_belief(sig.clone(), "1|x=0,y=0>").unwrap());
        assert_eq!(out[1].belief, parse_belief(sig.clone(), "1|x=1,y=0>").unwrap());

        let f = SampleSpec::new([(ratio(1, 1), Expr::Const(1))]);
        let out = step_alt(
            &AltConfiguration { cont: Some(Statement::sample("x", f.clone())), belief: b.clone(), pathprob: Rational::one() },
            &Params::new(),
        )
        .unwrap();
        assert_eq!(out, vec![AltConfiguration { cont: None, belief: b.sample_update("x", &f).unwrap(), pathprob: Rational::one() }]);

        let d = exec_alt(&Statement::Skip, &b, 0, &Params::new()).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[&b], Rational::one());
    }

    const TREATMENT_STEP: &str = "uvar d in {0,1}; uvar t in {0,1};
d = sample(0.9|1> + 0.1|0>);
d = sample(0.75|d> + 0.25|0>);
t = sample(0.95|d> + 0.05|1-d>);
observe t;";

    #[test]
    fn treatment_step_branch_probabilities() {
        let prog = load(TREATMENT_STEP).unwrap();
        let sig = Signature::of_program(&prog);
        let b0 = BeliefState::initial(sig);
        let dist = exec_from_belief(&prog.body, &b0, 0, &Params::new()).unwrap();
        assert_eq!(dist.residual, Rational::zero());
        let m = dist.marginal();
        assert_eq!(m.entries.len(), 2);
        // oracle: Pr(t=1) = 27/40·19/20 + 13/40·1/20
        let t1 = ratio(27, 40) * ratio(19, 20) + ratio(13, 40) * ratio(1, 20);
        assert_eq!(t1, ratio(263, 400));
        let t_is_1 = parse_prop("t = 1").unwrap();
        for (b, p) in &m.entries {
            if b.prob(&t_is_1).is_one() {
                assert_eq!(*p, ratio(263, 400));
                assert_eq!(b.prob(&parse_prop("d = 1").unwrap()), ratio(513, 526));
            } else {
                assert_eq!(*p, ratio(137, 400));
            }
        }
        let alt = exec_alt(&prog.body, &BeliefState::initial(Signature::of_program(&prog)), 0, &Params::new()).unwrap();
        assert_eq!(alt, m);
    }

    #[test]
    fn divergence_is_residual() {
        let prog = load("ovar x; while (true) { skip; }").unwrap();
        let b0 = BeliefState::initial(Signature::of_program(&prog));
        for fuel in [0, 1, 5] {
            let d = exec_from_belief(&prog.body, &b0, fuel, &Params::new()).unwrap();
            assert!(d.entries.is_empty());
            assert_eq!(d.residual, Rational::one());
        }
        let t = simulate(&prog.body, &b0, 7, 100, &Params::new()).unwrap();
        assert!(!t.terminated);
    }

    #[test]
    fn explore_skip_is_point_mass() {
        let b0 = BeliefState::initial(d_sig());
        let d = explore(&Statement::Skip, &b0, &Assignment(vec![0]), 3, &Params::new()).unwrap();
        assert_eq!(d.entries.len(), 1);
        assert_eq!(d.entries[&(b0, Assignment(vec![0]))], Rational::one());
        assert!(d.residual.is_zero());
    }

    #[test]
    fn unbound_parameter_is_an_error() {
        let prog = load("param q; uvar d in {0,1}; infer(p(d = 1) > q) { skip; }").unwrap();
        let b0 = BeliefState::initial(Signature::of_program(&prog));
        assert_eq!(
            exec_from_belief(&prog.body, &b0, 1, &Params::new()).unwrap_err(),
            ExecError::UnboundParameter("q".into())
        );
    }

    #[test]
    fn simulation_is_reproducible() {
        let prog = load(TREATMENT_STEP).unwrap();
        let b0 = BeliefState::initial(Signature::of_program(&prog));
        let a = simulate(&prog.body, &b0, 42, 1000, &Params::new()).unwrap();
        let b = simulate(&prog.body, &b0, 42, 1000, &Params::new()).unwrap();
        assert_eq!(a, b);
        assert!(a.terminated);
    }
}
