//! Variable assignments, belief states and the three belief operators:
//! evaluation, sampling update and conditioning.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ast::*;
use crate::rational::{nat, parse_rational, to_fraction_string, Rational};

/// Ordered variable table shared by every assignment of a program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    domains: Vec<Option<Vec<u64>>>,
    index: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new(decls: &[VarDecl]) -> Signature {
        let mut s = Signature {
            names: Vec::new(),
            kinds: Vec::new(),
            domains: Vec::new(),
            index: BTreeMap::new(),
        };
        for d in decls {
            s.index.insert(d.name.clone(), s.names.len());
            s.names.push(d.name.clone());
            s.kinds.push(d.kind);
            s.domains.push(d.domain.clone());
        }
        s
    }

    pub fn of_program(p: &Program) -> Arc<Signature> {
        Arc::new(Signature::new(&p.decls))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn kind(&self, i: usize) -> VarKind {
        self.kinds[i]
    }

    pub fn kind_of(&self, v: &str) -> Option<VarKind> {
        self.index_of(v).map(|i| self.kinds[i])
    }

    pub fn domain(&self, i: usize) -> Option<&[u64]> {
        self.domains[i].as_deref()
    }

    pub fn domain_of(&self, v: &str) -> Option<&[u64]> {
        self.index_of(v).and_then(|i| self.domain(i))
    }

    pub fn observables(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.kinds[i] == VarKind::Observable)
    }

    pub fn unobservables(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.kinds[i] == VarKind::Unobservable)
    }

    pub fn unobservable_names(&self) -> BTreeSet<String> {
        self.unobservables().map(|i| self.names[i].clone()).collect()
    }

    pub fn in_domain(&self, i: usize, v: u64) -> bool {
        self.domains[i].as_ref().is_none_or(|d| d.binary_search(&v).is_ok())
    }

    /// Each variable at the minimum of its domain, or 0 without one.
    pub fn default_assignment(&self) -> Assignment {
        Assignment(
            self.domains
                .iter()
                .map(|d| d.as_ref().and_then(|d| d.first().copied()).unwrap_or(0))
                .collect(),
        )
    }
}

/// Values indexed by the variable positions of a [`Signature`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub Vec<u64>);

impl Assignment {
    pub fn get(&self, sig: &Signature, v: &str) -> u64 {
        match sig.index_of(v) {
            Some(i) => self.0[i],
            None => panic!("variable `{v}` is not declared"),
        }
    }

    pub fn with(&self, i: usize, v: u64) -> Assignment {
        let mut a = self.clone();
        a.0[i] = v;
        a
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        AssignmentDisplay(self, sig)
    }

    pub fn to_map(&self, sig: &Signature) -> BTreeMap<String, u64> {
        sig.names.iter().cloned().zip(self.0.iter().copied()).collect()
    }

    pub fn from_map(sig: &Signature, m: &BTreeMap<String, u64>) -> Result<Assignment, BeliefError> {
        let mut vals = Vec::with_capacity(sig.len());
        for (i, name) in sig.names.iter().enumerate() {
            let v = *m
                .get(name)
                .ok_or_else(|| BeliefError::Invalid(format!("assignment misses variable `{name}`")))?;
            if !sig.in_domain(i, v) {
                return Err(BeliefError::Domain { var: name.clone(), value: v });
            }
            vals.push(v);
        }
        if let Some(extra) = m.keys().find(|k| sig.index_of(k).is_none()) {
            return Err(BeliefError::Invalid(format!("unknown variable `{extra}`")));
        }
        Ok(Assignment(vals))
    }
}

struct AssignmentDisplay<'a>(&'a Assignment, &'a Signature);

impl fmt::Display for AssignmentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.1.names.iter().zip(&self.0 .0).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

pub fn eval_expr(sig: &Signature, s: &Assignment, e: &Expr) -> u64 {
    eval_expr_by(e, &|v| s.get(sig, v))
}

pub fn eval_prop(sig: &Signature, s: &Assignment, p: &Prop) -> bool {
    eval_prop_by(p, &|v| s.get(sig, v))
}

/// Evaluation with an arbitrary variable lookup.
pub fn eval_expr_by(e: &Expr, lookup: &dyn Fn(&str) -> u64) -> u64 {
    match e {
        Expr::Var(v) => lookup(v),
        Expr::Const(c) => *c,
        Expr::Bin(op, a, b) => op.apply(eval_expr_by(a, lookup), eval_expr_by(b, lookup)),
        Expr::Iverson(p) => eval_prop_by(p, lookup) as u64,
    }
}

pub fn eval_prop_by(p: &Prop, lookup: &dyn Fn(&str) -> u64) -> bool {
    match p {
        Prop::Cmp(op, a, b) => op.holds(&eval_expr_by(a, lookup), &eval_expr_by(b, lookup)),
        Prop::And(a, b) => eval_prop_by(a, lookup) && eval_prop_by(b, lookup),
        Prop::Or(a, b) => eval_prop_by(a, lookup) || eval_prop_by(b, lookup),
        Prop::Not(a) => !eval_prop_by(a, lookup),
        Prop::Bool(b) => *b,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BeliefError {
    #[error("value {value} lies outside the declared domain of `{var}`")]
    Domain { var: String, value: u64 },
    #[error("observation `{var} = {value}` has probability zero")]
    ZeroProbabilityObservation { var: String, value: u64 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid belief state: {0}")]
    Invalid(String),
}

/// A finite distribution over assignments with exact, positive weights.
///
/// Equality, ordering and hashing only look at the entries, so two beliefs
/// over the same signature compare equal iff they are the same distribution.
#[derive(Clone)]
pub struct BeliefState {
    sig: Arc<Signature>,
    entries: BTreeMap<Assignment, Rational>,
}

impl PartialEq for BeliefState {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for BeliefState {}

impl PartialOrd for BeliefState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BeliefState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.entries.cmp(&other.entries)
    }
}

impl std::hash::Hash for BeliefState {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.entries.hash(state)
    }
}

impl fmt::Debug for BeliefState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BeliefState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}|{}>", crate::rational::Compact(p), a.display(&self.sig))?;
        }
        Ok(())
    }
}

fn accumulate(map: &mut BTreeMap<Assignment, Rational>, a: Assignment, p: Rational) {
    if p.is_zero() {
        return;
    }
    match map.entry(a) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(p);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += p;
        }
    }
}

impl BeliefState {
    pub fn point(sig: Arc<Signature>, a: Assignment) -> BeliefState {
        let mut entries = BTreeMap::new();
        entries.insert(a, Rational::one());
        BeliefState { sig, entries }
    }

    /// Point mass at [`Signature::default_assignment`].
    pub fn initial(sig: Arc<Signature>) -> BeliefState {
        let a = sig.default_assignment();
        BeliefState::point(sig, a)
    }

    /// Builds a belief from weighted assignments, merging duplicates.
    /// Weights must be nonnegative and sum to 1.
    pub fn from_weighted(
        sig: Arc<Signature>,
        items: impl IntoIterator<Item = (Assignment, Rational)>,
    ) -> Result<BeliefState, BeliefError> {
        let mut entries = BTreeMap::new();
        for (a, p) in items {
            if p.is_negative() {
                return Err(BeliefError::Invalid("negative probability".into()));
            }
            if a.0.len() != sig.len() {
                return Err(BeliefError::Invalid("assignment has the wrong arity".into()));
            }
            for (i, &v) in a.0.iter().enumerate() {
                if !sig.in_domain(i, v) {
                    return Err(BeliefError::Domain { var: sig.names[i].clone(), value: v });
                }
            }
            accumulate(&mut entries, a, p);
        }
        let total: Rational = entries.values().cloned().sum();
        if !total.is_one() {
            return Err(BeliefError::Invalid(format!(
                "probabilities sum to {}, not 1",
                to_fraction_string(&total)
            )));
        }
        Ok(BeliefState { sig, entries })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn support(&self) -> impl Iterator<Item = (&Assignment, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self, a: &Assignment) -> Rational {
        self.entries.get(a).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().cloned().sum()
    }

    /// ⟦β⟧(P) = Σ β(σ)·σ(P)
    pub fn prob(&self, p: &Prop) -> Rational {
        self.entries
            .iter()
            .filter(|(a, _)| eval_prop(&self.sig, a, p))
            .map(|(_, w)| w.clone())
            .sum()
    }

    /// Ex(E)(β) = Σ β(σ)·σ(E)
    pub fn expect(&self, e: &Expr) -> Rational {
        let mut acc = Rational::zero();
        for (a, w) in &self.entries {
            let v = eval_expr(&self.sig, a, e);
            if v != 0 {
                acc += w * nat(v);
            }
        }
        acc
    }

    fn index(&self, x: &str) -> Result<usize, BeliefError> {
        self.sig.index_of(x).ok_or_else(|| BeliefError::UnknownVariable(x.to_string()))
    }

    fn checked(&self, i: usize, v: u64) -> Result<u64, BeliefError> {
        if self.sig.in_domain(i, v) {
            Ok(v)
        } else {
            Err(BeliefError::Domain { var: self.sig.names[i].clone(), value: v })
        }
    }

    /// Image of β under σ ↦ σ[x ↦ σ(E)].
    pub fn assign_update(&self, x: &str, e: &Expr) -> Result<BeliefState, BeliefError> {
        let i = self.index(x)?;
        let mut entries = BTreeMap::new();
        for (a, w) in &self.entries {
            let v = self.checked(i, eval_expr(&self.sig, a, e))?;
            accumulate(&mut entries, a.with(i, v), w.clone());
        }
        Ok(BeliefState { sig: self.sig.clone(), entries })
    }

    /// β[x ↦ f](σ) = Σ_{ρ[x↦σ(x)]=σ} β(ρ)·f(ρ, σ(x))
    pub fn sample_update(&self, x: &str, spec: &SampleSpec) -> Result<BeliefState, BeliefError> {
        let i = self.index(x)?;
        let mut entries = BTreeMap::new();
        for (a, w) in &self.entries {
            for b in &spec.branches {
                let v = self.checked(i, eval_expr(&self.sig, a, &b.value))?;
                accumulate(&mut entries, a.with(i, v), w * &b.weight);
            }
        }
        Ok(BeliefState { sig: self.sig.clone(), entries })
    }

    /// β|_{x=c}: restrict to x = c and renormalize.
    pub fn condition(&self, x: &str, c: u64) -> Result<BeliefState, BeliefError> {
        let i = self.index(x)?;
        let z: Rational = self.entries.iter().filter(|(a, _)| a.0[i] == c).map(|(_, w)| w.clone()).sum();
        if z.is_zero() {
            return Err(BeliefError::ZeroProbabilityObservation { var: x.to_string(), value: c });
        }
        let entries = self
            .entries
            .iter()
            .filter(|(a, _)| a.0[i] == c)
            .map(|(a, w)| (a.clone(), w / &z))
            .collect();
        Ok(BeliefState { sig: self.sig.clone(), entries })
    }

    /// Values of x with positive mass, ascending, with their probabilities.
    pub fn marginal(&self, x: &str) -> Result<BTreeMap<u64, Rational>, BeliefError> {
        let i = self.index(x)?;
        let mut m: BTreeMap<u64, Rational> = BTreeMap::new();
        for (a, w) in &self.entries {
            *m.entry(a.0[i]).or_insert_with(Rational::zero) += w;
        }
        Ok(m)
    }

    pub fn is_consistent(&self) -> bool {
        let mut it = self.entries.keys();
        let Some(first) = it.next() else {
            return true;
        };
        let obs: Vec<usize> = self.sig.observables().collect();
        it.all(|a| obs.iter().all(|&i| a.0[i] == first.0[i]))
    }

    /// Marginal over the variables of `sig`, which must be a sub-table of
    /// this belief's signature.
    pub fn project(&self, sig: Arc<Signature>) -> Result<BeliefState, BeliefError> {
        let idx: Vec<usize> = sig.names.iter().map(|n| self.index(n)).collect::<Result<_, _>>()?;
        let mut entries = BTreeMap::new();
        for (a, w) in &self.entries {
            accumulate(&mut entries, Assignment(idx.iter().map(|&i| a.0[i]).collect()), w.clone());
        }
        Ok(BeliefState { sig, entries })
    }

    pub fn to_json(&self) -> BeliefJson {
        BeliefJson(
            self.entries
                .iter()
                .map(|(a, p)| BeliefEntry { assignment: a.to_map(&self.sig), prob: p.clone() })
                .collect(),
        )
    }

    pub fn from_json(sig: Arc<Signature>, json: &BeliefJson) -> Result<BeliefState, BeliefError> {
        let mut items = Vec::new();
        for e in &json.0 {
            items.push((Assignment::from_map(&sig, &e.assignment)?, e.prob.clone()));
        }
        BeliefState::from_weighted(sig, items)
    }
}

/// Canonical serialized belief: entries sorted by assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BeliefJson(pub Vec<BeliefEntry>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeliefEntry {
    pub assignment: BTreeMap<String, u64>,
    #[serde(with = "crate::rational::serde_fraction")]
    pub prob: Rational,
}

/// Parses `p|x=1,y=0> + ...` (the display form) against a signature.
pub fn parse_belief(sig: Arc<Signature>, text: &str) -> Result<BeliefState, BeliefError> {
    let mut items = Vec::new();
    for part in text.split('+') {
        let part = part.trim();
        let (p, rest) = part
            .split_once('|')
            .ok_or_else(|| BeliefError::Invalid(format!("missing `|` in `{part}`")))?;
        let body = rest
            .trim()
            .strip_suffix('>')
            .ok_or_else(|| BeliefError::Invalid(format!("missing `>` in `{part}`")))?;
        let prob = parse_rational(p).map_err(|e| BeliefError::Invalid(e.to_string()))?;
        let mut m = BTreeMap::new();
        for kv in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| BeliefError::Invalid(format!("expected `var=value`, got `{kv}`")))?;
            let v: u64 = v.trim().parse().map_err(|_| BeliefError::Invalid(format!("bad value in `{kv}`")))?;
            m.insert(k.trim().to_string(), v);
        }
        items.push((Assignment::from_map(&sig, &m)?, prob));
    }
    BeliefState::from_weighted(sig, items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_prop};
    use crate::rational::ratio;

    fn sig(decls: &[VarDecl]) -> Arc<Signature> {
        Arc::new(Signature::new(decls))
    }

    fn xy() -> Arc<Signature> {
        sig(&[VarDecl::unobservable("x", [0, 1]), VarDecl::unobservable("y", [0, 1])])
    }

    fn quarter_belief() -> BeliefState {
        parse_belief(xy(), "1/3|x=0,y=0> + 1/3|x=1,y=0> + 1/6|x=0,y=1> + 1/6|x=1,y=1>").unwrap()
    }

    fn expr_at(s: &[(&str, u64)], e: &str) -> u64 {
        let decls: Vec<VarDecl> = s.iter().map(|(n, _)| VarDecl::observable(*n)).collect();
        let sg = Signature::new(&decls);
        let a = Assignment(s.iter().map(|(_, v)| *v).collect());
        eval_expr(&sg, &a, &parse_expr(e).unwrap())
    }

    #[test]
    fn expression_examples() {
        assert_eq!(expr_at(&[("d", 0)], "1 - d"), 1);
        assert_eq!(expr_at(&[("d", 1)], "1 - d"), 0);
        assert_eq!(expr_at(&[("x", 3)], "x - 5"), 0);
        assert_eq!(expr_at(&[("x", 7)], "x / 2"), 3);
    }

    #[test]
    fn prop_examples() {
        let sg = Signature::new(&[VarDecl::observable("d"), VarDecl::observable("t"), VarDecl::observable("x")]);
        let s = Assignment(vec![1, 0, 2]);
        assert!(eval_prop(&sg, &s, &parse_prop("d = 1").unwrap()));
        assert!(!eval_prop(&sg, &s, &parse_prop("d = 1 && t = 1").unwrap()));
        assert!(eval_prop(&sg, &s, &parse_prop("!(x < 2)").unwrap()));
    }

    #[test]
    fn prob_examples() {
        let b = quarter_belief();
        assert_eq!(b.prob(&parse_prop("x = 0").unwrap()), ratio(1, 2));
        assert_eq!(b.prob(&parse_prop("y = 1").unwrap()), ratio(1, 3));
        assert_eq!(b.prob(&parse_prop("0 = 0").unwrap()), ratio(1, 1));
    }

    #[test]
    fn assign_examples() {
        let s = sig(&[VarDecl::observable("x"), VarDecl::unobservable("u", [0, 1])]);
        let b = parse_belief(s.clone(), "1/2|x=1,u=0> + 1/2|x=2,u=0>").unwrap();
        let r = b.assign_update("x", &Expr::Const(0)).unwrap();
        assert_eq!(r, parse_belief(s.clone(), "1|x=0,u=0>").unwrap());
        let b = parse_belief(s.clone(), "1|x=1,u=0>").unwrap();
        assert_eq!(
            b.assign_update("x", &parse_expr("x + 1").unwrap()).unwrap(),
            parse_belief(s.clone(), "1|x=2,u=0>").unwrap()
        );
        let b = parse_belief(s.clone(), "1/2|x=1,u=0> + 1/2|x=1,u=1>").unwrap();
        assert_eq!(
            b.assign_update("x", &parse_expr("x * 2").unwrap()).unwrap(),
            parse_belief(s, "1/2|x=2,u=0> + 1/2|x=2,u=1>").unwrap()
        );
    }

    #[test]
    fn sample_examples() {
        let s = sig(&[VarDecl::unobservable("d", [0, 1])]);
        let b = parse_belief(s.clone(), "1|d=0>").unwrap();
        let f = SampleSpec::new([(ratio(9, 10), Expr::Const(1)), (ratio(1, 10), Expr::Const(0))]);
        let b1 = b.sample_update("d", &f).unwrap();
        assert_eq!(b1, parse_belief(s.clone(), "9/10|d=1> + 1/10|d=0>").unwrap());
        let g = SampleSpec::new([(ratio(3, 4), Expr::var("d")), (ratio(1, 4), Expr::Const(0))]);
        let b2 = b1.sample_update("d", &g).unwrap();
        assert_eq!(b2, parse_belief(s.clone(), "27/40|d=1> + 13/40|d=0>").unwrap());
        let id = SampleSpec::new([(ratio(1, 1), Expr::var("d"))]);
        assert_eq!(b2.sample_update("d", &id).unwrap(), b2);
        let bad = SampleSpec::new([(ratio(1, 1), Expr::Const(2))]);
        assert!(matches!(b2.sample_update("d", &bad), Err(BeliefError::Domain { .. })));
    }

    #[test]
    fn condition_examples() {
        let b = quarter_belief();
        let c = b.condition("x", 0).unwrap();
        assert_eq!(c, parse_belief(xy(), "2/3|x=0,y=0> + 1/3|x=0,y=1>").unwrap());
        let d = c.condition("x", 0).unwrap();
        assert_eq!(d, c);
        assert!(matches!(c.condition("x", 1), Err(BeliefError::ZeroProbabilityObservation { .. })));
    }

    #[test]
    fn post_treatment_conditioning() {
        // joint of (d, t) after the treatment step, enumerated by hand:
        // d=1 w.p. 27/40, t copies d w.p. 19/20
        let s = sig(&[VarDecl::unobservable("d", [0, 1]), VarDecl::unobservable("t", [0, 1])]);
        let b = parse_belief(s.clone(), "9/10|d=1,t=0> + 1/10|d=0,t=0>").unwrap();
        let b = b
            .sample_update("d", &SampleSpec::new([(ratio(3, 4), Expr::var("d")), (ratio(1, 4), Expr::Const(0))]))
            .unwrap();
        let b = b
            .sample_update(
                "t",
                &SampleSpec::new([
                    (ratio(19, 20), Expr::var("d")),
                    (ratio(1, 20), parse_expr("1 - d").unwrap()),
                ]),
            )
            .unwrap();
        let oracle_joint_d1_t1 = ratio(27, 40) * ratio(19, 20);
        let oracle_t1 = oracle_joint_d1_t1.clone() + ratio(13, 40) * ratio(1, 20);
        assert_eq!(oracle_t1, ratio(526, 800));
        let c = b.condition("t", 1).unwrap();
        assert_eq!(c.prob(&parse_prop("d = 1").unwrap()), oracle_joint_d1_t1 / oracle_t1);
        assert_eq!(c.prob(&parse_prop("d = 1").unwrap()), ratio(513, 526));
    }

    #[test]
    fn consistency() {
        let s = sig(&[VarDecl::observable("inCare"), VarDecl::unobservable("d", [0, 1])]);
        assert!(parse_belief(s.clone(), "1/2|inCare=1,d=0> + 1/2|inCare=1,d=1>").unwrap().is_consistent());
        assert!(!parse_belief(s.clone(), "1/2|inCare=1,d=0> + 1/2|inCare=0,d=0>").unwrap().is_consistent());
        assert!(BeliefState::initial(s).is_consistent());
    }

    #[test]
    fn json_round_trip() {
        let b = quarter_belief();
        let text = serde_json::to_string(&b.to_json()).unwrap();
        assert!(text.starts_with(r#"[{"assignment":{"x":0,"y":0},"prob":"1/3"}"#), "{text}");
        let back: BeliefJson = serde_json::from_str(&text).unwrap();
        assert_eq!(BeliefState::from_json(xy(), &back).unwrap(), b);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(parse_belief(xy(), "1/2|x=0,y=0>").is_err());
        assert!(parse_belief(xy(), "1|x=2,y=0>").is_err());
    }
}
