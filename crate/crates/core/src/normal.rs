//! Normal forms of predicates.
//!
//! Normalization folds constants, grounds expressions over finite domains
//! into sums of point indicators `[x=a && y=b]`, canonicalizes guards, merges
//! like terms and terms that differ only in a complementary guard, and (when
//! enabled) drops terms whose guards are jointly unsatisfiable and guards
//! implied by the others.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::ast::*;
use crate::belief::{eval_expr_by, Signature};
use crate::fm::{feasible, Constraint};
use crate::predicate::*;
use crate::rational::{nat, Rational};

#[derive(Debug, Clone)]
pub struct NormalizeOptions {
    /// Prune infeasible terms and implied guards.
    pub prune: bool,
    /// Largest joint domain an expression is grounded over.
    pub ground_cap: usize,
    /// Largest joint domain used as coordinates for pruning.
    pub coord_cap: usize,
    /// Constraint budget for one elimination.
    pub fm_cap: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { prune: true, ground_cap: 4096, coord_cap: 16, fm_cap: 2000 }
    }
}

pub fn fold_expr(e: &Expr) -> Expr {
    match e {
        Expr::Var(_) | Expr::Const(_) => e.clone(),
        Expr::Iverson(p) => match fold_prop(p) {
            Prop::Bool(b) => Expr::Const(b as u64),
            p => Expr::iverson(p),
        },
        Expr::Bin(op, a, b) => {
            let (a, b) = (fold_expr(a), fold_expr(b));
            match (op, &a, &b) {
                (_, Expr::Const(x), Expr::Const(y)) => Expr::Const(op.apply(*x, *y)),
                (BinOp::Mul, Expr::Const(0), _) | (BinOp::Mul, _, Expr::Const(0)) => Expr::Const(0),
                (BinOp::Mul, Expr::Const(1), _) => b,
                (BinOp::Mul, _, Expr::Const(1)) | (BinOp::Add, _, Expr::Const(0)) => a,
                (BinOp::Add, Expr::Const(0), _) => b,
                (BinOp::Sub, _, Expr::Const(0)) | (BinOp::Div, _, Expr::Const(1)) => a,
                (BinOp::Div, _, Expr::Const(0)) => Expr::Const(0),
                (BinOp::Div, Expr::Const(0), _) | (BinOp::Sub, Expr::Const(0), _) => Expr::Const(0),
                _ => Expr::bin(*op, a, b),
            }
        }
    }
}

pub fn fold_prop(p: &Prop) -> Prop {
    match p {
        Prop::Bool(_) => p.clone(),
        Prop::Cmp(op, a, b) => {
            let (a, b) = (fold_expr(a), fold_expr(b));
            match (&a, &b) {
                (Expr::Const(x), Expr::Const(y)) => Prop::Bool(op.holds(x, y)),
                _ if a == b => Prop::Bool(matches!(op, CmpOp::Eq | CmpOp::Le | CmpOp::Ge)),
                _ => Prop::Cmp(*op, a, b),
            }
        }
        Prop::Not(a) => match fold_prop(a) {
            Prop::Bool(b) => Prop::Bool(!b),
            a => Prop::not(a),
        },
        Prop::And(a, b) => match (fold_prop(a), fold_prop(b)) {
            (Prop::Bool(false), _) | (_, Prop::Bool(false)) => Prop::Bool(false),
            (Prop::Bool(true), x) | (x, Prop::Bool(true)) => x,
            (x, y) => Prop::and(x, y),
        },
        Prop::Or(a, b) => match (fold_prop(a), fold_prop(b)) {
            (Prop::Bool(true), _) | (_, Prop::Bool(true)) => Prop::Bool(true),
            (Prop::Bool(false), x) | (x, Prop::Bool(false)) => x,
            (x, y) => Prop::or(x, y),
        },
    }
}

/// Enumerates the joint assignments of `vars` (sorted names with domains).
fn joint(vars: &[(String, Vec<u64>)]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for (_, dom) in vars {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for prefix in &out {
            for &v in dom {
                let mut a = prefix.clone();
                a.push(v);
                next.push(a);
            }
        }
        out = next;
    }
    out
}

fn domains_of(vars: &BTreeSet<String>, sig: &Signature, cap: usize) -> Option<Vec<(String, Vec<u64>)>> {
    let mut out = Vec::new();
    let mut size = 1usize;
    for v in vars {
        let dom = sig.domain_of(v)?;
        size = size.checked_mul(dom.len())?;
        if size > cap {
            return None;
        }
        out.push((v.clone(), dom.to_vec()));
    }
    Some(out)
}

fn eval_at(e: &Expr, vars: &[(String, Vec<u64>)], a: &[u64]) -> u64 {
    eval_expr_by(e, &|v| {
        let i = vars.iter().position(|(n, _)| n == v).expect("grounded variable");
        a[i]
    })
}

/// The indicator `[x1=a1 && ... && xk=ak]`; `Const(1)` when k = 0.
pub fn point_indicator(vars: &[(String, Vec<u64>)], a: &[u64]) -> Expr {
    let mut it = vars.iter().zip(a);
    let Some(((v0, _), x0)) = it.next() else {
        return Expr::Const(1);
    };
    let mut p = Prop::var_is(v0, *x0);
    for ((v, _), x) in it {
        p = Prop::and(p, Prop::var_is(v, *x));
    }
    Expr::iverson(p)
}

/// Splits off the variables the table actually depends on: returns their
/// positions and the reduced table.
fn relevant<T: Clone + PartialEq>(n_vars: usize, points: &[Vec<u64>], vals: &[T]) -> (Vec<usize>, BTreeMap<Vec<u64>, T>) {
    let mut keep = Vec::new();
    for k in 0..n_vars {
        let mut by_rest: BTreeMap<Vec<u64>, &T> = BTreeMap::new();
        let depends = points.iter().zip(vals).any(|(a, v)| {
            let mut rest = a.clone();
            rest.remove(k);
            match by_rest.get(&rest) {
                Some(w) => *w != v,
                None => {
                    by_rest.insert(rest, v);
                    false
                }
            }
        });
        if depends {
            keep.push(k);
        }
    }
    let mut table = BTreeMap::new();
    for (a, v) in points.iter().zip(vals) {
        table.entry(keep.iter().map(|&k| a[k]).collect()).or_insert_with(|| v.clone());
    }
    (keep, table)
}

/// `E = Σ w·[S=a]` over the variables `S` that `E` actually depends on, or
/// `None` when some variable lacks a finite domain or the table is too big.
pub fn ground(e: &Expr, sig: &Signature, cap: usize) -> Option<Vec<(Rational, Expr)>> {
    let e = fold_expr(e);
    let vars = domains_of(&e.vars(), sig, cap)?;
    let points = joint(&vars);
    let table: Vec<u64> = points.iter().map(|a| eval_at(&e, &vars, a)).collect();
    let (keep, reduced) = relevant(vars.len(), &points, &table);
    let sub: Vec<(String, Vec<u64>)> = keep.iter().map(|&k| vars[k].clone()).collect();
    Some(
        reduced
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|(a, v)| (nat(v), point_indicator(&sub, &a)))
            .collect(),
    )
}

fn with_indicator(residual: Expr, ind: Expr) -> Expr {
    match (residual, ind) {
        (r, Expr::Const(1)) => r,
        (Expr::Const(1), i) => i,
        (r, i) => Expr::mul(r, i),
    }
}

/// Canonical form of `Σ r·Ex(e)`: every finite-domain variable is
/// enumerated, what remains of each expression is kept as a residual, and
/// the coefficient table of each residual is re-expressed over the
/// variables it depends on.
fn canon_sum(items: &[(Rational, Expr)], sig: &Signature, opts: &NormalizeOptions) -> Vec<(Rational, Expr)> {
    let folded: Vec<(Rational, Expr)> = items
        .iter()
        .filter(|(r, _)| !r.is_zero())
        .map(|(r, e)| (r.clone(), fold_expr(e)))
        .filter(|(_, e)| *e != Expr::Const(0))
        .collect();
    let mut dvars = BTreeSet::new();
    for (_, e) in &folded {
        dvars.extend(e.vars().into_iter().filter(|v| sig.domain_of(v).is_some()));
    }
    let Some(vars) = domains_of(&dvars, sig, opts.ground_cap) else {
        return ExForm::from_entries(folded).0;
    };
    let points = joint(&vars);
    let mut table: BTreeMap<Expr, Vec<Rational>> = BTreeMap::new();
    for (r, e) in &folded {
        let mine = e.vars();
        for (k, a) in points.iter().enumerate() {
            let mut x = e.clone();
            for ((v, _), c) in vars.iter().zip(a) {
                if mine.contains(v) {
                    x = x.substitute(v, &Expr::Const(*c));
                }
            }
            let (w, res) = match fold_expr(&x) {
                Expr::Const(0) => continue,
                Expr::Const(c) => (r * nat(c), Expr::Const(1)),
                other => (r.clone(), other),
            };
            table.entry(res).or_insert_with(|| vec![Rational::zero(); points.len()])[k] += w;
        }
    }
    let mut out = Vec::new();
    for (res, vals) in table {
        let (keep, reduced) = relevant(vars.len(), &points, &vals);
        let sub: Vec<(String, Vec<u64>)> = keep.iter().map(|&k| vars[k].clone()).collect();
        for (a, w) in reduced {
            if !w.is_zero() {
                out.push((w, with_indicator(res.clone(), point_indicator(&sub, &a))));
            }
        }
    }
    ExForm::from_entries(out).0
}

fn norm_form(f: &ExForm, sig: &Signature, opts: &NormalizeOptions) -> ExForm {
    ExForm(canon_sum(&f.0, sig, opts))
}

fn is_constant_form(f: &ExForm) -> Option<Rational> {
    let mut acc = Rational::zero();
    for (r, e) in &f.0 {
        if *e != Expr::Const(1) {
            return None;
        }
        acc += r;
    }
    Some(acc)
}

enum GuardNorm {
    True,
    False,
    Keep(Guard),
}

/// Puts a guard in canonical orientation: constant coefficients are folded
/// into the right side, `<`/`<=` are flipped to `>`/`>=`, and the sides of
/// `=`/`!=` are ordered.
pub fn canonical_guard(g: &Guard) -> Guard {
    let mut g = g.clone();
    if let Coeff::Const(c) = &g.coeff {
        if !c.is_one() {
            g.rhs = g.rhs.scale(c);
            g.coeff = Coeff::one();
        }
    }
    if matches!(g.coeff, Coeff::Param(_)) && g.rhs.is_zero() {
        g.coeff = Coeff::one();
    }
    if g.coeff == Coeff::one() {
        let swap = match g.op {
            CmpOp::Lt | CmpOp::Le => true,
            CmpOp::Eq | CmpOp::Ne => g.lhs > g.rhs,
            _ => false,
        };
        if swap {
            std::mem::swap(&mut g.lhs, &mut g.rhs);
            g.op = match g.op {
                CmpOp::Lt => CmpOp::Gt,
                CmpOp::Le => CmpOp::Ge,
                o => o,
            };
        }
    }
    g
}

pub fn negate_canonical(g: &Guard) -> Guard {
    canonical_guard(&g.negate())
}

fn norm_guard(g: &Guard, sig: &Signature, opts: &NormalizeOptions) -> GuardNorm {
    let g = Guard { lhs: norm_form(&g.lhs, sig, opts), op: g.op, coeff: g.coeff.clone(), rhs: norm_form(&g.rhs, sig, opts) };
    let g = canonical_guard(&g);
    if g.coeff == Coeff::one() {
        if let (Some(l), Some(r)) = (is_constant_form(&g.lhs), is_constant_form(&g.rhs)) {
            return if g.op.holds(&l, &r) { GuardNorm::True } else { GuardNorm::False };
        }
        if g.lhs == g.rhs {
            return if matches!(g.op, CmpOp::Eq | CmpOp::Le | CmpOp::Ge) { GuardNorm::True } else { GuardNorm::False };
        }
    }
    GuardNorm::Keep(g)
}

type Key = (Monomial, Vec<Guard>, Expr);

fn collect_terms(terms: &[Term], sig: &Signature, opts: &NormalizeOptions) -> BTreeMap<Key, Rational> {
    let mut groups: BTreeMap<(Monomial, Vec<Guard>), Vec<(Rational, Expr)>> = BTreeMap::new();
    'terms: for t in terms {
        if t.coef.is_zero() {
            continue;
        }
        let mut guards = BTreeSet::new();
        for g in &t.guards {
            match norm_guard(g, sig, opts) {
                GuardNorm::True => {}
                GuardNorm::False => continue 'terms,
                GuardNorm::Keep(g) => {
                    guards.insert(g);
                }
            }
        }
        if guards.iter().any(|g| guards.contains(&negate_canonical(g))) {
            continue;
        }
        groups.entry((t.mono.clone(), guards.into_iter().collect())).or_default().push((t.coef.clone(), t.atom.clone()));
    }
    let mut out = BTreeMap::new();
    for ((mono, guards), items) in groups {
        for (w, atom) in canon_sum(&items, sig, opts) {
            out.insert((mono.clone(), guards.clone(), atom), w);
        }
    }
    out
}


// -- pruning ----------------------------------------------------------------

struct Coords {
    vars: Vec<(String, Vec<u64>)>,
    points: Vec<Vec<u64>>,
    opaque: Vec<Expr>,
}

impl Coords {
    fn dim(&self) -> usize {
        self.points.len() - 1 + self.opaque.len()
    }

    /// Linear function (coefficients, constant) of `Ex(e)`.
    fn linear(&self, e: &Expr) -> (Vec<Rational>, Rational) {
        let mut coeffs = vec![Rational::zero(); self.dim()];
        if let Some(k) = self.opaque.iter().position(|o| o == e) {
            coeffs[self.points.len() - 1 + k] = Rational::one();
            return (coeffs, Rational::zero());
        }
        let vals: Vec<Rational> = self.points.iter().map(|a| nat(eval_at(e, &self.vars, a))).collect();
        let last = vals.last().cloned().unwrap_or_else(Rational::zero);
        for (i, v) in vals.iter().take(vals.len() - 1).enumerate() {
            coeffs[i] = v - &last;
        }
        (coeffs, last)
    }

    fn form(&self, f: &ExForm, scale: &Rational, acc: &mut (Vec<Rational>, Rational)) {
        for (r, e) in &f.0 {
            let (c, k) = self.linear(e);
            let w = r * scale;
            for (a, x) in acc.0.iter_mut().zip(c) {
                *a += &w * x;
            }
            acc.1 += &w * k;
        }
    }

    /// Constraints expressing `g`, or `None` if it cannot serve as a premise.
    fn constraints(&self, g: &Guard) -> Option<Vec<Constraint>> {
        let Coeff::Const(c) = &g.coeff else {
            return None;
        };
        let mut acc = (vec![Rational::zero(); self.dim()], Rational::zero());
        self.form(&g.lhs, &Rational::one(), &mut acc);
        self.form(&g.rhs, &-c, &mut acc);
        let (pos, k) = acc;
        let neg: Vec<Rational> = pos.iter().map(|x| -x).collect();
        let nk = -&k;
        Some(match g.op {
            CmpOp::Gt => vec![Constraint::new(pos, k, true)],
            CmpOp::Ge => vec![Constraint::new(pos, k, false)],
            CmpOp::Lt => vec![Constraint::new(neg, nk, true)],
            CmpOp::Le => vec![Constraint::new(neg, nk, false)],
            CmpOp::Eq => vec![Constraint::new(pos, k, false), Constraint::new(neg, nk, false)],
            CmpOp::Ne => return None,
        })
    }

    fn base(&self) -> Vec<Constraint> {
        let n = self.dim();
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v
        };
        let mut out: Vec<Constraint> = (0..n).map(|i| Constraint::new(unit(i), Rational::zero(), false)).collect();
        let mut simplex = vec![Rational::zero(); n];
        for x in simplex.iter_mut().take(self.points.len() - 1) {
            *x = -Rational::one();
        }
        out.push(Constraint::new(simplex, Rational::one(), false));
        out
    }
}

fn coords_for(guards: &[Guard], sig: &Signature, opts: &NormalizeOptions) -> Option<Coords> {
    let mut vars = BTreeSet::new();
    let mut opaque = BTreeSet::new();
    for g in guards {
        for (_, e) in g.lhs.0.iter().chain(&g.rhs.0) {
            let vs = e.vars();
            if vs.iter().all(|v| sig.domain_of(v).is_some()) {
                vars.extend(vs);
            } else {
                opaque.insert(e.clone());
            }
        }
    }
    let vars = domains_of(&vars, sig, opts.coord_cap)?;
    let points = joint(&vars);
    Some(Coords { vars, points, opaque: opaque.into_iter().collect() })
}

/// `None` if the guards are jointly unsatisfiable on every belief;
/// otherwise the guards with implied ones removed.
fn prune_guards(guards: &[Guard], sig: &Signature, opts: &NormalizeOptions) -> Option<Vec<Guard>> {
    if guards.is_empty() {
        return Some(Vec::new());
    }
    let Some(coords) = coords_for(guards, sig, opts) else {
        return Some(guards.to_vec());
    };
    let n = coords.dim();
    let premises = |gs: &[Guard]| -> Vec<Constraint> {
        let mut out = coords.base();
        for g in gs {
            if let Some(cs) = coords.constraints(g) {
                out.extend(cs);
            }
        }
        out
    };
    if feasible(n, &premises(guards), opts.fm_cap) == Some(false) {
        return None;
    }
    let mut kept: Vec<Guard> = guards.to_vec();
    let mut i = 0;
    while i < kept.len() {
        let g = &kept[i];
        if g.op != CmpOp::Eq {
            if let Some(neg) = coords.constraints(&g.negate()) {
                let others: Vec<Guard> = kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
                let mut sys = premises(&others);
                sys.extend(neg);
                if feasible(n, &sys, opts.fm_cap) == Some(false) {
                    kept.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    Some(kept)
}

fn prune(map: BTreeMap<Key, Rational>, sig: &Signature, opts: &NormalizeOptions) -> BTreeMap<Key, Rational> {
    let mut cache: BTreeMap<Vec<Guard>, Option<Vec<Guard>>> = BTreeMap::new();
    let mut out: BTreeMap<Key, Rational> = BTreeMap::new();
    for ((mono, guards, atom), c) in map {
        let pruned = cache.entry(guards.clone()).or_insert_with(|| prune_guards(&guards, sig, opts)).clone();
        if let Some(gs) = pruned {
            *out.entry((mono, gs, atom)).or_insert_with(Rational::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `c·[G, g]·A + c·[G, ¬g]·A = c·[G]·A`, repeated until nothing merges.
fn merge_complements(mut map: BTreeMap<Key, Rational>) -> BTreeMap<Key, Rational> {
    loop {
        let mut index: BTreeMap<(Monomial, Expr, Rational, Vec<Guard>, Guard), (Key, bool)> = BTreeMap::new();
        let mut merge: Option<(Key, Key, Key)> = None;
        'search: for ((mono, guards, atom), c) in &map {
            for (j, g) in guards.iter().enumerate() {
                let neg = negate_canonical(g);
                let (base, flag) = if *g <= neg { (g.clone(), true) } else { (neg, false) };
                let mut rest = guards.clone();
                rest.remove(j);
                let key = (mono.clone(), atom.clone(), c.clone(), rest.clone(), base);
                let me = (mono.clone(), guards.clone(), atom.clone());
                match index.get(&key) {
                    Some((other, f)) if *f != flag => {
                        merge = Some((other.clone(), me, (mono.clone(), rest, atom.clone())));
                        break 'search;
                    }
                    Some(_) => {}
                    None => {
                        index.insert(key, (me, flag));
                    }
                }
            }
        }
        let Some((a, b, merged)) = merge else {
            return map;
        };
        let c = map.remove(&a).expect("indexed term");
        map.remove(&b);
        *map.entry(merged).or_insert_with(Rational::zero) += c;
        map.retain(|_, c| !c.is_zero());
    }
}

fn to_predicate(map: BTreeMap<Key, Rational>) -> GPredicate {
    GPredicate {
        terms: map
            .into_iter()
            .map(|((mono, guards, atom), coef)| Term { coef, mono, guards, atom })
            .collect(),
    }
}

pub fn normalize(f: &GPredicate, sig: &Signature) -> GPredicate {
    normalize_with(f, sig, &NormalizeOptions::default())
}

pub fn normalize_with(f: &GPredicate, sig: &Signature, opts: &NormalizeOptions) -> GPredicate {
    let mut cur = f.clone();
    for _ in 0..16 {
        let mut map = collect_terms(&cur.terms, sig, opts);
        if opts.prune {
            map = prune(map, sig, opts);
        }
        map = merge_complements(map);
        let next = to_predicate(map);
        if next == cur {
            return next;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{parse_belief, BeliefState};
    use crate::rational::ratio;
    use crate::semantics::Params;
    use std::sync::Arc;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::new(&[
            VarDecl::observable("inCare"),
            VarDecl::unobservable("d", [0, 1]),
            VarDecl::unobservable("t", [0, 1]),
        ]))
    }

    fn pred(src: &str) -> GPredicate {
        parse_predicate(src, &sig(), &["q".to_string()]).unwrap()
    }

    #[test]
    fn sample_example_folds() {
        // (3/4)·Ex([d=1]) + (1/4)·Ex([0=1]) ≡ (3/4)·Ex([d=1])
        let f = rewrite_sample(
            &pred("Pr(d = 1)"),
            "d",
            &SampleSpec::new([(ratio(3, 4), Expr::var("d")), (ratio(1, 4), Expr::Const(0))]),
        );
        assert_eq!(normalize(&f, &sig()), pred("3/4 * Pr(d = 1)"));
        let g = rewrite_sample(
            &pred("Pr(d = 1)"),
            "d",
            &SampleSpec::new([(ratio(9, 10), Expr::Const(1)), (ratio(1, 10), Expr::Const(0))]),
        );
        assert_eq!(normalize(&g, &sig()), pred("9/10"));
    }

    #[test]
    fn distributivity_and_scalars() {
        let f = pred("[Pr(d = 1) > q] * (Pr(d = 1) + Pr(t = 1))");
        let g = pred("[Pr(d = 1) > q] * Pr(d = 1) + Pr(t = 1) * [Pr(d = 1) > q]");
        assert_eq!(normalize(&f, &sig()), normalize(&g, &sig()));
        let g = pred("2 * (3 * Pr(d = 1))");
        assert_eq!(normalize(&g, &sig()), pred("6 * Pr(d = 1)"));
    }

    #[test]
    fn contradictory_and_complementary_guards() {
        let f = pred("[Pr(d = 1) > q] * [Pr(d = 1) <= q] * Pr(d = 1)");
        assert!(normalize(&f, &sig()).is_zero());
        let g = pred("[Pr(d = 1) > q] * Pr(t = 1) + [Pr(d = 1) <= q] * Pr(t = 1)");
        assert_eq!(normalize(&g, &sig()), pred("Pr(t = 1)"));
    }

    #[test]
    fn pruning_uses_the_simplex() {
        let f = pred("[Pr(d = 1) > 1/2] * [Pr(d = 0) > 1/2] * Pr(t = 1)");
        assert!(normalize(&f, &sig()).is_zero());
        let g = pred("[Pr(d = 1) > 1/2] * [Pr(d = 1) > 1/4] * Pr(t = 1)");
        assert_eq!(normalize(&g, &sig()), normalize(&pred("[Pr(d = 1) > 1/2] * Pr(t = 1)"), &sig()));
        let off = NormalizeOptions { prune: false, ..Default::default() };
        assert_eq!(normalize_with(&g, &sig(), &off).terms[0].guards.len(), 2);
        let h = pred("[Pr(inCare) = 1] * [Pr(inCare) = 0] * Pr(t = 1)");
        assert!(normalize(&h, &sig()).is_zero());
    }

    #[test]
    fn grounding_drops_irrelevant_variables() {
        let items = ground(&crate::parser::parse_expr("d * (t + 1) - d * t").unwrap(), &sig(), 64).unwrap();
        assert_eq!(items, vec![(ratio(1, 1), Expr::iverson(Prop::var_is("d", 1)))]);
        assert!(ground(&Expr::var("inCare"), &sig(), 64).is_none());
    }

    #[test]
    fn idempotent_and_denotation_preserving() {
        let f = pred("(1 - Pr(inCare)) * Pr(d = 1) + Pr(inCare) * q + [Ex(d + t) >= q * (Pr(t = 0))] * Ex(d * 2 + t)");
        let n = normalize(&f, &sig());
        assert_eq!(normalize(&n, &sig()), n);
        let mut params = Params::new();
        params.insert("q".into(), ratio(1, 3));
        for text in [
            "1/2|inCare=1,d=1,t=0> + 1/2|inCare=1,d=0,t=1>",
            "1/5|inCare=0,d=1,t=1> + 4/5|inCare=0,d=0,t=0>",
        ] {
            let b: BeliefState = parse_belief(sig(), text).unwrap();
            assert_eq!(f.eval(&b, &params).unwrap(), n.eval(&b, &params).unwrap());
        }
    }
}
