//! Random beliefs, programs and postexpectations for differential testing.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::*;
use crate::belief::{Assignment, BeliefState, Signature};
use crate::predicate::GPredicate;
use crate::rational::{ratio, Rational};

/// A consistent belief: one value per observable, a few weighted joint
/// values for the unobservables. Observables without a domain take values
/// in `0..=2`.
pub fn random_belief<R: Rng>(sig: &Arc<Signature>, rng: &mut R) -> BeliefState {
    let n = sig.len();
    let mut base = vec![0u64; n];
    for i in sig.observables() {
        base[i] = match sig.domain(i) {
            Some(d) => *d.choose(rng).expect("nonempty domain"),
            None => rng.gen_range(0..=2),
        };
    }
    let unobs: Vec<usize> = sig.unobservables().collect();
    let joint: usize = unobs.iter().map(|&i| sig.domain(i).map_or(1, <[u64]>::len)).product();
    let support = rng.gen_range(1..=joint.clamp(1, 4));
    let mut items = Vec::new();
    for _ in 0..support {
        let mut a = base.clone();
        for &i in &unobs {
            a[i] = *sig.domain(i).expect("unobservable domain").choose(rng).expect("nonempty domain");
        }
        items.push((Assignment(a), rng.gen_range(1..=9u64)));
    }
    let total: u64 = items.iter().map(|(_, w)| w).sum();
    let items = items.into_iter().map(|(a, w)| (a, ratio(w as i64, total as i64)));
    BeliefState::from_weighted(sig.clone(), items).expect("generated belief is valid")
}

#[derive(Debug, Clone)]
pub struct CorpusLimits {
    pub max_unobservables: usize,
    pub max_observables: usize,
    /// Statement budget per program, nested statements included.
    pub max_statements: usize,
    /// Domains are subsets of `0..=max_value`.
    pub max_value: u64,
}

impl Default for CorpusLimits {
    fn default() -> Self {
        CorpusLimits { max_unobservables: 3, max_observables: 2, max_statements: 8, max_value: 3 }
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    uvars: Vec<(String, Vec<u64>)>,
    ovars: Vec<String>,
    budget: usize,
    depth: usize,
}

const WEIGHTS: [i64; 4] = [2, 4, 5, 10];

impl<R: Rng> Gen<'_, R> {
    fn small(&mut self) -> u64 {
        self.rng.gen_range(0..=2)
    }

    fn obs_expr(&mut self) -> Expr {
        let o = Expr::var(self.ovars.choose(self.rng).unwrap().clone());
        match self.rng.gen_range(0..5) {
            0 => Expr::Const(self.small()),
            1 => o,
            2 => Expr::bin(BinOp::Add, o, Expr::Const(1)),
            3 => Expr::bin(BinOp::Sub, o, Expr::Const(1)),
            _ => Expr::bin(BinOp::Mul, o, Expr::Const(2)),
        }
    }

    fn obs_prop(&mut self) -> Prop {
        let o = Expr::var(self.ovars.choose(self.rng).unwrap().clone());
        let op = *CmpOp::ALL.choose(self.rng).unwrap();
        let p = Prop::cmp(op, o, Expr::Const(self.small()));
        if self.rng.gen_bool(0.2) {
            Prop::not(p)
        } else {
            p
        }
    }

    fn any_prop(&mut self) -> Prop {
        let (u, dom) = self.uvars.choose(self.rng).unwrap().clone();
        let c = *dom.choose(self.rng).unwrap();
        let base = match self.rng.gen_range(0..4) {
            0 => Prop::var_is(&u, c),
            1 => Prop::cmp(CmpOp::Lt, Expr::var(&u), Expr::Const(c)),
            2 => {
                let (v, _) = self.uvars.choose(self.rng).unwrap().clone();
                Prop::cmp(CmpOp::Le, Expr::var(&u), Expr::var(&v))
            }
            _ => Prop::cmp(CmpOp::Ne, Expr::var(&u), Expr::Const(c)),
        };
        match self.rng.gen_range(0..5) {
            0 => Prop::and(base, self.obs_prop()),
            1 => Prop::or(base, self.obs_prop()),
            _ => base,
        }
    }

    fn spec(&mut self, dom: &[u64]) -> SampleSpec {
        let den = *WEIGHTS.choose(self.rng).unwrap();
        let k = self.rng.gen_range(1..=3.min(den as usize));
        // split den into k positive parts
        let mut cuts: Vec<i64> = (1..den).collect();
        cuts.shuffle(self.rng);
        let mut cuts: Vec<i64> = cuts.into_iter().take(k - 1).collect();
        cuts.sort();
        let mut parts = Vec::new();
        let mut prev = 0;
        for c in cuts.into_iter().chain([den]) {
            parts.push(c - prev);
            prev = c;
        }
        let compatible: Vec<String> = self
            .uvars
            .iter()
            .filter(|(_, d)| d.iter().all(|v| dom.contains(v)))
            .map(|(n, _)| n.clone())
            .collect();
        let branches = parts.into_iter().map(|w| {
            let value = if !compatible.is_empty() && self.rng.gen_bool(0.3) {
                Expr::var(compatible.choose(self.rng).unwrap().clone())
            } else {
                Expr::Const(*dom.choose(self.rng).unwrap())
            };
            (ratio(w, den), value)
        });
        SampleSpec::new(branches.collect::<Vec<_>>())
    }

    fn threshold(&mut self) -> Threshold {
        let op = *[CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge].choose(self.rng).unwrap();
        let bound = if self.rng.gen_bool(0.3) {
            Bound::Param("q".into())
        } else {
            Bound::Const(ratio(self.rng.gen_range(0..=4), 4))
        };
        Threshold { op, bound }
    }

    fn block(&mut self, len: usize) -> Statement {
        let mut items = Vec::new();
        for _ in 0..len {
            if self.budget == 0 {
                break;
            }
            items.push(self.statement());
        }
        Statement::seq(items)
    }

    fn statement(&mut self) -> Statement {
        self.budget -= 1;
        let nested = self.depth < 2 && self.budget >= 2;
        let choice = self.rng.gen_range(0..if nested { 10 } else { 6 });
        match choice {
            0 => {
                let o = self.ovars.choose(self.rng).unwrap().clone();
                Statement::assign(o, self.obs_expr())
            }
            1..=3 => {
                let (u, dom) = self.uvars.choose(self.rng).unwrap().clone();
                Statement::sample(u, self.spec(&dom))
            }
            4 | 5 => {
                let (u, _) = self.uvars.choose(self.rng).unwrap().clone();
                let o = self.ovars.choose(self.rng).unwrap().clone();
                Statement::observe(o, u)
            }
            _ => {
                self.depth += 1;
                let s = match choice {
                    6 => {
                        let g = self.obs_prop();
                        let a = self.block(2);
                        let b = self.block(1);
                        Statement::if_then_else(g, a, b)
                    }
                    7 | 8 => {
                        let p = self.any_prop();
                        let t = self.threshold();
                        let a = self.block(2);
                        let b = self.block(1);
                        Statement::infer(p, t, a, b)
                    }
                    _ => {
                        let o = self.ovars.choose(self.rng).unwrap().clone();
                        let g = Prop::cmp(CmpOp::Lt, Expr::var(&o), Expr::Const(self.rng.gen_range(1..=3)));
                        self.budget -= 1;
                        let mut body = vec![Statement::assign(&o, Expr::bin(BinOp::Add, Expr::var(&o), Expr::Const(1)))];
                        if self.budget > 0 {
                            body.insert(0, self.statement());
                        }
                        Statement::while_loop(g, Statement::seq(body))
                    }
                };
                self.depth -= 1;
                s
            }
        }
    }
}

/// One random program within `limits`. Always type-correct.
pub fn random_program<R: Rng>(rng: &mut R, limits: &CorpusLimits) -> Program {
    let nu = rng.gen_range(1..=limits.max_unobservables.max(1));
    let no = rng.gen_range(1..=limits.max_observables.max(1));
    let mut uvars = Vec::new();
    for k in 0..nu {
        let mut dom: Vec<u64> = (0..=limits.max_value).filter(|_| rng.gen_bool(0.6)).collect();
        if dom.is_empty() {
            dom.push(rng.gen_range(0..=limits.max_value));
        }
        uvars.push((format!("u{k}"), dom));
    }
    let ovars: Vec<String> = (0..no).map(|k| format!("o{k}")).collect();
    let budget = rng.gen_range(limits.max_statements.min(3)..=limits.max_statements.max(1));
    let mut g = Gen { rng, uvars: uvars.clone(), ovars: ovars.clone(), budget: budget - 1, depth: 0 };
    let (u, dom) = g.uvars.choose(g.rng).unwrap().clone();
    let first = Statement::sample(u, g.spec(&dom));
    let rest = g.block(budget - 1);
    let body = Statement::seq([first, rest].into_iter().filter(|s| *s != Statement::Skip));
    let mut decls: Vec<VarDecl> = uvars.into_iter().map(|(n, d)| VarDecl::unobservable(n, d)).collect();
    decls.extend(ovars.into_iter().map(VarDecl::observable));
    Program { params: vec!["q".into()], decls, body }
}

pub fn generate_corpus(seed: u64, count: usize, limits: &CorpusLimits) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_program(&mut rng, limits)).collect()
}

/// `Pr(P)` or `Ex(E)` over the program's variables.
pub fn random_post<R: Rng>(sig: &Signature, rng: &mut R) -> GPredicate {
    let names: Vec<String> = sig.names().to_vec();
    let pick = |rng: &mut R| Expr::var(names.choose(rng).unwrap().clone());
    let c = Expr::Const(rng.gen_range(0..=2));
    if rng.gen_bool(0.5) {
        let p = match rng.gen_range(0..3) {
            0 => Prop::eq(pick(rng), c),
            1 => Prop::cmp(CmpOp::Lt, pick(rng), pick(rng)),
            _ => Prop::and(Prop::cmp(CmpOp::Ge, pick(rng), c), Prop::cmp(CmpOp::Ne, pick(rng), Expr::Const(1))),
        };
        GPredicate::pr(p)
    } else {
        let e = match rng.gen_range(0..3) {
            0 => pick(rng),
            1 => Expr::bin(BinOp::Add, pick(rng), pick(rng)),
            _ => Expr::bin(BinOp::Mul, pick(rng), c),
        };
        GPredicate::ex(e)
    }
}

/// A parameter value for `q` drawn from quarters.
pub fn random_param<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(0..=4), 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_observability;

    fn size(s: &Statement) -> usize {
        match s {
            Statement::Skip => 0,
            Statement::Seq(a, b) => size(a) + size(b),
            Statement::If { then_branch, else_branch, .. } | Statement::Infer { then_branch, else_branch, .. } => {
                1 + size(then_branch) + size(else_branch)
            }
            Statement::While { body, .. } => 1 + size(body),
            _ => 1,
        }
    }

    #[test]
    fn corpus_is_deterministic_and_well_typed() {
        let a = generate_corpus(7, 50, &CorpusLimits::default());
        let b = generate_corpus(7, 50, &CorpusLimits::default());
        assert_eq!(a, b);
        for p in &a {
            check_observability(p).unwrap_or_else(|e| panic!("{p}\n{e:?}"));
            assert!(size(&p.body) <= 8, "{p}");
        }
        assert!(a.iter().any(|p| !p.body.loops().is_empty()));
    }

    #[test]
    fn beliefs_are_consistent() {
        let p = generate_corpus(3, 1, &CorpusLimits::default()).pop().unwrap();
        let sig = Signature::of_program(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(random_belief(&sig, &mut rng).is_consistent());
        }
    }
}
