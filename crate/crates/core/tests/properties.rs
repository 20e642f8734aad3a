use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pblimp::belief::{BeliefState, Signature};
use pblimp::check::{check_observability, desugar};
use pblimp::difftest::{check_belief_accuracy, check_operational, check_soundness, make_cases, Case};
use pblimp::gen::{random_belief, random_post, random_program, CorpusLimits};
use pblimp::invariant::{check_domination, CheckResult, InvariantOptions};
use pblimp::normal::{normalize, NormalizeOptions};
use pblimp::parser::parse;
use pblimp::predicate::{parse_predicate, GPredicate, Guard, Monomial};
use pblimp::rational::{parse_rational, ratio, to_fraction_string, Rational};
use pblimp::semantics::{exec_alt, exec_from_belief, exec_from_belief_ordered, Order, Params};
use pblimp::wp::{characteristic, mod_set, wp_loopfree, wp_unroll_sequence, WpOptions};
use pblimp::{Bound, CmpOp, Expr, Program, Prop, SampleSpec, Statement, VarDecl};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn case(seed: u64) -> Case {
    make_cases(seed, 1, &CorpusLimits::default()).pop().unwrap()
}

fn rich_post(sig: &Signature, rng: &mut ChaCha8Rng) -> GPredicate {
    let mut f = GPredicate::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut t = random_post(sig, rng).scale(&ratio(rng.gen_range(1..=6), rng.gen_range(1..=4)));
        if rng.gen_bool(0.4) {
            let p = match random_post(sig, rng).terms.pop().unwrap().atom {
                Expr::Iverson(p) => *p,
                e => Prop::cmp(CmpOp::Gt, e, Expr::Const(0)),
            };
            let bound = if rng.gen_bool(0.5) { Bound::Param("q".into()) } else { Bound::Const(ratio(rng.gen_range(0..=3), 3)) };
            t = t.guarded(&Guard::threshold(&p, [CmpOp::Lt, CmpOp::Ge, CmpOp::Gt][rng.gen_range(0..3)], &bound));
        }
        if rng.gen_bool(0.2) {
            t = t.scale_mono(&Monomial::param("q"));
        }
        f = f.add(t);
    }
    f
}

/// A loop from the corpus generator's shape with a richer body.
fn random_loop(seed: u64) -> (Program, Statement) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limits = CorpusLimits { max_statements: 5, ..CorpusLimits::default() };
    let p = random_program(&mut rng, &limits);
    let o = "o0";
    let bound = rng.gen_range(1..=3);
    let body = Statement::seq([p.body.unroll_loops(1), Statement::assign(o, Expr::bin(pblimp::BinOp::Add, Expr::var(o), Expr::Const(1)))]);
    let lp = Statement::while_loop(Prop::cmp(CmpOp::Lt, Expr::var(o), Expr::Const(bound)), body);
    (p, lp)
}

proptest! {
    #![proptest_config(config(64))]

    // -- frontend ---------------------------------------------------------

    #[test]
    fn program_print_parse_round_trip(seed in any::<u64>()) {
        let p = case(seed).program;
        let text = p.to_string();
        prop_assert_eq!(parse(&text).unwrap(), p);
    }

    #[test]
    fn desugar_is_idempotent_and_preserves_semantics(seed in any::<u64>()) {
        let c = case(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        fn strip(s: &Statement, rng: &mut ChaCha8Rng) -> Statement {
            match s {
                Statement::Observe { source, .. } if rng.gen_bool(0.5) => Statement::Observe { target: None, source: source.clone() },
                Statement::Seq(a, b) => Statement::Seq(Box::new(strip(a, rng)), Box::new(strip(b, rng))),
                Statement::If { guard, then_branch, else_branch } => Statement::if_then_else(guard.clone(), strip(then_branch, rng), strip(else_branch, rng)),
                Statement::Infer { prop, threshold, then_branch, else_branch } => Statement::infer(prop.clone(), threshold.clone(), strip(then_branch, rng), strip(else_branch, rng)),
                Statement::While { guard, body } => Statement::while_loop(guard.clone(), strip(body, rng)),
                other => other.clone(),
            }
        }
        let sugared = Program { body: strip(&c.program.body, &mut rng), ..c.program.clone() };
        prop_assert!(check_observability(&sugared).is_ok());
        let plain = desugar(&sugared);
        prop_assert_eq!(desugar(&plain), plain.clone());
        prop_assert!(check_observability(&plain).is_ok());
        let small = Signature::of_program(&sugared);
        let big = Signature::of_program(&plain);
        let b_big = random_belief(&big, &mut rng);
        let b_small = b_big.project(small.clone()).unwrap();
        let a = exec_alt(&sugared.body, &b_small, c.fuel, &c.params).unwrap();
        let b = exec_alt(&plain.body, &b_big, c.fuel, &c.params).unwrap();
        let mut projected: BTreeMap<BeliefState, Rational> = BTreeMap::new();
        for (belief, p) in b.entries {
            *projected.entry(belief.project(small.clone()).unwrap()).or_insert_with(Rational::zero) += p;
        }
        prop_assert_eq!(a.entries, projected);
        prop_assert_eq!(a.residual, b.residual);
    }

    #[test]
    fn rational_text_round_trip(n in 0i64..10_000, d in 1i64..10_000) {
        let r = ratio(n, d);
        prop_assert_eq!(parse_rational(&to_fraction_string(&r)).unwrap(), r);
    }

    // -- beliefs ----------------------------------------------------------

    #[test]
    fn belief_updates_are_normalized_and_consistent(seed in any::<u64>()) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_belief(&sig, &mut rng);
        let u = sig.unobservable_names().into_iter().next().unwrap();
        let dom = sig.domain_of(&u).unwrap().to_vec();
        let spec = SampleSpec::new([(ratio(1, 3), Expr::Const(dom[0])), (ratio(2, 3), Expr::Const(*dom.last().unwrap()))]);
        let o = sig.names().iter().find(|n| sig.kind_of(n) == Some(pblimp::VarKind::Observable)).unwrap().clone();
        let mut outs = vec![
            b.sample_update(&u, &spec).unwrap(),
            b.assign_update(&o, &Expr::bin(pblimp::BinOp::Add, Expr::var(&o), Expr::Const(2))).unwrap(),
        ];
        for (v, _) in b.marginal(&u).unwrap() {
            outs.push(b.condition(&u, v).unwrap());
        }
        for out in outs {
            prop_assert!(out.total().is_one());
            prop_assert!(out.is_consistent());
            prop_assert!(out.support().all(|(_, p)| !p.is_zero()));
            let json = serde_json::to_string(&out.to_json()).unwrap();
            let back = BeliefState::from_json(sig.clone(), &serde_json::from_str(&json).unwrap()).unwrap();
            prop_assert_eq!(back, out);
        }
        // observable determinacy
        let p = Prop::cmp(CmpOp::Le, Expr::var(&o), Expr::Const(1));
        let pr = b.prob(&p);
        prop_assert!(pr.is_zero() || pr.is_one());
    }

    #[test]
    fn conditioning_is_bayes(seed in any::<u64>()) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_belief(&sig, &mut rng);
        for u in sig.unobservable_names() {
            for (v, pv) in b.marginal(&u).unwrap() {
                let post = b.condition(&u, v).unwrap();
                for w in sig.unobservable_names() {
                    for k in sig.domain_of(&w).unwrap() {
                        let p = Prop::var_is(&w, *k);
                        prop_assert_eq!(post.prob(&p) * &pv, b.prob(&Prop::and(p.clone(), Prop::var_is(&u, v))));
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_mixes(seed in any::<u64>()) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_belief(&sig, &mut rng);
        let u = sig.unobservable_names().into_iter().next_back().unwrap();
        let dom = sig.domain_of(&u).unwrap().to_vec();
        let other = sig.unobservable_names().into_iter().find(|w| sig.domain_of(w).unwrap().iter().all(|v| dom.contains(v)));
        let mut branches = vec![(ratio(1, 4), Expr::Const(dom[rng.gen_range(0..dom.len())]))];
        branches.push((ratio(3, 4), other.map(Expr::var).unwrap_or(Expr::Const(dom[0]))));
        let spec = SampleSpec::new(branches.clone());
        let after = b.sample_update(&u, &spec).unwrap();
        for &c in &dom {
            let mut want = Rational::zero();
            for (rho, p) in b.support() {
                for (w, e) in &branches {
                    if pblimp::belief::eval_expr(&sig, rho, e) == c {
                        want += p * w;
                    }
                }
            }
            prop_assert_eq!(after.prob(&Prop::var_is(&u, c)), want);
        }
    }

    // -- execution --------------------------------------------------------

    #[test]
    fn execution_conserves_mass_and_ignores_order(seed in any::<u64>()) {
        let c = case(seed);
        let merged = exec_from_belief(&c.program.body, &c.initial, c.fuel, &c.params).unwrap();
        prop_assert_eq!(merged.terminated_mass() + &merged.residual, Rational::one());
        let dfs = exec_from_belief_ordered(&c.program.body, &c.initial, c.fuel, &c.params, Order::DepthFirstReversed).unwrap();
        prop_assert_eq!(merged, dfs);
    }

    #[test]
    fn belief_accuracy_and_operational_correctness(seed in any::<u64>()) {
        let c = case(seed);
        prop_assert!(check_belief_accuracy(&c).is_ok());
        prop_assert!(check_operational(&c).is_ok());
    }

    // -- predicates -------------------------------------------------------

    #[test]
    fn normalization_preserves_value_and_is_idempotent(seed in any::<u64>()) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rich_post(&sig, &mut rng);
        let n = normalize(&f, &sig);
        prop_assert_eq!(normalize(&n, &sig), n.clone());
        for _ in 0..8 {
            let b = random_belief(&sig, &mut rng);
            let params = Params::from([("q".to_string(), ratio(rng.gen_range(0..=4), 4))]);
            prop_assert_eq!(f.eval(&b, &params).unwrap(), n.eval(&b, &params).unwrap());
        }
    }

    #[test]
    fn predicate_print_parse_round_trip(seed in any::<u64>()) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = normalize(&rich_post(&sig, &mut rng), &sig);
        let w = wp_loopfree(&sig, &c.program.body.unroll_loops(c.fuel), &f, &WpOptions::default()).unwrap();
        for g in [f, w] {
            let text = g.to_string();
            let back = parse_predicate(&text, &sig, &["q".to_string()]).unwrap();
            prop_assert_eq!(normalize(&back, &sig), g, "{}", text);
        }
    }

    // -- wp ---------------------------------------------------------------

    #[test]
    fn wp_is_sound(seed in any::<u64>()) {
        let c = case(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(check_soundness(&c, &mut rng).is_ok());
    }

    #[test]
    fn wp_is_linear(seed in any::<u64>(), num in 0i64..20, den in 1i64..6) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prog = c.program.body.unroll_loops(c.fuel);
        let opts = WpOptions { params: c.params.clone(), ..WpOptions::default() };
        let (f, g) = (rich_post(&sig, &mut rng), rich_post(&sig, &mut rng));
        let alpha = ratio(num, den);
        let wp = |h: &GPredicate| wp_loopfree(&sig, &prog, h, &opts).unwrap();
        let lhs = wp(&f.scale(&alpha).add(g.clone()));
        let rhs = wp(&f).scale(&alpha).add(wp(&g));
        for _ in 0..4 {
            let b = random_belief(&sig, &mut rng);
            prop_assert_eq!(lhs.eval(&b, &c.params).unwrap(), rhs.eval(&b, &c.params).unwrap());
        }
    }

    #[test]
    fn untouched_variables_pass_through(seed in any::<u64>()) {
        let c = case(seed);
        let sig = Signature::of_program(&c.program);
        let prog = c.program.body.unroll_loops(c.fuel);
        prop_assume!(!prog.contains_diverge());
        let m = mod_set(&sig, &prog);
        let free: Vec<&String> = sig.names().iter().filter(|v| !m.contains(*v)).collect();
        prop_assume!(!free.is_empty());
        let f = GPredicate::pr(Prop::cmp(CmpOp::Ge, Expr::var(free[0].clone()), Expr::Const(1)));
        let opts = WpOptions { independence: false, params: c.params.clone(), ..WpOptions::default() };
        let w = wp_loopfree(&sig, &prog, &f, &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..4 {
            let b = random_belief(&sig, &mut rng);
            prop_assert_eq!(w.eval(&b, &c.params).unwrap(), f.eval(&b, &c.params).unwrap());
        }
    }

    #[test]
    fn unrolling_is_monotone_and_matches_bounded_execution(seed in any::<u64>()) {
        let (p, lp) = random_loop(seed);
        let sig = Signature::of_program(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_post(&sig, &mut rng);
        let params = Params::from([("q".to_string(), ratio(1, 2))]);
        let opts = WpOptions { params: params.clone(), ..WpOptions::default() };
        let seq = wp_unroll_sequence(&sig, &lp, &f, 4, &opts).unwrap();
        for _ in 0..3 {
            let b = random_belief(&sig, &mut rng);
            let mut last = Rational::zero();
            for (k, x) in seq.iter().enumerate() {
                let v = x.eval(&b, &params).unwrap();
                prop_assert!(v >= last);
                let op = exec_alt(&lp, &b, k + 1, &params).unwrap();
                prop_assert_eq!(&v, &op.expectation(|b2| f.eval(b2, &params)).unwrap());
                last = v;
            }
        }
    }

    #[test]
    fn proved_invariants_hold_on_samples(seed in any::<u64>()) {
        let (p, lp) = random_loop(seed);
        let sig = Signature::of_program(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_post(&sig, &mut rng);
        let Statement::While { guard, .. } = &lp else { unreachable!() };
        // F plus some slack while the loop runs
        let slack = ratio(rng.gen_range(0..=8), 4);
        let i = f.clone().add(GPredicate::pr(guard.clone()).scale(&slack));
        let opts = WpOptions::default();
        let delta = characteristic(&sig, &lp, &f, &i, &opts).unwrap();
        let inv = normalize(&i, &sig);
        let verdict = check_domination(&sig, &inv, &delta, &InvariantOptions::default(), &NormalizeOptions::default());
        for _ in 0..50 {
            let b = random_belief(&sig, &mut rng);
            let params = Params::from([("q".to_string(), ratio(rng.gen_range(0..=4), 4))]);
            let (lhs, rhs) = (inv.eval(&b, &params).unwrap(), delta.eval(&b, &params).unwrap());
            if verdict == CheckResult::Proved {
                prop_assert!(lhs >= rhs, "proved but {} < {} at {}", lhs, rhs, b);
            }
        }
        if let CheckResult::Falsified { witness, params, lhs, rhs } = verdict {
            prop_assert!(lhs < rhs);
            prop_assert_eq!(inv.eval(&witness, &params).unwrap(), lhs);
            prop_assert_eq!(delta.eval(&witness, &params).unwrap(), rhs);
        }
    }
}

#[test]
fn observable_only_post_is_unchanged_by_unobservable_updates() {
    let sig = Arc::new(Signature::new(&[VarDecl::unobservable("d", [0, 1]), VarDecl::observable("x")]));
    let f = GPredicate::ex(Expr::var("x"));
    let c = Statement::sample("d", SampleSpec::new([(ratio(1, 2), Expr::Const(0)), (ratio(1, 2), Expr::Const(1))]));
    let w = wp_loopfree(&sig, &c, &f, &WpOptions { independence: false, ..WpOptions::default() }).unwrap();
    assert_eq!(w, normalize(&f, &sig));
}
