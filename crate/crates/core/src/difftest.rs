//! Differential testing of the wp calculus against exhaustive execution.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ast::Program;
use crate::belief::{BeliefState, Signature};
use crate::gen::{generate_corpus, random_belief, random_param, random_post, CorpusLimits};
use crate::semantics::{exec_alt, exec_from_belief, Params};
use crate::wp::{wp_loopfree, WpOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    /// `[C]^{β0}(β, σ) = β(σ)·[C]^{β0}(β)`
    BeliefAccuracy,
    /// The two operational semantics agree at equal fuel.
    OperationalCorrectness,
    /// `wp(C, F)(β0) = Σ_β ⟦C⟧^{β0}(β)·F(β)`
    Soundness,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::BeliefAccuracy => "belief-accuracy",
            Property::OperationalCorrectness => "operational-correctness",
            Property::Soundness => "soundness",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub program: usize,
    pub property: Property,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffSummary {
    pub seed: u64,
    pub programs: usize,
    pub belief_accuracy_checks: usize,
    pub operational_checks: usize,
    pub soundness_checks: usize,
    pub violations: Vec<Violation>,
}

/// Everything needed to re-run the checks on one corpus entry.
#[derive(Debug, Clone)]
pub struct Case {
    pub program: Program,
    pub fuel: usize,
    pub initial: BeliefState,
    pub params: Params,
}

pub fn make_cases(seed: u64, count: usize, limits: &CorpusLimits) -> Vec<Case> {
    let corpus = generate_corpus(seed, count, limits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    corpus
        .into_iter()
        .map(|program| {
            let sig = Signature::of_program(&program);
            let initial = random_belief(&sig, &mut rng);
            let fuel = rng.gen_range(1..=3);
            let params = Params::from([("q".to_string(), random_param(&mut rng))]);
            Case { program, fuel, initial, params }
        })
        .collect()
}

/// Checks every belief-state pair of the full semantics against the
/// marginal. Returns the number of pairs compared.
pub fn check_belief_accuracy(case: &Case) -> Result<usize, String> {
    let full = exec_from_belief(&case.program.body, &case.initial, case.fuel, &case.params).map_err(|e| e.to_string())?;
    let marginal = full.marginal();
    for ((b, s), p) in &full.entries {
        let expected = b.mass(s) * &marginal.entries[b];
        if *p != expected {
            return Err(format!("at ({b}, {}) got {p}, expected {expected}", s.display(b.signature())));
        }
    }
    Ok(full.entries.len())
}

pub fn check_operational(case: &Case) -> Result<(), String> {
    let full = exec_from_belief(&case.program.body, &case.initial, case.fuel, &case.params).map_err(|e| e.to_string())?;
    let alt = exec_alt(&case.program.body, &case.initial, case.fuel, &case.params).map_err(|e| e.to_string())?;
    let marginal = full.marginal();
    if marginal != alt {
        return Err(format!(
            "full semantics gives {} beliefs (residual {}), belief-only gives {} (residual {})",
            marginal.entries.len(),
            marginal.residual,
            alt.entries.len(),
            alt.residual
        ));
    }
    Ok(())
}

pub fn check_soundness<R: Rng>(case: &Case, rng: &mut R) -> Result<(), String> {
    let sig = Signature::of_program(&case.program);
    let post = random_post(&sig, rng);
    let unrolled = case.program.body.unroll_loops(case.fuel);
    let opts = WpOptions { params: case.params.clone(), ..WpOptions::default() };
    let w = wp_loopfree(&sig, &unrolled, &post, &opts).map_err(|e| e.to_string())?;
    let lhs = w.eval(&case.initial, &case.params).map_err(|e| e.to_string())?;
    let alt = exec_alt(&case.program.body, &case.initial, case.fuel, &case.params).map_err(|e| e.to_string())?;
    let rhs = alt.expectation(|b| post.eval(b, &case.params)).map_err(|e| e.to_string())?;
    if lhs != rhs {
        return Err(format!("F = {post}: wp gives {lhs}, execution gives {rhs}"));
    }
    Ok(())
}

pub fn run_difftest(seed: u64, count: usize, limits: &CorpusLimits) -> DiffSummary {
    let cases = make_cases(seed, count, limits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
    let mut summary = DiffSummary {
        seed,
        programs: cases.len(),
        belief_accuracy_checks: 0,
        operational_checks: 0,
        soundness_checks: 0,
        violations: Vec::new(),
    };
    for (k, case) in cases.iter().enumerate() {
        let mut found = Vec::new();
        match check_belief_accuracy(case) {
            Ok(n) => summary.belief_accuracy_checks += n,
            Err(d) => found.push((Property::BeliefAccuracy, d)),
        }
        summary.operational_checks += 1;
        if let Err(d) = check_operational(case) {
            found.push((Property::OperationalCorrectness, d));
        }
        summary.soundness_checks += 1;
        if let Err(d) = check_soundness(case, &mut rng) {
            found.push((Property::Soundness, d));
        }
        summary.violations.extend(found.into_iter().map(|(property, detail)| Violation { program: k, property, detail }));
    }
    summary
}
