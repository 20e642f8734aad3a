//! Query plumbing behind the `pblimp` binary: configuration, dispatch and
//! the JSON report printed on stdout.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use pblimp::belief::BeliefJson;
use pblimp::difftest::{run_difftest, DiffSummary};
use pblimp::gen::CorpusLimits;
use pblimp::invariant::{check_invariant, CheckResult};
use pblimp::parser::parse_prop;
use pblimp::predicate::{parse_predicate, GPredicate};
use pblimp::rational::{parse_rational, serde_fraction};
use pblimp::semantics::{exec_alt, exec_from_belief, simulate_with, BeliefDistributionJson, Params, TerminalJson};
use pblimp::wp::{bound_program, characteristic, BoundTag, LoopStrategy, WpOptions};
use pblimp::{check_observability, desugar, parse, BeliefState, Program, Rational, Signature, VarKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Check,
    Run,
    Wp,
    Invariant,
    Simulate,
    Difftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Run => "run",
            Command::Wp => "wp",
            Command::Invariant => "invariant",
            Command::Simulate => "simulate",
            Command::Difftest => "difftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryConfig {
    pub command: Command,
    pub program: Option<PathBuf>,
    pub params: Params,
    /// Interval assumptions `lo..hi` for unbound parameters.
    pub assumptions: BTreeMap<String, (Rational, Rational)>,
    pub fuel: usize,
    pub unroll: Option<usize>,
    /// Invariant files, one per loop in source order.
    pub invariants: Vec<PathBuf>,
    /// Which loop `invariant` checks.
    pub loop_index: usize,
    pub post: Option<String>,
    /// Initial belief: inline JSON or a path to a JSON file.
    pub init: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub runs: usize,
    pub max_steps: usize,
    pub event: Option<String>,
    pub count: usize,
    pub output: Option<PathBuf>,
}

impl QueryConfig {
    pub fn new(command: Command) -> QueryConfig {
        QueryConfig {
            command,
            program: None,
            params: Params::new(),
            assumptions: BTreeMap::new(),
            fuel: 10,
            unroll: None,
            invariants: Vec::new(),
            loop_index: 0,
            post: None,
            init: None,
            seed: 0,
            samples: 1000,
            runs: 10_000,
            max_steps: 1000,
            event: None,
            count: 200,
            output: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExitError {
    /// Unreadable input, or a program or predicate that does not parse or
    /// type-check.
    #[error("{0}")]
    Input(String),
    /// Missing strategy or parameter, unproved invariant, runtime failure.
    #[error("{0}")]
    Query(String),
    /// The differential tester found a counterexample.
    #[error("{} property violation(s)", .0.violations.len())]
    Violations(Box<DiffSummary>),
    /// The program was rejected by `check`; the report lists why.
    #[error("program rejected")]
    Rejected(Box<Report>),
}

impl ExitError {
    pub fn code(&self) -> u8 {
        match self {
            ExitError::Input(_) | ExitError::Rejected(_) => 1,
            ExitError::Query(_) => 2,
            ExitError::Violations(_) => 3,
        }
    }
}

fn query(e: impl std::fmt::Display) -> ExitError {
    ExitError::Query(e.to_string())
}

fn input(e: impl std::fmt::Display) -> ExitError {
    ExitError::Input(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<String>,
    pub result: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarInfo {
    pub name: String,
    pub observable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Proved,
    Falsified {
        witness: BeliefJson,
        params: BTreeMap<String, String>,
        #[serde(with = "serde_fraction")]
        lhs: Rational,
        #[serde(with = "serde_fraction")]
        rhs: Rational,
    },
    Unknown {
        reason: String,
    },
}

impl From<CheckResult> for Verdict {
    fn from(r: CheckResult) -> Verdict {
        match r {
            CheckResult::Proved => Verdict::Proved,
            CheckResult::Falsified { witness, params, lhs, rhs } => Verdict::Falsified {
                witness: witness.to_json(),
                params: params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                lhs,
                rhs,
            },
            CheckResult::Unknown(reason) => Verdict::Unknown { reason },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub truth: BTreeMap<String, u64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Check {
        ok: bool,
        params: Vec<String>,
        variables: Vec<VarInfo>,
        diagnostics: Vec<Diagnostic>,
    },
    Run {
        fuel: usize,
        agreement: bool,
        full: TerminalJson,
        beliefs: BeliefDistributionJson,
    },
    Wp {
        post: String,
        strategy: String,
        tag: BoundTag,
        predicate: String,
        at: BeliefJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<String>,
    },
    Invariant {
        loop_index: usize,
        post: String,
        invariant: String,
        step: String,
        result: Verdict,
    },
    Simulate {
        seed: u64,
        runs: usize,
        max_steps: usize,
        terminated: usize,
        unfinished: usize,
        mean_steps: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        event: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        event_count: Option<usize>,
        outcomes: Vec<Outcome>,
    },
    Difftest {
        summary: DiffSummary,
    },
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// `name=value` with value `a/b` or a decimal.
pub fn parse_param(text: &str) -> Result<(String, Rational), String> {
    let (k, v) = text.split_once('=').ok_or_else(|| format!("expected name=value, got `{text}`"))?;
    let v = parse_rational(v.trim()).map_err(|e| e.to_string())?;
    Ok((k.trim().to_string(), v))
}

/// `name=lo..hi`.
pub fn parse_assumption(text: &str) -> Result<(String, (Rational, Rational)), String> {
    let (k, v) = text.split_once('=').ok_or_else(|| format!("expected name=lo..hi, got `{text}`"))?;
    let (lo, hi) = v.split_once("..").ok_or_else(|| format!("expected lo..hi, got `{v}`"))?;
    let lo = parse_rational(lo.trim()).map_err(|e| e.to_string())?;
    let hi = parse_rational(hi.trim()).map_err(|e| e.to_string())?;
    if lo > hi {
        return Err(format!("empty interval {lo}..{hi}"));
    }
    Ok((k.trim().to_string(), (lo, hi)))
}

fn read(path: &Path) -> Result<String, ExitError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn program_path(cfg: &QueryConfig) -> Result<&Path, ExitError> {
    cfg.program.as_deref().ok_or_else(|| input(format!("`{}` needs a program file", cfg.command.name())))
}

fn load_program(cfg: &QueryConfig) -> Result<Program, ExitError> {
    let path = program_path(cfg)?;
    let prog = parse(&read(path)?).map_err(|e| input(format!("{}:{e}", path.display())))?;
    check_observability(&prog).map_err(|errs| {
        input(errs.iter().map(|e| format!("{}: type error: {e}", path.display())).collect::<Vec<_>>().join("\n"))
    })?;
    for p in cfg.params.keys() {
        if !prog.params.contains(p) {
            return Err(query(format!("`{p}` is not a declared parameter")));
        }
    }
    Ok(desugar(&prog))
}

fn initial_belief(cfg: &QueryConfig, sig: &Arc<Signature>) -> Result<BeliefState, ExitError> {
    let Some(init) = &cfg.init else {
        return Ok(BeliefState::initial(sig.clone()));
    };
    let text = if init.trim_start().starts_with('[') { init.clone() } else { read(Path::new(init))? };
    let json: BeliefJson = serde_json::from_str(&text).map_err(|e| input(format!("initial belief: {e}")))?;
    BeliefState::from_json(sig.clone(), &json).map_err(|e| input(format!("initial belief: {e}")))
}

fn post(cfg: &QueryConfig, prog: &Program, sig: &Signature) -> Result<GPredicate, ExitError> {
    let text = cfg.post.as_deref().ok_or_else(|| input(format!("`{}` needs --post", cfg.command.name())))?;
    predicate(text, prog, sig)
}

fn predicate(text: &str, prog: &Program, sig: &Signature) -> Result<GPredicate, ExitError> {
    parse_predicate(text.trim(), sig, &prog.params).map_err(|e| input(format!("predicate `{}`: {e}", text.trim())))
}

fn wp_options(cfg: &QueryConfig) -> WpOptions {
    let mut opts = WpOptions { params: cfg.params.clone(), ..WpOptions::default() };
    opts.invariant.seed = cfg.seed;
    opts.invariant.samples = cfg.samples;
    opts.invariant.assumptions = cfg.assumptions.clone();
    opts
}

fn display_path(cfg: &QueryConfig) -> Option<String> {
    cfg.program.as_ref().map(|p| p.display().to_string())
}

pub fn dispatch(cfg: &QueryConfig) -> Result<Report, ExitError> {
    let result = match cfg.command {
        Command::Check => return check(cfg),
        Command::Run => run(cfg)?,
        Command::Wp => wp(cfg)?,
        Command::Invariant => invariant(cfg)?,
        Command::Simulate => simulate(cfg)?,
        Command::Difftest => {
            let summary = run_difftest(cfg.seed, cfg.count, &CorpusLimits::default());
            if !summary.violations.is_empty() {
                return Err(ExitError::Violations(Box::new(summary)));
            }
            Payload::Difftest { summary }
        }
    };
    Ok(Report { command: cfg.command, program: display_path(cfg), result })
}

fn check(cfg: &QueryConfig) -> Result<Report, ExitError> {
    let path = program_path(cfg)?;
    let prog = parse(&read(path)?).map_err(|e| input(format!("{}:{e}", path.display())))?;
    let diagnostics: Vec<Diagnostic> = match check_observability(&prog) {
        Ok(()) => Vec::new(),
        Err(errs) => errs
            .into_iter()
            .map(|e| Diagnostic { statement: e.statement, variable: e.variable, message: e.message })
            .collect(),
    };
    let variables = prog
        .decls
        .iter()
        .map(|d| VarInfo {
            name: d.name.clone(),
            observable: d.kind == VarKind::Observable,
            domain: d.domain.clone(),
        })
        .collect();
    let report = Report {
        command: Command::Check,
        program: display_path(cfg),
        result: Payload::Check { ok: diagnostics.is_empty(), params: prog.params.clone(), variables, diagnostics },
    };
    match &report.result {
        Payload::Check { ok: false, .. } => Err(ExitError::Rejected(Box::new(report))),
        _ => Ok(report),
    }
}

fn run(cfg: &QueryConfig) -> Result<Payload, ExitError> {
    let prog = load_program(cfg)?;
    let sig = Signature::of_program(&prog);
    let beta0 = initial_belief(cfg, &sig)?;
    let full = exec_from_belief(&prog.body, &beta0, cfg.fuel, &cfg.params).map_err(query)?;
    let alt = exec_alt(&prog.body, &beta0, cfg.fuel, &cfg.params).map_err(query)?;
    Ok(Payload::Run { fuel: cfg.fuel, agreement: full.marginal() == alt, full: full.to_json(), beliefs: alt.to_json() })
}

fn wp(cfg: &QueryConfig) -> Result<Payload, ExitError> {
    let prog = load_program(cfg)?;
    let sig = Signature::of_program(&prog);
    let f = post(cfg, &prog, &sig)?;
    let nloops = prog.body.loops().len();
    let (strategies, strategy) = match (cfg.unroll, cfg.invariants.is_empty()) {
        (Some(_), false) => return Err(query("give either --unroll or --invariant, not both")),
        (Some(n), true) => ((0..nloops).map(|k| (k, LoopStrategy::Unroll(n))).collect(), format!("unroll {n}")),
        (None, false) => {
            let mut m = BTreeMap::new();
            for (k, path) in cfg.invariants.iter().enumerate() {
                m.insert(k, LoopStrategy::Invariant(predicate(&read(path)?, &prog, &sig)?));
            }
            (m, "invariant".to_string())
        }
        (None, true) => (BTreeMap::new(), "none".to_string()),
    };
    let bound = bound_program(&prog, &f, &strategies, &wp_options(cfg)).map_err(query)?;
    let beta0 = initial_belief(cfg, &sig)?;
    let value = match bound.predicate.params().iter().find(|p| !cfg.params.contains_key(*p)) {
        Some(_) => None,
        None => Some(bound.predicate.eval(&beta0, &cfg.params).map_err(query)?.to_string()),
    };
    Ok(Payload::Wp {
        post: f.to_string(),
        strategy,
        tag: bound.tag,
        predicate: bound.predicate.to_string(),
        at: beta0.to_json(),
        value,
    })
}

fn invariant(cfg: &QueryConfig) -> Result<Payload, ExitError> {
    let prog = load_program(cfg)?;
    let sig = Signature::of_program(&prog);
    let f = post(cfg, &prog, &sig)?;
    let path = match cfg.invariants.as_slice() {
        [p] => p,
        _ => return Err(input("`invariant` needs exactly one --invariant file")),
    };
    let i = predicate(&read(path)?, &prog, &sig)?;
    let loops = prog.body.loops();
    let lp = loops
        .get(cfg.loop_index)
        .ok_or_else(|| query(format!("the program has no loop #{}", cfg.loop_index)))?;
    let opts = wp_options(cfg);
    let step = characteristic(&sig, lp, &f.bind_params(&cfg.params), &i.bind_params(&cfg.params), &opts).map_err(query)?;
    let result = check_invariant(&sig, lp, &f, &i, &opts).map_err(query)?;
    Ok(Payload::Invariant {
        loop_index: cfg.loop_index,
        post: f.to_string(),
        invariant: i.to_string(),
        step: step.to_string(),
        result: result.into(),
    })
}

fn simulate(cfg: &QueryConfig) -> Result<Payload, ExitError> {
    let prog = load_program(cfg)?;
    let sig = Signature::of_program(&prog);
    let beta0 = initial_belief(cfg, &sig)?;
    let event = match &cfg.event {
        Some(text) => Some(parse_prop(text).map_err(|e| input(format!("event `{text}`: {e}")))?),
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut terminated, mut steps, mut hits) = (0, 0usize, 0);
    let mut outcomes: BTreeMap<BTreeMap<String, u64>, usize> = BTreeMap::new();
    for _ in 0..cfg.runs {
        let t = simulate_with(&prog.body, &beta0, &mut rng, cfg.max_steps, &cfg.params).map_err(query)?;
        steps += t.steps;
        if !t.terminated {
            continue;
        }
        terminated += 1;
        if let Some(p) = &event {
            if pblimp::belief::eval_prop(&sig, &t.truth, p) {
                hits += 1;
            }
        }
        *outcomes.entry(t.truth.to_map(&sig)).or_default() += 1;
    }
    let mean = if cfg.runs == 0 { Rational::from_integer(0.into()) } else { Rational::new(steps.into(), cfg.runs.into()) };
    Ok(Payload::Simulate {
        seed: cfg.seed,
        runs: cfg.runs,
        max_steps: cfg.max_steps,
        terminated,
        unfinished: cfg.runs - terminated,
        mean_steps: mean.to_string(),
        event: cfg.event.clone(),
        event_count: event.map(|_| hits),
        outcomes: outcomes.into_iter().map(|(truth, count)| Outcome { truth, count }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_and_assumptions_parse() {
        assert_eq!(parse_param("q=1/10").unwrap(), ("q".into(), parse_rational("0.1").unwrap()));
        assert_eq!(parse_param("q = 0.25").unwrap().1, parse_rational("1/4").unwrap());
        assert!(parse_param("q").is_err());
        assert!(parse_param("q=x").is_err());
        let (k, (lo, hi)) = parse_assumption("q=0..1/2").unwrap();
        assert_eq!((k.as_str(), lo.to_string(), hi.to_string()), ("q", "0".into(), "1/2".into()));
        assert!(parse_assumption("q=1..0").is_err());
    }

    #[test]
    fn reports_round_trip() {
        let report = Report {
            command: Command::Invariant,
            program: Some("a.pbl".into()),
            result: Payload::Invariant {
                loop_index: 0,
                post: "Pr(d = 1)".into(),
                invariant: "q".into(),
                step: "q".into(),
                result: Verdict::Falsified {
                    witness: BeliefJson(Vec::new()),
                    params: BTreeMap::from([("q".into(), "1/2".into())]),
                    lhs: parse_rational("1/3").unwrap(),
                    rhs: parse_rational("1/2").unwrap(),
                },
            },
        };
        let text = report.to_json();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(input("x").code(), 1);
        assert_eq!(query("x").code(), 2);
    }
}
