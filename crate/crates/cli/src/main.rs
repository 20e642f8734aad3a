use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pblimp::rational::Rational;
use pblimp_cli::{dispatch, parse_assumption, parse_param, Command, ExitError, Payload, QueryConfig, Report};

#[derive(Parser)]
#[command(name = "pblimp", version, about = "Belief programs: check, execute, and bound them")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Parameter binding, e.g. `q=1/10` or `q=0.1`.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, Rational)>,
    /// Initial belief as JSON (inline or a file path).
    #[arg(long)]
    init: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and type-check a program.
    Check {
        program: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Exact terminal distributions under both semantics.
    Run {
        program: PathBuf,
        #[arg(long, default_value_t = 10)]
        fuel: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Push a postexpectation back through the program.
    Wp {
        program: PathBuf,
        #[arg(long)]
        post: String,
        /// Unroll every loop this many times (lower bound).
        #[arg(long)]
        unroll: Option<usize>,
        /// Invariant file; repeat once per loop, in source order (upper bound).
        #[arg(long = "invariant")]
        invariants: Vec<PathBuf>,
        #[arg(long = "assume", value_parser = parse_assumption)]
        assumptions: Vec<(String, (Rational, Rational))>,
        #[arg(long, env = "PBLIMP_SEED", default_value_t = 0)]
        seed: u64,
        /// Beliefs tried by the falsifier.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check that a predicate is an invariant of a loop.
    Invariant {
        program: PathBuf,
        #[arg(long)]
        post: String,
        #[arg(long = "invariant")]
        invariant: PathBuf,
        /// Loop to check, counted in source order from 0.
        #[arg(long = "loop", default_value_t = 0)]
        loop_index: usize,
        /// Interval for an unbound parameter, e.g. `q=0..1`.
        #[arg(long = "assume", value_parser = parse_assumption)]
        assumptions: Vec<(String, (Rational, Rational))>,
        #[arg(long, env = "PBLIMP_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo runs of the full semantics.
    Simulate {
        program: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Count terminated runs whose true state satisfies this proposition.
        #[arg(long)]
        event: Option<String>,
        #[arg(long, env = "PBLIMP_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare wp against execution on a generated corpus.
    Difftest {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, env = "PBLIMP_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn apply(cfg: &mut QueryConfig, common: Common) {
    cfg.params = common.params.into_iter().collect();
    cfg.init = common.init;
    cfg.output = common.output;
}

fn config(cmd: Cmd) -> QueryConfig {
    match cmd {
        Cmd::Check { program, output } => {
            let mut cfg = QueryConfig::new(Command::Check);
            cfg.program = Some(program);
            cfg.output = output;
            cfg
        }
        Cmd::Run { program, fuel, common } => {
            let mut cfg = QueryConfig::new(Command::Run);
            cfg.program = Some(program);
            cfg.fuel = fuel;
            apply(&mut cfg, common);
            cfg
        }
        Cmd::Wp { program, post, unroll, invariants, assumptions, seed, samples, common } => {
            let mut cfg = QueryConfig::new(Command::Wp);
            cfg.program = Some(program);
            cfg.post = Some(post);
            cfg.unroll = unroll;
            cfg.invariants = invariants;
            cfg.assumptions = assumptions.into_iter().collect();
            cfg.seed = seed;
            cfg.samples = samples;
            apply(&mut cfg, common);
            cfg
        }
        Cmd::Invariant { program, post, invariant, loop_index, assumptions, seed, samples, common } => {
            let mut cfg = QueryConfig::new(Command::Invariant);
            cfg.program = Some(program);
            cfg.post = Some(post);
            cfg.invariants = vec![invariant];
            cfg.loop_index = loop_index;
            cfg.assumptions = assumptions.into_iter().collect();
            cfg.seed = seed;
            cfg.samples = samples;
            apply(&mut cfg, common);
            cfg
        }
        Cmd::Simulate { program, runs, max_steps, event, seed, common } => {
            let mut cfg = QueryConfig::new(Command::Simulate);
            cfg.program = Some(program);
            cfg.runs = runs;
            cfg.max_steps = max_steps;
            cfg.event = event;
            cfg.seed = seed;
            apply(&mut cfg, common);
            cfg
        }
        Cmd::Difftest { count, seed, output } => {
            let mut cfg = QueryConfig::new(Command::Difftest);
            cfg.count = count;
            cfg.seed = seed;
            cfg.output = output;
            cfg
        }
    }
}

fn emit(cfg: &QueryConfig, report: &Report) -> Result<(), ExitError> {
    let text = report.to_json();
    match &cfg.output {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| ExitError::Input(format!("{}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(ExitError::Input(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse().command);
    let outcome = dispatch(&cfg).and_then(|r| emit(&cfg, &r));
    let Err(err) = outcome else {
        return ExitCode::SUCCESS;
    };
    match &err {
        ExitError::Rejected(report) => {
            if let Payload::Check { diagnostics, .. } = &report.result {
                for d in diagnostics {
                    eprintln!("type error: {} (in `{}`)", d.message, d.statement);
                }
            }
            let _ = emit(&cfg, report);
        }
        ExitError::Violations(summary) => {
            for v in &summary.violations {
                eprintln!("program {}: {}: {}", v.program, v.property, v.detail);
            }
            let report = Report { command: Command::Difftest, program: None, result: Payload::Difftest { summary: (**summary).clone() } };
            let _ = emit(&cfg, &report);
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(err.code())
}
