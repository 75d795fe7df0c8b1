use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use maxline::fixtures::{make_fixture, stuck_check, FixtureKind};
use maxline::sim::{
    simulate, sweep, verify_file, AlgorithmId, Check, InitialSource, RunConfig, SweepAxis, SweepSpec,
};
use maxline::{RangeKind, RangeModel, Result, SchedulerSpec};

/// Exit status for errors (bad input, unreadable files, replay mismatch).
const EXIT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "maxline", version, about = "Simulate, verify and sweep robot formation algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its trace. Exit 0 converged, 2 budget
    /// exhausted, 3 invariant violated.
    Simulate(SimulateArgs),
    /// Replay a trace and run analysis checks over it. Exit 1 on violations.
    Verify(VerifyArgs),
    /// Run a grid of simulations in parallel and fit scaling exponents.
    Sweep(SweepArgs),
    /// Emit a fixture configuration and optionally its stuck report.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "maxline-oblot")]
    algorithm: AlgorithmId,
    /// fsync | ssync-random:P | ssync-roundrobin:K | ssync-adversary:FILE
    #[arg(long, default_value = "fsync")]
    scheduler: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long)]
    max_epochs: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Start from a fixture (c1, c2, alpha:X) instead of a random start.
    #[arg(long)]
    fixture: Option<FixtureKind>,
    /// Start from a configuration JSON file.
    #[arg(long)]
    initial: Option<PathBuf>,
    /// A full run configuration as JSON; overrides the other run flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Comma-separated checks; all applicable ones if omitted.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<Check>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated sizes, or the fixed size when --delta is given.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16])]
    n: Vec<usize>,
    /// Comma-separated diameters for spanning starts.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    /// Number of seeds per grid value, counting up from --seed.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// A sweep description as JSON; overrides the other sweep flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for per-cell traces.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Per-run rows.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Per-value means with fitted exponents.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, default_value = "c2")]
    kind: FixtureKind,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Write the configuration here instead of stdout.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write a stuck-check report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Range model for the stuck check.
    #[arg(long, default_value = "circular")]
    range: RangeKind,
    #[arg(long, default_value_t = 21)]
    probe_grid: usize,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<u8> {
    let mut cfg = match &args.config {
        Some(path) => read_json::<RunConfig>(path)?,
        None => {
            let r = &args.run;
            let initial = match (&args.fixture, &args.initial) {
                (Some(f), _) => InitialSource::Fixture { fixture: *f, scale: 1.0 },
                (None, Some(path)) => InitialSource::File { path: path.clone() },
                (None, None) => InitialSource::Random { n: args.n, seed: r.seed },
            };
            let mut cfg = RunConfig::new(r.algorithm, SchedulerSpec::parse(&r.scheduler, r.seed)?, initial)
                .with_epsilon(r.epsilon);
            cfg.max_epochs = r.max_epochs;
            cfg
        }
    };
    cfg.trace = args.trace.or(cfg.trace);
    let trace = simulate(&cfg)?;
    let summary = serde_json::json!({
        "algorithm": cfg.algorithm,
        "n": trace.header.initial.n(),
        "outcome": trace.end.outcome,
        "rounds": trace.end.rounds,
        "epochs": trace.end.epochs,
        "max_epochs": trace.header.max_epochs,
        "diagnostic": trace.end.diagnostic,
    });
    println!("{summary}");
    Ok(trace.end.outcome.exit_code() as u8)
}

fn run_verify(args: VerifyArgs) -> Result<u8> {
    let report = verify_file(&args.trace, &args.checks)?;
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    if let Some(path) = &args.csv {
        report.write_csv(path)?;
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    let min_ratio = report.epoch_checks.as_ref().and_then(|e| e.min_ratio);
    println!(
        "{}",
        serde_json::json!({
            "passed": report.passed(),
            "violations": report.violations.len(),
            "checks": report.checks,
            "min_ratio": min_ratio,
            "min_chain_ratio": report.min_chain_ratio,
        })
    );
    Ok(if report.passed() { 0 } else { 1 })
}

fn run_sweep(args: SweepArgs) -> Result<u8> {
    let spec = match &args.config {
        Some(path) => read_json::<SweepSpec>(path)?,
        None => {
            let r = &args.run;
            let axis = if args.delta.is_empty() {
                SweepAxis::N { values: args.n.clone() }
            } else {
                SweepAxis::Delta {
                    n: args.n.first().copied().unwrap_or(40),
                    values: args.delta.clone(),
                }
            };
            SweepSpec {
                algorithm: r.algorithm,
                scheduler: SchedulerSpec::parse(&r.scheduler, r.seed)?,
                axis,
                seeds: (r.seed..r.seed + args.seeds).collect(),
                epsilon: r.epsilon,
                max_epochs: r.max_epochs,
                trace_dir: args.trace.clone(),
            }
        }
    };
    let summary = sweep(&spec)?;
    if let Some(path) = &args.csv {
        summary.write_csv(path)?;
    }
    if let Some(path) = &args.report {
        summary.write_summary_csv(path)?;
    }
    for &(p, rounds, epochs) in &summary.means {
        println!("param {p}: mean rounds {rounds:.2}, mean epochs {epochs:.2}");
    }
    println!(
        "fitted exponents: rounds {:?}, epochs {:?}",
        summary.rounds_exponent, summary.epochs_exponent
    );
    Ok(if summary.all_converged() { 0 } else { 2 })
}

fn run_fixture(args: FixtureArgs) -> Result<u8> {
    let config = make_fixture(args.kind, args.scale)?;
    match &args.config {
        Some(path) => write_json(path, &config)?,
        None => println!("{}", serde_json::to_string_pretty(&config)?),
    }
    if let Some(path) = &args.report {
        let model = RangeModel::new(args.range, args.scale)?;
        write_json(path, &stuck_check(&config, &model, args.probe_grid)?)?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Fixture(a) => run_fixture(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
