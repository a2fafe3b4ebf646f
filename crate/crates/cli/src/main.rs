use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pathcov::alpha::{alpha_approx, alpha_exact, AlphaMatrix};
use pathcov::generate::random_trim_automaton;
use pathcov::harness::{run_experiment, ExperimentConfig, DEFAULT_THRESHOLDS};
use pathcov::lp::{build_lp, solve_lp, verify_solution};
use pathcov::{num_paths, parse_automaton, Automaton, RngHandle, StrategyRegistry, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "pathcov",
    version,
    about = "Coverage-biased random path generation for finite automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count successful paths of each length up to the bound
    Count(CountArgs),
    /// Compute the conditional visit matrix alpha
    Alpha(AlphaArgs),
    /// Solve the max-min coverage LP and print the distribution
    Solve(SolveArgs),
    /// Run repeated coverage trials for several strategies
    Explore(ExploreArgs),
    /// Write a random trim automaton
    Gen(GenArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model file
    #[arg(long)]
    model: PathBuf,
    /// Maximum path length (default: twice the eccentricity)
    #[arg(long, short = 'N')]
    length_bound: Option<usize>,
}

impl ModelArgs {
    fn load(&self) -> Result<(Automaton, usize)> {
        let text = fs::read_to_string(&self.model)
            .with_context(|| format!("reading {}", self.model.display()))?;
        let a = parse_automaton(&text)?.trim()?;
        let bound = self
            .length_bound
            .unwrap_or_else(|| a.default_length_bound());
        if bound == 0 {
            bail!(pathcov::Error::Domain(
                "length bound must be at least 1".into()
            ));
        }
        Ok((a, bound))
    }

    fn name(&self) -> String {
        self.model
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

/// `u64` or `random`.
fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    if s == "random" {
        let seed = rand::random();
        eprintln!("seed {seed}");
        Ok(seed)
    } else {
        s.parse()
            .map_err(|_| format!("expected an integer or `random`, got {s:?}"))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlphaMode {
    Exact,
    Approx,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AlphaParams {
    #[arg(long, value_enum, default_value = "exact")]
    mode: AlphaMode,
    /// Step-1 samples per state, for approx mode
    #[arg(long, default_value_t = 10)]
    m_factor: usize,
    /// Refinement threshold and conditioned sample count, for approx mode
    #[arg(short, long, default_value_t = 10)]
    r: usize,
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
}

impl AlphaParams {
    fn compute(&self, a: &Automaton, bound: usize) -> Result<AlphaMatrix> {
        let alpha = match self.mode {
            AlphaMode::Exact => alpha_exact(a, bound)?,
            AlphaMode::Approx => {
                if self.m_factor == 0 {
                    bail!(pathcov::Error::Domain("m-factor must be at least 1".into()));
                }
                alpha_approx(a, bound, self.m_factor * a.num_states(), self.r, self.seed)?
            }
        };
        if let Some(stats) = alpha.stats() {
            for &j in &stats.refined_columns {
                eprintln!(
                    "refined column {} from {} conditioned paths ({} of {} samples visited it)",
                    a.state_name(j),
                    self.r,
                    stats.visits[j as usize],
                    stats.samples
                );
            }
            for &j in &stats.zero_columns {
                eprintln!(
                    "warning: state {} never sampled; its column is zero",
                    a.state_name(j)
                );
            }
        }
        Ok(alpha)
    }
}

#[derive(Args)]
struct AlphaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    params: AlphaParams,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SolveArgs {
    /// Alpha matrix in CSV or JSON, instead of a model
    #[arg(long, conflicts_with_all = ["model", "length_bound"])]
    alpha: Option<PathBuf>,
    #[arg(long, required_unless_present = "alpha")]
    model: Option<PathBuf>,
    #[arg(long, short = 'N')]
    length_bound: Option<usize>,
    #[command(flatten)]
    params: AlphaParams,
    /// Lower bound on every probability
    #[arg(long)]
    floor: Option<f64>,
    /// Also write the LP in MPS format
    #[arg(long)]
    mps: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExploreArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// rw, uniform, exact or approx:<m-factor>:<r>; repeatable
    #[arg(long = "strategy", default_values = ["rw", "uniform", "exact", "approx:10:10", "approx:1000:10"])]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated coverage percentages
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_THRESHOLDS)]
    thresholds: Vec<f64>,
    /// Paths per trial before giving up (default: calibrated)
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Write timings here instead of stderr
    #[arg(long)]
    timings: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GenArgs {
    /// States before trimming
    #[arg(long)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
    #[arg(long, default_value_t = 0.5)]
    final_density: f64,
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn count(args: CountArgs) -> Result<()> {
    let (a, bound) = args.model.load()?;
    let table = num_paths(&a, bound);
    let totals = table.totals();
    let text = match args.format {
        TextFormat::Text => {
            let mut parts: Vec<String> =
                (1..=bound).map(|l| format!("{l}:{}", totals[l])).collect();
            parts.push(format!("total:{}", table.grand_total()));
            parts.join(" ") + "\n"
        }
        TextFormat::Json => {
            let per_length: Vec<String> = totals[1..].iter().map(|t| t.to_string()).collect();
            let doc = json!({
                "length_bound": bound,
                "per_length": per_length,
                "total": table.grand_total().to_string(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    args.output.emit(&text)
}

fn alpha(args: AlphaArgs) -> Result<()> {
    let (a, bound) = args.model.load()?;
    let alpha = args.params.compute(&a, bound)?;
    let text = match args.format {
        TableFormat::Csv => alpha.to_csv(),
        TableFormat::Json => alpha.to_json() + "\n",
    };
    args.output.emit(&text)
}

fn read_alpha(path: &Path) -> Result<AlphaMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let alpha = if text.trim_start().starts_with('{') {
        AlphaMatrix::from_json(&text)?
    } else {
        AlphaMatrix::from_csv(&text)?
    };
    Ok(alpha)
}

fn solve(args: SolveArgs) -> Result<()> {
    let alpha = match (&args.alpha, &args.model) {
        (Some(path), _) => read_alpha(path)?,
        (None, Some(model)) => {
            let m = ModelArgs {
                model: model.clone(),
                length_bound: args.length_bound,
            };
            let (a, bound) = m.load()?;
            args.params.compute(&a, bound)?
        }
        (None, None) => unreachable!("clap requires one of --alpha and --model"),
    };
    let lp = build_lp(&alpha, args.floor)?;
    if let Some(path) = &args.mps {
        fs::write(path, lp.to_mps()).with_context(|| format!("writing {}", path.display()))?;
    }
    let start = Instant::now();
    let dist = solve_lp(&lp)?;
    eprintln!(
        "solved in {:.3}s, {} pivots",
        start.elapsed().as_secs_f64(),
        dist.iterations
    );
    let check = verify_solution(&alpha, &dist);
    let text = match args.format {
        TextFormat::Text => {
            let mut out = format!("p_min {}\n", dist.p_min);
            for (label, p) in alpha.labels().iter().zip(&dist.pi) {
                out.push_str(&format!("pi {label} {p}\n"));
            }
            out
        }
        TextFormat::Json => {
            let pi: serde_json::Map<String, serde_json::Value> = alpha
                .labels()
                .iter()
                .cloned()
                .zip(dist.pi.iter().map(|&p| json!(p)))
                .collect();
            let doc = json!({
                "p_min": dist.p_min,
                "lp_objective": dist.lp_objective,
                "status": dist.status,
                "iterations": dist.iterations,
                "pi": pi,
                "residuals": {
                    "mass": check.mass_residual,
                    "bounds": check.bound_residual,
                    "coverage": check.coverage_residual,
                },
                "certified_optimal": check.optimal,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    args.output.emit(&text)
}

fn explore(args: ExploreArgs) -> Result<()> {
    let (a, bound) = args.model.load()?;
    let registry = StrategyRegistry::default();
    let strategies = args
        .strategies
        .iter()
        .map(|s| registry.build(s))
        .collect::<pathcov::Result<Vec<_>>>()?;
    let config = ExperimentConfig {
        thresholds: args.thresholds.clone(),
        trials: args.trials,
        cap: args.cap,
        seed: args.seed,
        workers: args.workers,
        length_bound: Some(bound),
    };
    let outcome = run_experiment(&args.model.name(), Arc::new(a), &strategies, &config)?;
    for s in &outcome.report.strategies {
        for w in &s.warnings {
            eprintln!("warning: {}: {w}", s.strategy);
        }
    }
    let timings = serde_json::to_string_pretty(&outcome.timings)? + "\n";
    match &args.timings {
        Some(path) => {
            fs::write(path, timings).with_context(|| format!("writing {}", path.display()))?
        }
        None => eprint!("{timings}"),
    }
    let text = match args.format {
        TableFormat::Csv => outcome.report.to_csv(),
        TableFormat::Json => outcome.report.to_json() + "\n",
    };
    args.output.emit(&text)
}

fn gen(args: GenArgs) -> Result<()> {
    let a = random_trim_automaton(
        args.states,
        args.alphabet,
        args.final_density,
        &mut RngHandle::new(args.seed),
    )?;
    args.output.emit(&a.to_string())
}

/// Machine-readable code for the error class.
fn error_code(err: &anyhow::Error) -> &'static str {
    if let Some(e) = err.downcast_ref::<pathcov::Error>() {
        e.code()
    } else if err.chain().any(|c| c.is::<std::io::Error>()) {
        "E_IO"
    } else {
        "E_OTHER"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(args) => count(args),
        Command::Alpha(args) => alpha(args),
        Command::Solve(args) => solve(args),
        Command::Explore(args) => explore(args),
        Command::Gen(args) => gen(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let message = format!("{err:#}").replace('\n', " ");
            eprintln!("{}: {message}", error_code(&err));
            ExitCode::FAILURE
        }
    }
}
