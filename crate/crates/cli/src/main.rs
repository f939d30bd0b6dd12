//! `rankfit`: explains a given ranking of tuples by a linear scoring
//! function. Every solving subcommand reads a relation CSV and a ranking
//! file and writes a JSON report.
//!
//! Exit codes: 0 on success, 1 on errors, 2 on usage errors and 3 when
//! `sat` finds the ranking cannot be reproduced exactly.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rankfit_core::approx::{cell_solve, local_explain, SeedStrategy};
use rankfit_core::baselines::{
    baseline_report, linear_regression_weights, ordinal_regression_weights, sampling_search, SampleBudget,
};
use rankfit_core::evalverify::{solve, solve_with_escalation, ExplanationReport, Mode, ReportStatus, SolveOptions};
use rankfit_core::formulate::EpsilonConfig;
use rankfit_core::model::{
    build_unsat_ranking, generate_uniform, sum_ranking, transform_weights, NormMode, NormalizationStats,
};
use rankfit_core::{ObjectiveKind, ProblemSpec};
use serde::Serialize;

const EXIT_UNSAT: u8 = 3;

#[derive(Parser)]
#[command(name = "rankfit", version, about = "Explain a ranking with a linear scoring function")]
struct Cli {
    /// Solver threads. The engine currently runs on one thread.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether some weight vector reproduces the top-k exactly.
    Sat(SatArgs),
    /// Find weights minimizing the position error of the top-k.
    Opt(OptArgs),
    /// Optimize inside a small box around a seed weight vector.
    Cell(CellArgs),
    /// Explain a shrinking prefix until the error is acceptable.
    Local(LocalArgs),
    /// Run a competitor method and evaluate its weights.
    Baseline(BaselineArgs),
    /// Evaluate a given weight vector.
    Verify(VerifyArgs),
    /// Convert raw-data weights to weights on normalized data.
    Normalize(NormalizeArgs),
    /// Generate a synthetic relation.
    Gen(GenArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Relation CSV: an id column followed by numeric attributes.
    #[arg(long)]
    data: PathBuf,
    /// Ranking file: one id per line, later lines prefixed by `>` or `=`.
    #[arg(long)]
    ranking: PathBuf,
    #[arg(long)]
    k: usize,
    /// Weight predicate file, one linear constraint per line.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Drop duplicate tuples before solving.
    #[arg(long)]
    dedup: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SatArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Report the first solve without verifying and escalating eps1.
    #[arg(long)]
    no_escalate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Sum,
    Max,
}

#[derive(Args)]
struct OptArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// CSV of `id,factor` rows.
    #[arg(long)]
    importance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sum")]
    objective: Objective,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Keep indicator variables for pairs decided by dominance.
    #[arg(long)]
    no_prune: bool,
    #[arg(long)]
    no_escalate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedKind {
    Sample,
    Window,
    Lr,
    Ordreg,
    Explicit,
}

#[derive(Args)]
struct CellArgs {
    #[command(flatten)]
    opt: OptArgs,
    #[arg(long, value_enum, default_value = "sample")]
    seed_strategy: SeedKind,
    /// Half-width of the box around the seed.
    #[arg(long, default_value_t = 0.05)]
    cell_size: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window length for the window seed (default: min(k, 10)).
    #[arg(long)]
    window: Option<usize>,
    /// Seed weights for the explicit strategy.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct LocalArgs {
    #[command(flatten)]
    opt: OptArgs,
    /// Factor applied to k on every round.
    #[arg(long, default_value_t = 0.8)]
    shrink: f64,
    /// Largest acceptable error of a reduced problem.
    #[arg(long, default_value_t = 0.0)]
    max_error: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Lr,
    Ordreg,
    Sample,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    method: BaselineKind,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    importance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sum")]
    objective: Objective,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// JSON array, JSON report, or `attribute,weight` CSV.
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    importance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sum")]
    objective: Objective,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Minmax,
    Mean,
    Zscore,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, value_enum)]
    mode: NormKind,
    /// Also write the normalized relation here.
    #[arg(long)]
    out_data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit a ranking no weight vector reproduces.
    #[arg(long, requires = "ranking_out")]
    unsat: bool,
    /// Relation CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ranking file destination. Without `--unsat` the ranking orders tuples
    /// by attribute sum.
    #[arg(long)]
    ranking_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Sat(a) => sat(a),
        Command::Opt(a) => {
            let spec = opt_spec(&a)?;
            let report = solve_mode(&spec, Mode::Opt, &solve_options(&a)?, a.no_escalate)?;
            finish(&report, &a.input.out)
        }
        Command::Cell(a) => cell(a),
        Command::Local(a) => local(a),
        Command::Baseline(a) => baseline(a),
        Command::Verify(a) => verify(a),
        Command::Normalize(a) => normalize(a),
        Command::Gen(a) => gen(a),
    }
}

fn eps_config(eps1: Option<f64>, eps2: Option<f64>, tau: Option<f64>) -> EpsilonConfig {
    let mut eps = EpsilonConfig::default();
    if let Some(t) = tau {
        eps.tau = t;
    }
    if let Some(e) = eps1 {
        eps.eps1 = e;
    }
    if let Some(e) = eps2 {
        eps.eps2 = e;
    }
    eps
}

fn objective_kind(o: Objective) -> ObjectiveKind {
    match o {
        Objective::Sum => ObjectiveKind::Sum,
        Objective::Max => ObjectiveKind::Max,
    }
}

fn time_limit(seconds: Option<f64>) -> Result<Option<Duration>> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).context("--time-limit must be a nonnegative number of seconds"))
        .transpose()
}

fn base_spec(input: &InputArgs, eps: EpsilonConfig, importance: Option<&PathBuf>) -> Result<ProblemSpec> {
    let mut spec = input::load_spec(&input.data, &input.ranking, input.k, input.dedup)?.with_eps(eps);
    if let Some(path) = &input.constraints {
        let predicate = input::load_predicate(path, spec.relation.columns())?;
        spec = spec.with_predicate(predicate)?;
    }
    if let Some(path) = importance {
        spec = spec.with_importance(&input::load_importance(path)?)?;
    }
    Ok(spec)
}

fn opt_spec(a: &OptArgs) -> Result<ProblemSpec> {
    Ok(base_spec(&a.input, eps_config(a.eps1, a.eps2, a.tau), a.importance.as_ref())?
        .with_objective(objective_kind(a.objective)))
}

fn solve_options(a: &OptArgs) -> Result<SolveOptions> {
    Ok(SolveOptions {
        time_limit: time_limit(a.time_limit)?,
        prune: !a.no_prune,
        ..SolveOptions::default()
    })
}

fn solve_mode(spec: &ProblemSpec, mode: Mode, opts: &SolveOptions, no_escalate: bool) -> Result<ExplanationReport> {
    Ok(if no_escalate {
        solve(spec, mode, opts)?
    } else {
        solve_with_escalation(spec, mode, opts)?
    })
}

fn sat(a: SatArgs) -> Result<ExitCode> {
    let spec = base_spec(&a.input, eps_config(a.eps1, None, a.tau), None)?;
    let opts = SolveOptions {
        time_limit: time_limit(a.time_limit)?,
        ..SolveOptions::default()
    };
    let report = solve_mode(&spec, Mode::Sat, &opts, a.no_escalate)?;
    finish(&report, &a.input.out)?;
    Ok(if report.status == ReportStatus::Unsatisfiable {
        ExitCode::from(EXIT_UNSAT)
    } else {
        ExitCode::SUCCESS
    })
}

fn cell(a: CellArgs) -> Result<ExitCode> {
    let spec = opt_spec(&a.opt)?;
    let strategy = match a.seed_strategy {
        SeedKind::Sample => SeedStrategy::Sampling {
            budget: SampleBudget::Count(a.samples),
            seed: a.seed,
        },
        SeedKind::Window => SeedStrategy::SlidingWindow {
            window: a.window.unwrap_or(spec.k.min(10)),
        },
        SeedKind::Lr => SeedStrategy::LinearRegression,
        SeedKind::Ordreg => SeedStrategy::OrdinalRegression,
        SeedKind::Explicit => {
            let path = a.weights.as_ref().context("--seed-strategy explicit needs --weights")?;
            SeedStrategy::Explicit(input::load_weights(path, spec.relation.columns())?)
        }
    };
    let res = cell_solve(&spec, &strategy, a.cell_size, &solve_options(&a.opt)?)?;
    let mut report = res.report;
    report.notes.push(format!("seed {:?} with error {}", res.seed.as_slice(), res.seed_error));
    finish(&report, &a.opt.input.out)
}

fn local(a: LocalArgs) -> Result<ExitCode> {
    let spec = opt_spec(&a.opt)?;
    let max_error = a.max_error;
    let exception = move |r: &ExplanationReport| match r.status {
        ReportStatus::Optimal | ReportStatus::Satisfiable => r.error_value().is_none_or(|e| e > max_error),
        _ => true,
    };
    let res = local_explain(&spec, a.shrink, &exception, &solve_options(&a.opt)?)?;
    let mut report = res.report;
    report.method = "local".into();
    report.notes.push(format!(
        "explained the top {} plus {} further tuples after {} attempts",
        res.size.k,
        res.size.lower,
        res.attempts.len()
    ));
    finish(&report, &a.opt.input.out)
}

fn baseline(a: BaselineArgs) -> Result<ExitCode> {
    let spec = base_spec(&a.input, eps_config(a.eps1, None, a.tau), a.importance.as_ref())?
        .with_objective(objective_kind(a.objective));
    let (name, w) = match a.method {
        BaselineKind::Lr => ("lr", linear_regression_weights(&spec.relation, &spec.ranking)?.projected),
        BaselineKind::Ordreg => ("ordreg", ordinal_regression_weights(&spec)?.weights),
        BaselineKind::Sample => {
            let res = sampling_search(&spec, SampleBudget::Count(a.samples), a.seed)?;
            let w = res.weights.context("no sampled weight vector satisfied the weight constraints")?;
            ("sample", w)
        }
    };
    finish(&baseline_report(&spec, name, &w), &a.input.out)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let spec = base_spec(&a.input, eps_config(None, None, a.tau), a.importance.as_ref())?
        .with_objective(objective_kind(a.objective));
    let w = input::load_weights(&a.weights, spec.relation.columns())?;
    finish(&ExplanationReport::for_weights(&spec, "verify", &w), &a.input.out)
}

#[derive(Serialize)]
struct NormalizeReport<'a> {
    schema: u32,
    mode: NormMode,
    attributes: &'a [String],
    weights: &'a [f64],
    normalized_weights: &'a [f64],
    stats: &'a NormalizationStats,
}

fn normalize(a: NormalizeArgs) -> Result<ExitCode> {
    let relation = rankfit_core::model::load_relation(&a.data, false)
        .with_context(|| format!("reading {}", a.data.display()))?;
    let w = input::load_weights(&a.weights, relation.columns())?;
    let mode = match a.mode {
        NormKind::Minmax => NormMode::MinMax,
        NormKind::Mean => NormMode::Mean,
        NormKind::Zscore => NormMode::ZScore,
    };
    let stats = NormalizationStats::compute(&relation);
    let t = transform_weights(&w, &stats, mode)?;
    if let Some(path) = &a.out_data {
        let norm = stats.normalize(&relation, mode)?;
        std::fs::write(path, norm.to_csv_string()).with_context(|| format!("writing {}", path.display()))?;
    }
    let report = NormalizeReport {
        schema: 1,
        mode,
        attributes: relation.columns(),
        weights: w.as_slice(),
        normalized_weights: t.as_slice(),
        stats: &stats,
    };
    emit(&serde_json::to_string_pretty(&report)?, &a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    if a.n == 0 || a.m == 0 {
        bail!("--n and --m must be positive");
    }
    let relation = generate_uniform(a.n, a.m, a.seed)?;
    if let Some(path) = &a.ranking_out {
        let ranking = if a.unsat {
            build_unsat_ranking(&relation)?
        } else {
            sum_ranking(&relation)
        };
        std::fs::write(path, ranking.to_text(&relation)).with_context(|| format!("writing {}", path.display()))?;
    }
    let csv = relation.to_csv_string();
    match &a.out {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(json: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn finish(report: &ExplanationReport, out: &Option<PathBuf>) -> Result<ExitCode> {
    emit(&report.to_json(), out)?;
    Ok(ExitCode::SUCCESS)
}
