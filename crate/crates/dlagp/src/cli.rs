//! Command-line interface.
//!
//! Seven subcommands over the library: `optimize` (one single-machine run),
//! `simulate` (one multi-client run), `budget-sweep` and `oracle-sweep`
//! (experiment grids), `lower-bound` and `center-est` (certificate checks),
//! and `ingest` (data preparation). Rows go to `--out` or stdout in the
//! fixed CSV/JSON schema; human-readable summaries go to stderr.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numeric runtime
//! failure, 3 certificate violation.
//!
//! Every value flag can also be given in a `--config` file as a
//! `key = value` line (the flag wins when both are present).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::data::{write_libsvm, LabelMap, RawDataset};
use crate::distributed::DlagpMode;
use crate::experiment::{
    parse_config_file, render, run_budget_sweep, run_center_est, run_lower_bound,
    run_optimize, run_oracle_sweep, run_simulate, BudgetSweepConfig, CenterEstConfig,
    DataSource, LowerBoundConfig, OptimizeConfig, OracleSweepConfig, OutputFormat,
    ResultRow, SimulateConfig, StrategyName, epsilon_ladder,
};
use crate::losses::LossKind;
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dlagp",
    version,
    about = "Convex optimization under adversarially perturbed gradients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the early-stopping method once on a single objective.
    Optimize(OptimizeArgs),
    /// Run one multi-client round-based optimization.
    Simulate(SimulateArgs),
    /// Sweep total query budgets and record final losses.
    BudgetSweep(BudgetSweepArgs),
    /// Sweep perturbation strategies and levels on one objective.
    OracleSweep(OracleSweepArgs),
    /// Check the adversarial lower-bound certificates.
    LowerBound(LowerBoundArgs),
    /// Monte Carlo check of the sampled-center accuracy certificate.
    CenterEst(CenterEstArgs),
    /// Read a sparse data file, map labels, drop features, append a bias.
    Ingest(IngestArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug)]
struct CommonArgs {
    /// `key = value` file supplying any missing flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for all randomness in the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path for the result rows (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Row format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

/// Flags selecting the dataset.
#[derive(Args, Debug)]
struct DataArgs {
    /// Sparse `label index:value` data file (synthetic data when absent).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Synthetic example count.
    #[arg(long)]
    n: Option<usize>,
    /// Synthetic dimension (including the bias feature).
    #[arg(long)]
    d: Option<usize>,
    /// Make the synthetic labels perfectly separable.
    #[arg(long)]
    separable: bool,
    /// Label mapping for data files, e.g. `-1=0,1=1`.
    #[arg(long, allow_hyphen_values = true)]
    label_map: Option<String>,
    /// Comma-separated 1-based feature indices to drop from data files.
    #[arg(long)]
    drop_dims: Option<String>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Perturbation level the oracle may use.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Target suboptimality gap.
    #[arg(long)]
    tau: Option<f64>,
    /// Assumed bound on the minimizer norm.
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Explicit iteration count (overrides the schedule).
    #[arg(long = "K")]
    k: Option<usize>,
    /// Oracle strategy.
    #[arg(long)]
    strategy: Option<String>,
    /// Loss: quadratic, rr, or bce.
    #[arg(long)]
    loss: Option<String>,
    /// Disable the small-gradient early return.
    #[arg(long)]
    no_early_stop: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Total query budget; selects budget mode.
    #[arg(long = "Q")]
    q: Option<u64>,
    /// Failure probability for sampled mode; selects sampled mode.
    #[arg(long)]
    delta: Option<f64>,
    /// Strategy every client answers with.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    loss: Option<String>,
}

#[derive(Args, Debug)]
struct BudgetSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Single budget (replaces the default budget list).
    #[arg(long = "Q")]
    q: Option<u64>,
    /// Comma-separated budget list.
    #[arg(long)]
    qs: Option<String>,
    /// Comma-separated per-run seeds.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    loss: Option<String>,
}

#[derive(Args, Debug)]
struct OracleSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Base perturbation for the default ladder {0, e, 4e, 16e}.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Comma-separated explicit perturbation levels.
    #[arg(long)]
    epsilons: Option<String>,
    /// Iterations per run.
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Restrict the sweep to one strategy.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    loss: Option<String>,
}

#[derive(Args, Debug)]
struct LowerBoundArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target gap for the retroactive adversary.
    #[arg(long)]
    tau: Option<f64>,
    /// Smoothness for the retroactive adversary.
    #[arg(long)]
    smoothness: Option<f64>,
    /// Number of random transcripts.
    #[arg(long)]
    transcripts: Option<usize>,
    /// Queries per transcript.
    #[arg(long)]
    transcript_len: Option<usize>,
    /// Grid override: semicolon-separated `L,R,epsilon` triples.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Debug)]
struct CenterEstArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Point count.
    #[arg(long)]
    n: Option<usize>,
    /// Dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Norm bound for the generated points.
    #[arg(long)]
    b: Option<f64>,
    /// Target accuracy.
    #[arg(long)]
    t: Option<f64>,
    /// Certified failure probability.
    #[arg(long)]
    delta: Option<f64>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input data file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label mapping, e.g. `-1=0,1=1`.
    #[arg(long, allow_hyphen_values = true)]
    label_map: Option<String>,
    /// Comma-separated 1-based feature indices to drop.
    #[arg(long)]
    drop_dims: Option<String>,
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 for numeric failures surfaced mid-run; 1 for everything reachable by
/// bad input or configuration.
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NonFiniteReply { .. } => 2,
        _ => 1,
    }
}

// --- merge helpers ---------------------------------------------------------

type Overlay = BTreeMap<String, String>;

fn load_overlay(config: Option<&Path>) -> Result<Overlay> {
    match config {
        Some(path) => parse_config_file(path),
        None => Ok(Overlay::new()),
    }
}

/// Config-file fallback for one key; flag values take precedence.
fn over<T: FromStr>(overlay: &Overlay, key: &str) -> Result<Option<T>> {
    match overlay.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            Error::InvalidParameter(format!("config key `{key}`: cannot parse `{raw}`"))
        }),
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| Error::InvalidParameter(format!("bad {what} entry `{p}`")))
        })
        .collect()
}

fn parse_drop_dims(s: &str) -> Result<BTreeSet<usize>> {
    Ok(parse_list::<usize>(s, "feature index")?.into_iter().collect())
}

fn parse_grid(s: &str) -> Result<Vec<(f64, f64, f64)>> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|triple| {
            let parts = parse_list::<f64>(triple, "grid value")?;
            if parts.len() != 3 {
                return Err(Error::InvalidParameter(format!(
                    "grid cell `{triple}` needs exactly L,R,epsilon"
                )));
            }
            Ok((parts[0], parts[1], parts[2]))
        })
        .collect()
}

struct CommonSettings {
    seed: u64,
    out: Option<PathBuf>,
    format: OutputFormat,
}

fn resolve_common(common: &CommonArgs, overlay: &Overlay) -> Result<CommonSettings> {
    let seed = common.seed.or(over(overlay, "seed")?).unwrap_or(0);
    let out = common
        .out
        .clone()
        .or(over::<PathBuf>(overlay, "out")?);
    let format = match &common.format {
        Some(f) => f.parse()?,
        None => over::<String>(overlay, "format")?
            .map(|f| f.parse())
            .transpose()?
            .unwrap_or(OutputFormat::Csv),
    };
    Ok(CommonSettings { seed, out, format })
}

fn resolve_source(data: &DataArgs, overlay: &Overlay, seed: u64, default_n: usize) -> Result<DataSource> {
    let file = data.data.clone().or(over::<PathBuf>(overlay, "data")?);
    Ok(match file {
        Some(path) => DataSource::File(path),
        None => DataSource::Synthetic {
            n: data.n.or(over(overlay, "n")?).unwrap_or(default_n),
            d: data.d.or(over(overlay, "d")?).unwrap_or(5),
            seed,
            separable: data.separable || over(overlay, "separable")?.unwrap_or(false),
        },
    })
}

fn resolve_label_map(raw: &Option<String>, overlay: &Overlay) -> Result<LabelMap> {
    match raw.clone().or(over::<String>(overlay, "label-map")?) {
        Some(s) => s.parse(),
        // Accept both the 0/1 and the -1/+1 labeling conventions.
        None => LabelMap::new(vec![(-1.0, 0.0), (0.0, 0.0), (1.0, 1.0)]),
    }
}

fn resolve_drop_dims(raw: &Option<String>, overlay: &Overlay) -> Result<BTreeSet<usize>> {
    match raw.clone().or(over::<String>(overlay, "drop-dims")?) {
        Some(s) => parse_drop_dims(&s),
        None => Ok(BTreeSet::new()),
    }
}

fn resolve_loss(raw: &Option<String>, overlay: &Overlay, default: LossKind) -> Result<LossKind> {
    match raw.clone().or(over::<String>(overlay, "loss")?) {
        Some(s) => s.parse(),
        None => Ok(default),
    }
}

fn resolve_strategy(
    raw: &Option<String>,
    overlay: &Overlay,
    default: StrategyName,
) -> Result<StrategyName> {
    match raw.clone().or(over::<String>(overlay, "strategy")?) {
        Some(s) => s.parse(),
        None => Ok(default),
    }
}

fn write_rows(rows: Vec<ResultRow>, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let text = render(rows, format);
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// --- subcommands ------------------------------------------------------------

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Optimize(args) => cmd_optimize(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::BudgetSweep(args) => cmd_budget_sweep(args),
        Command::OracleSweep(args) => cmd_oracle_sweep(args),
        Command::LowerBound(args) => cmd_lower_bound(args),
        Command::CenterEst(args) => cmd_center_est(args),
        Command::Ingest(args) => cmd_ingest(args),
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;
    let source = resolve_source(&args.data, &overlay, common.seed, 200)?;
    let loss = resolve_loss(&args.loss, &overlay, LossKind::BinaryCrossEntropy)?;

    let mut cfg = OptimizeConfig::new(source, loss);
    cfg.seed = common.seed;
    cfg.strategy = resolve_strategy(&args.strategy, &overlay, StrategyName::Exact)?;
    cfg.epsilon = args.epsilon.or(over(&overlay, "epsilon")?).unwrap_or(cfg.epsilon);
    cfg.tau = args.tau.or(over(&overlay, "tau")?);
    cfg.radius = args.radius.or(over(&overlay, "R")?).unwrap_or(cfg.radius);
    cfg.k_override = args.k.or(over(&overlay, "K")?);
    cfg.early_stop = !args.no_early_stop && !over(&overlay, "no-early-stop")?.unwrap_or(false);
    cfg.label_map = resolve_label_map(&args.data.label_map, &overlay)?;
    cfg.drop_dims = resolve_drop_dims(&args.data.drop_dims, &overlay)?;

    let (report, rows) = run_optimize(&cfg)?;
    eprintln!(
        "optimize: {} iterations of {} planned, final loss {:.6e}, best {:.6e}{}{}",
        report.iterations,
        report.planned_k,
        report.final_loss,
        report.best_loss,
        if report.early_stopped { ", stopped early" } else { "" },
        if report.outside_guarantee {
            " (outside the guaranteed regime)"
        } else {
            ""
        }
    );
    write_rows(rows, common.format, common.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;
    let source = resolve_source(&args.data, &overlay, common.seed, 50)?;
    let loss = resolve_loss(&args.loss, &overlay, LossKind::BinaryCrossEntropy)?;
    let tau = args.tau.or(over(&overlay, "tau")?).unwrap_or(0.25);

    let mut cfg = SimulateConfig::new(source, loss, tau);
    cfg.seed = common.seed;
    cfg.strategy = resolve_strategy(&args.strategy, &overlay, StrategyName::RandomMix)?;
    cfg.epsilon = args.epsilon.or(over(&overlay, "epsilon")?).unwrap_or(cfg.epsilon);
    cfg.radius = args.radius.or(over(&overlay, "R")?).unwrap_or(cfg.radius);
    cfg.label_map = resolve_label_map(&args.data.label_map, &overlay)?;
    cfg.drop_dims = resolve_drop_dims(&args.data.drop_dims, &overlay)?;

    let q = args.q.or(over(&overlay, "Q")?);
    let delta = args.delta.or(over(&overlay, "delta")?);
    cfg.mode = match (q, delta) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParameter(
                "pass either a query budget (--Q) or a sampling delta (--delta), not both".into(),
            ))
        }
        (Some(q), None) => DlagpMode::Budget { q },
        (None, Some(delta)) => DlagpMode::Sampled { delta },
        (None, None) => DlagpMode::Full,
    };

    let (report, rows) = run_simulate(&cfg)?;
    eprintln!(
        "simulate: {} clients, {} rounds x {} queries = {} used, final loss {:.6e}{}{}",
        report.clients,
        report.iterations,
        report.per_call,
        report.queries_used,
        report.final_loss,
        if report.early_stopped { ", stopped early" } else { "" },
        report
            .m
            .map(|m| format!(", certified sample count {m}"))
            .unwrap_or_default()
    );
    write_rows(rows, common.format, common.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_budget_sweep(args: BudgetSweepArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;
    let source = resolve_source(&args.data, &overlay, common.seed, 100)?;
    let loss = resolve_loss(&args.loss, &overlay, LossKind::BinaryCrossEntropy)?;
    let tau = args.tau.or(over(&overlay, "tau")?).unwrap_or(0.1);

    let mut cfg = BudgetSweepConfig::new(source, loss, tau);
    cfg.seed = common.seed;
    cfg.epsilon = args.epsilon.or(over(&overlay, "epsilon")?).unwrap_or(cfg.epsilon);
    cfg.radius = args.radius.or(over(&overlay, "R")?).unwrap_or(cfg.radius);
    cfg.label_map = resolve_label_map(&args.data.label_map, &overlay)?;
    cfg.drop_dims = resolve_drop_dims(&args.data.drop_dims, &overlay)?;
    if let Some(qs) = args.qs.or(over::<String>(&overlay, "qs")?) {
        cfg.qs = parse_list(&qs, "budget")?;
    }
    if let Some(q) = args.q.or(over(&overlay, "Q")?) {
        cfg.qs = vec![q];
    }
    if let Some(seeds) = args.seeds.or(over::<String>(&overlay, "seeds")?) {
        cfg.seeds = parse_list(&seeds, "seed")?;
    }

    let rows = run_budget_sweep(&cfg)?;
    eprintln!(
        "budget-sweep: {} budgets x {} seeds, {} rows",
        cfg.qs.len(),
        cfg.seeds.len(),
        rows.len()
    );
    write_rows(rows, common.format, common.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_sweep(args: OracleSweepArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;
    let source = resolve_source(&args.data, &overlay, common.seed, 200)?;
    let loss = resolve_loss(&args.loss, &overlay, LossKind::BinaryCrossEntropy)?;

    let mut cfg = OracleSweepConfig::new(source, loss);
    cfg.seed = common.seed;
    cfg.k = args.k.or(over(&overlay, "K")?).unwrap_or(cfg.k);
    cfg.radius = args.radius.or(over(&overlay, "R")?).unwrap_or(cfg.radius);
    cfg.label_map = resolve_label_map(&args.data.label_map, &overlay)?;
    cfg.drop_dims = resolve_drop_dims(&args.data.drop_dims, &overlay)?;
    if let Some(base) = args.epsilon.or(over(&overlay, "epsilon")?) {
        cfg.epsilons = epsilon_ladder(base);
    }
    if let Some(eps) = args.epsilons.or(over::<String>(&overlay, "epsilons")?) {
        cfg.epsilons = parse_list(&eps, "epsilon")?;
    }
    if let Some(s) = &args.strategy {
        cfg.strategies = vec![s.parse()?];
    } else if let Some(s) = over::<String>(&overlay, "strategy")? {
        cfg.strategies = vec![s.parse()?];
    } else if let Some(list) = over::<String>(&overlay, "strategies")? {
        cfg.strategies = parse_list(&list, "strategy")?;
    }

    let rows = run_oracle_sweep(&cfg)?;
    eprintln!(
        "oracle-sweep: {} strategies x {} levels x {} iterations, {} rows",
        cfg.strategies.len(),
        cfg.epsilons.len(),
        cfg.k,
        rows.len()
    );
    write_rows(rows, common.format, common.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lower_bound(args: LowerBoundArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;

    let mut cfg = LowerBoundConfig::default();
    cfg.seed = common.seed;
    cfg.tau = args.tau.or(over(&overlay, "tau")?).unwrap_or(cfg.tau);
    cfg.smoothness = args
        .smoothness
        .or(over(&overlay, "smoothness")?)
        .unwrap_or(cfg.smoothness);
    cfg.transcripts = args
        .transcripts
        .or(over(&overlay, "transcripts")?)
        .unwrap_or(cfg.transcripts);
    cfg.transcript_len = args
        .transcript_len
        .or(over(&overlay, "transcript-len")?)
        .unwrap_or(cfg.transcript_len);
    if let Some(grid) = args.grid.or(over::<String>(&overlay, "grid")?) {
        cfg.grid = parse_grid(&grid)?;
    }

    let (report, rows) = run_lower_bound(&cfg)?;
    let zero_failed = report.zero_reply.iter().filter(|c| !c.passed).count();
    let deferred_failed = report.deferred.iter().filter(|c| !c.passed).count();
    eprintln!(
        "lower-bound: {} silent-oracle cases ({} failed), {} transcripts ({} failed)",
        report.zero_reply.len(),
        zero_failed,
        report.deferred.len(),
        deferred_failed
    );
    write_rows(rows, common.format, common.out.as_deref())?;
    if report.all_passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("lower-bound: certificate violated");
        Ok(ExitCode::from(3))
    }
}

fn cmd_center_est(args: CenterEstArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;

    let mut cfg = CenterEstConfig::default();
    cfg.seed = common.seed;
    cfg.n = args.n.or(over(&overlay, "n")?).unwrap_or(cfg.n);
    cfg.d = args.d.or(over(&overlay, "d")?).unwrap_or(cfg.d);
    cfg.b = args.b.or(over(&overlay, "b")?).unwrap_or(cfg.b);
    cfg.t = args.t.or(over(&overlay, "t")?).unwrap_or(cfg.t);
    cfg.delta = args.delta.or(over(&overlay, "delta")?).unwrap_or(cfg.delta);
    cfg.trials = args.trials.or(over(&overlay, "trials")?).unwrap_or(cfg.trials);

    let (report, rows) = run_center_est(&cfg)?;
    eprintln!(
        "center-est: m = {} samples, {} / {} trials failed (rate {:.4}, allowed {:.4})",
        report.m, report.failures, report.trials, report.empirical, report.threshold
    );
    write_rows(rows, common.format, common.out.as_deref())?;
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("center-est: empirical failure rate exceeds the certificate");
        Ok(ExitCode::from(3))
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<ExitCode> {
    let overlay = load_overlay(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &overlay)?;
    let input = args
        .data
        .or(over::<PathBuf>(&overlay, "data")?)
        .ok_or_else(|| Error::InvalidParameter("ingest needs --data".into()))?;
    let out = common
        .out
        .ok_or_else(|| Error::InvalidParameter("ingest needs --out".into()))?;
    let map = resolve_label_map(&args.label_map, &overlay)?;
    let drop = resolve_drop_dims(&args.drop_dims, &overlay)?;

    let raw = crate::data::parse_libsvm(&input)?;
    let in_dim = raw.dim;
    let n = raw.len();
    let ds = crate::data::preprocess(&raw, &map, &drop)?;
    let clean = RawDataset {
        labels: ds.points().iter().map(|p| p.y).collect(),
        features: ds.points().iter().map(|p| p.x.clone()).collect(),
        dim: ds.dim(),
    };
    write_libsvm(&out, &clean)?;
    eprintln!(
        "ingest: {} examples, {} features in, {} out (bias appended), written to {}",
        n,
        in_dim,
        ds.dim(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}
