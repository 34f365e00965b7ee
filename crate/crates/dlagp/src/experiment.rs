//! Experiment harness: named runs that produce a common row schema.
//!
//! Every experiment yields [`ResultRow`]s rendered as CSV or JSON with the
//! fixed header `experiment,seed,strategy,epsilon,k,K,Q,loss,gap,queries`.
//! Floats are written with 17 significant digits so emitted values parse
//! back bit-exactly, and rows are sorted before rendering so repeated runs
//! of the same configuration emit identical bytes.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{parse_libsvm, preprocess, LabelMap};
use crate::distributed::{derive_seed, run_dlagp, ClientPool, DlagpMode, DlagpRun};
use crate::estimation::{required_m, PointSet};
use crate::losses::{synth_dataset, AggregateLoss, Dataset, Loss, LossKind, Objective};
use crate::optimizer::{agp_opt, plain_gd, OptimizerConfig, Termination, TraceMode};
use crate::oracle::{DeferredAdversary, HardInstance1d, OracleStrategy, StrategyKind};
use crate::vector::dist;
use crate::{Error, Result};

/// Default base perturbation for sweeps; the stock sweep levels are
/// {0, ε₀, 4ε₀, 16ε₀}.
pub const DEFAULT_EPSILON: f64 = 0.005;

/// The geometric perturbation ladder used when no explicit list is given.
pub fn epsilon_ladder(base: f64) -> Vec<f64> {
    vec![0.0, base, 4.0 * base, 16.0 * base]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter(format!(
                "unknown output format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// Strategy selector as it appears on the command line and in the
/// `strategy` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyName {
    Exact,
    Opposing,
    Amplifying,
    FixedDirection,
    ZeroReply,
    RandomMix,
}

impl StrategyName {
    pub fn all() -> [StrategyName; 6] {
        [
            StrategyName::Exact,
            StrategyName::Opposing,
            StrategyName::Amplifying,
            StrategyName::FixedDirection,
            StrategyName::ZeroReply,
            StrategyName::RandomMix,
        ]
    }

    /// Concrete strategy for a d-dimensional problem; the fixed direction
    /// defaults to the negative first axis.
    pub fn to_kind(self, d: usize) -> StrategyKind {
        match self {
            StrategyName::Exact => StrategyKind::Exact,
            StrategyName::Opposing => StrategyKind::Opposing,
            StrategyName::Amplifying => StrategyKind::Amplifying,
            StrategyName::FixedDirection => {
                StrategyKind::FixedDirection(StrategyKind::neg_first_axis(d))
            }
            StrategyName::ZeroReply => StrategyKind::ZeroReply,
            StrategyName::RandomMix => StrategyKind::RandomMix,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyName::Exact => "exact",
            StrategyName::Opposing => "opposing",
            StrategyName::Amplifying => "amplifying",
            StrategyName::FixedDirection => "fixed-direction",
            StrategyName::ZeroReply => "zero-reply",
            StrategyName::RandomMix => "random-mix",
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(StrategyName::Exact),
            "opposing" => Ok(StrategyName::Opposing),
            "amplifying" => Ok(StrategyName::Amplifying),
            "fixed-direction" => Ok(StrategyName::FixedDirection),
            "zero-reply" => Ok(StrategyName::ZeroReply),
            "random-mix" => Ok(StrategyName::RandomMix),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy `{other}`"
            ))),
        }
    }
}

/// Where the labeled data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic {
        n: usize,
        d: usize,
        seed: u64,
        separable: bool,
    },
    File(PathBuf),
}

impl DataSource {
    pub fn load(&self, map: &LabelMap, drop_dims: &BTreeSet<usize>) -> Result<Dataset> {
        match self {
            DataSource::Synthetic {
                n,
                d,
                seed,
                separable,
            } => synth_dataset(*n, *d, *seed, *separable),
            DataSource::File(path) => {
                let raw = parse_libsvm(path)?;
                preprocess(&raw, map, drop_dims)
            }
        }
    }
}

/// One output record. `k` is an iteration index (absent on summary rows),
/// `big_k` the planned iteration count, `q` a total query budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub seed: u64,
    pub strategy: String,
    pub epsilon: f64,
    pub k: Option<u64>,
    pub big_k: Option<u64>,
    pub q: Option<u64>,
    pub loss: f64,
    pub gap: Option<f64>,
    pub queries: u64,
}

pub const HEADER: &str = "experiment,seed,strategy,epsilon,k,K,Q,loss,gap,queries";

/// 17 significant digits: enough to reproduce any f64 bit-exactly.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt_int(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.experiment
            .cmp(&b.experiment)
            .then_with(|| a.strategy.cmp(&b.strategy))
            .then_with(|| a.epsilon.total_cmp(&b.epsilon))
            .then_with(|| a.big_k.cmp(&b.big_k))
            .then_with(|| a.q.cmp(&b.q))
            .then_with(|| a.seed.cmp(&b.seed))
            .then_with(|| a.k.cmp(&b.k))
    });
}

/// Renders rows in the fixed schema. Rows are sorted first, so the output
/// depends only on the set of rows, not the order they were produced in.
pub fn render(mut rows: Vec<ResultRow>, format: OutputFormat) -> String {
    sort_rows(&mut rows);
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.experiment,
                    r.seed,
                    r.strategy,
                    fmt_float(r.epsilon),
                    fmt_opt_int(r.k),
                    fmt_opt_int(r.big_k),
                    fmt_opt_int(r.q),
                    fmt_float(r.loss),
                    r.gap.map(fmt_float).unwrap_or_default(),
                    r.queries
                ));
            }
            out
        }
        OutputFormat::Json => {
            let mut out = String::from("[\n");
            for (i, r) in rows.iter().enumerate() {
                let gap = r
                    .gap
                    .map(|g| format!("\"{}\"", fmt_float(g)))
                    .unwrap_or_else(|| "null".into());
                out.push_str(&format!(
                    "  {{\"experiment\":\"{}\",\"seed\":{},\"strategy\":\"{}\",\
                     \"epsilon\":\"{}\",\"k\":{},\"K\":{},\"Q\":{},\"loss\":\"{}\",\
                     \"gap\":{},\"queries\":{}}}{}\n",
                    json_escape(&r.experiment),
                    r.seed,
                    json_escape(&r.strategy),
                    fmt_float(r.epsilon),
                    r.k.map(|v| v.to_string()).unwrap_or_else(|| "null".into()),
                    r.big_k.map(|v| v.to_string()).unwrap_or_else(|| "null".into()),
                    r.q.map(|v| v.to_string()).unwrap_or_else(|| "null".into()),
                    fmt_float(r.loss),
                    gap,
                    r.queries,
                    if i + 1 < rows.len() { "," } else { "" }
                ));
            }
            out.push_str("]\n");
            out
        }
    }
}

/// `key = value` lines; `#` starts a comment; blank lines are skipped.
pub fn parse_config_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = match raw_line.split_once('#') {
            Some((before, _)) => before,
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "config line {}: `{}` is not `key = value`",
                i + 1,
                raw_line.trim()
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Per-point client losses for a dataset: regression losses wrap the point,
/// the quadratic interprets each feature vector as a target center.
pub fn client_losses(ds: &Dataset, kind: LossKind) -> Result<Vec<Loss>> {
    ds.points()
        .iter()
        .map(|p| match kind {
            LossKind::Quadratic => Loss::quadratic(p.x.clone(), 1.0),
            _ => Loss::from_point(kind, p.clone()),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// optimize: one single-machine run

#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    pub source: DataSource,
    pub loss: LossKind,
    pub strategy: StrategyName,
    pub epsilon: f64,
    pub tau: Option<f64>,
    pub radius: f64,
    pub k_override: Option<usize>,
    pub early_stop: bool,
    pub seed: u64,
    pub label_map: LabelMap,
    pub drop_dims: BTreeSet<usize>,
}

impl OptimizeConfig {
    pub fn new(source: DataSource, loss: LossKind) -> Self {
        Self {
            source,
            loss,
            strategy: StrategyName::Exact,
            epsilon: DEFAULT_EPSILON,
            tau: None,
            radius: 1.0,
            k_override: None,
            early_stop: true,
            seed: 0,
            label_map: LabelMap::plus_minus_one(),
            drop_dims: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub iterations: u64,
    pub planned_k: usize,
    pub final_loss: f64,
    pub best_loss: f64,
    pub early_stopped: bool,
    pub outside_guarantee: bool,
}

pub fn run_optimize(cfg: &OptimizeConfig) -> Result<(OptimizeReport, Vec<ResultRow>)> {
    let ds = cfg.source.load(&cfg.label_map, &cfg.drop_dims)?;
    let objective = AggregateLoss::new(client_losses(&ds, cfg.loss)?)?;
    let d = objective.dim();
    let ell = objective.smoothness();

    let mut opt = OptimizerConfig::new(ell, cfg.epsilon, cfg.radius);
    opt.trace = TraceMode::Summary;
    opt.early_stop = cfg.early_stop;
    match (cfg.k_override, cfg.tau) {
        (Some(k), _) => opt.k_override = Some(k),
        (None, Some(tau)) => opt.tau = Some(tau),
        // Default target: the smallest tau the guarantee covers at this
        // radius, or an epsilon-free schedule would be unbounded.
        (None, None) => {
            if cfg.epsilon > 0.0 {
                opt.tau = Some(5.0 * cfg.epsilon * cfg.radius);
            } else {
                return Err(Error::InvalidParameter(
                    "epsilon = 0 needs an explicit tau or iteration count".into(),
                ));
            }
        }
    }
    let planned_k = opt.iteration_budget()?;

    let strat = OracleStrategy::new(cfg.strategy.to_kind(d), cfg.epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1));
    let run = agp_opt(
        &objective,
        |w| Ok(strat.reply(&objective.grad(w)?, &mut rng)),
        &opt,
    )?;

    let rows = per_iteration_rows(
        "optimize",
        cfg.seed,
        cfg.strategy.as_str(),
        cfg.epsilon,
        planned_k as u64,
        None,
        &run.losses,
        1,
    );
    let report = OptimizeReport {
        iterations: run.oracle_calls,
        planned_k,
        final_loss: *run.losses.last().expect("at least the start is recorded"),
        best_loss: run.best_loss(),
        early_stopped: run.termination == Termination::EarlyStop,
        outside_guarantee: run.outside_guarantee,
    };
    Ok((report, rows))
}

fn per_iteration_rows(
    experiment: &str,
    seed: u64,
    strategy: &str,
    epsilon: f64,
    big_k: u64,
    q: Option<u64>,
    losses: &[f64],
    queries_per_iter: u64,
) -> Vec<ResultRow> {
    losses
        .iter()
        .enumerate()
        .map(|(k, loss)| ResultRow {
            experiment: experiment.to_string(),
            seed,
            strategy: strategy.to_string(),
            epsilon,
            k: Some(k as u64),
            big_k: Some(big_k),
            q,
            loss: *loss,
            gap: None,
            queries: k as u64 * queries_per_iter,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// simulate: one distributed run

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub source: DataSource,
    pub loss: LossKind,
    pub strategy: StrategyName,
    pub epsilon: f64,
    pub tau: f64,
    pub radius: f64,
    pub mode: DlagpMode,
    pub seed: u64,
    pub label_map: LabelMap,
    pub drop_dims: BTreeSet<usize>,
}

impl SimulateConfig {
    pub fn new(source: DataSource, loss: LossKind, tau: f64) -> Self {
        Self {
            source,
            loss,
            strategy: StrategyName::RandomMix,
            epsilon: DEFAULT_EPSILON,
            tau,
            radius: 1.0,
            mode: DlagpMode::Full,
            seed: 0,
            label_map: LabelMap::plus_minus_one(),
            drop_dims: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub clients: usize,
    pub iterations: usize,
    pub per_call: usize,
    pub queries_used: u64,
    pub final_loss: f64,
    pub early_stopped: bool,
    /// Derived per-round sample count (sampled mode only).
    pub m: Option<usize>,
}

pub fn run_simulate(cfg: &SimulateConfig) -> Result<(SimulateReport, Vec<ResultRow>)> {
    let ds = cfg.source.load(&cfg.label_map, &cfg.drop_dims)?;
    let losses = client_losses(&ds, cfg.loss)?;
    let d = ds.dim();
    let mut pool = ClientPool::uniform(
        losses,
        cfg.strategy.to_kind(d),
        cfg.epsilon,
        derive_seed(cfg.seed, 2),
    )?;
    let out: DlagpRun = run_dlagp(&mut pool, cfg.tau, cfg.radius, cfg.mode, TraceMode::Summary)?;

    let q = match cfg.mode {
        DlagpMode::Budget { q } => Some(q),
        _ => None,
    };
    let rows = per_iteration_rows(
        "simulate",
        cfg.seed,
        cfg.strategy.as_str(),
        cfg.epsilon,
        out.iterations as u64,
        q,
        &out.run.losses,
        out.per_call as u64,
    );
    let report = SimulateReport {
        clients: pool.len(),
        iterations: out.iterations,
        per_call: out.per_call,
        queries_used: out.queries_used,
        final_loss: *out.run.losses.last().expect("at least the start is recorded"),
        early_stopped: out.run.termination == Termination::EarlyStop,
        m: out.sampled.map(|s| s.m),
    };
    Ok((report, rows))
}

// ---------------------------------------------------------------------------
// oracle-sweep: strategies x perturbation levels on one objective

#[derive(Debug, Clone)]
pub struct OracleSweepConfig {
    pub source: DataSource,
    pub loss: LossKind,
    pub strategies: Vec<StrategyName>,
    pub epsilons: Vec<f64>,
    pub k: usize,
    pub radius: f64,
    pub seed: u64,
    pub label_map: LabelMap,
    pub drop_dims: BTreeSet<usize>,
}

impl OracleSweepConfig {
    pub fn new(source: DataSource, loss: LossKind) -> Self {
        Self {
            source,
            loss,
            strategies: StrategyName::all().to_vec(),
            epsilons: epsilon_ladder(DEFAULT_EPSILON),
            k: 500,
            radius: 1.0,
            seed: 0,
            label_map: LabelMap::plus_minus_one(),
            drop_dims: BTreeSet::new(),
        }
    }
}

/// Runs plain descent (no early stop) for every strategy and perturbation
/// level, recording the loss at every iterate. At ε = 0 all strategies
/// coincide with the exact oracle, giving a shared baseline trajectory.
pub fn run_oracle_sweep(cfg: &OracleSweepConfig) -> Result<Vec<ResultRow>> {
    if cfg.loss == LossKind::Quadratic {
        return Err(Error::InvalidParameter(
            "the oracle sweep reads labeled data; pick a regression loss".into(),
        ));
    }
    if cfg.k == 0 {
        return Err(Error::InvalidParameter(
            "iteration count must be at least 1".into(),
        ));
    }
    let ds = cfg.source.load(&cfg.label_map, &cfg.drop_dims)?;
    let objective = AggregateLoss::from_dataset(&ds, cfg.loss)?;
    let d = objective.dim();
    let ell = objective.smoothness();

    let grid: Vec<(usize, StrategyName, usize, f64)> = cfg
        .strategies
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            cfg.epsilons
                .iter()
                .enumerate()
                .map(move |(ei, e)| (si, *s, ei, *e))
        })
        .collect();

    let row_batches = grid
        .par_iter()
        .map(|(si, strategy, ei, epsilon)| -> Result<Vec<ResultRow>> {
            let strat = OracleStrategy::new(strategy.to_kind(d), *epsilon)?;
            let stream = (*si as u64) << 32 | *ei as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, stream));
            let mut opt = OptimizerConfig::new(ell, *epsilon, cfg.radius).with_budget(cfg.k);
            opt.trace = TraceMode::Summary;
            let run = plain_gd(
                &objective,
                |w| Ok(strat.reply(&objective.grad(w)?, &mut rng)),
                &opt,
            )?;
            Ok(per_iteration_rows(
                "oracle-sweep",
                cfg.seed,
                strategy.as_str(),
                *epsilon,
                cfg.k as u64,
                None,
                &run.losses,
                1,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(row_batches.into_iter().flatten().collect())
}

// ---------------------------------------------------------------------------
// budget-sweep: final loss as a function of the total query budget

#[derive(Debug, Clone)]
pub struct BudgetSweepConfig {
    pub source: DataSource,
    pub loss: LossKind,
    pub epsilon: f64,
    pub tau: f64,
    pub radius: f64,
    pub qs: Vec<u64>,
    pub seeds: Vec<u64>,
    pub seed: u64,
    pub label_map: LabelMap,
    pub drop_dims: BTreeSet<usize>,
}

impl BudgetSweepConfig {
    pub fn new(source: DataSource, loss: LossKind, tau: f64) -> Self {
        Self {
            source,
            loss,
            epsilon: DEFAULT_EPSILON,
            tau,
            radius: 1.0,
            qs: vec![100, 200, 400, 800, 1600, 3200],
            seeds: (0..10).collect(),
            seed: 0,
            label_map: LabelMap::plus_minus_one(),
            drop_dims: BTreeSet::new(),
        }
    }
}

/// For each budget Q and seed, runs budget mode on a one-client-per-point
/// pool of mixed-perturbation clients and records the final loss. Per-Q
/// extremes come back as `band-min`/`band-max` rows, and one exact
/// full-information run (`reference-exact`) anchors the plot. Budgets below
/// one query per round yield `skipped` rows.
pub fn run_budget_sweep(cfg: &BudgetSweepConfig) -> Result<Vec<ResultRow>> {
    let ds = cfg.source.load(&cfg.label_map, &cfg.drop_dims)?;
    let losses = client_losses(&ds, cfg.loss)?;
    let n = losses.len();

    let grid: Vec<(u64, u64)> = cfg
        .qs
        .iter()
        .flat_map(|q| cfg.seeds.iter().map(move |s| (*q, *s)))
        .collect();

    let results = grid
        .par_iter()
        .map(|(q, run_seed)| -> Result<(u64, u64, Option<f64>, ResultRow)> {
            let mut pool = ClientPool::uniform(
                losses.clone(),
                StrategyKind::RandomMix,
                cfg.epsilon,
                derive_seed(cfg.seed, (*q) << 20 | *run_seed),
            )?;
            match run_dlagp(
                &mut pool,
                cfg.tau,
                cfg.radius,
                DlagpMode::Budget { q: *q },
                TraceMode::Summary,
            ) {
                Ok(out) => {
                    let final_loss =
                        *out.run.losses.last().expect("at least the start is recorded");
                    let row = ResultRow {
                        experiment: "budget-sweep".into(),
                        seed: *run_seed,
                        strategy: "random-mix".into(),
                        epsilon: cfg.epsilon,
                        k: None,
                        big_k: Some(out.iterations as u64),
                        q: Some(*q),
                        loss: final_loss,
                        gap: None,
                        queries: out.queries_used,
                    };
                    Ok((*q, *run_seed, Some(final_loss), row))
                }
                Err(Error::BudgetTooSmall { k, .. }) => {
                    let row = ResultRow {
                        experiment: "budget-sweep".into(),
                        seed: *run_seed,
                        strategy: "skipped".into(),
                        epsilon: cfg.epsilon,
                        k: None,
                        big_k: Some(k),
                        q: Some(*q),
                        loss: 0.0,
                        gap: None,
                        queries: 0,
                    };
                    Ok((*q, *run_seed, None, row))
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<ResultRow> = results.iter().map(|(_, _, _, row)| row.clone()).collect();

    // Envelope rows: the best and worst final loss for each budget.
    for q in &cfg.qs {
        let finals: Vec<f64> = results
            .iter()
            .filter(|(rq, _, loss, _)| rq == q && loss.is_some())
            .map(|(_, _, loss, _)| loss.unwrap())
            .collect();
        if finals.is_empty() {
            continue;
        }
        let min = finals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = finals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (name, value) in [("band-min", min), ("band-max", max)] {
            rows.push(ResultRow {
                experiment: "budget-sweep".into(),
                seed: 0,
                strategy: name.into(),
                epsilon: cfg.epsilon,
                k: None,
                big_k: None,
                q: Some(*q),
                loss: value,
                gap: None,
                queries: 0,
            });
        }
    }

    // Exact full-information baseline: every client exactly, every round.
    {
        let mut pool = ClientPool::uniform(
            losses.clone(),
            StrategyKind::Exact,
            0.0,
            derive_seed(cfg.seed, u64::MAX),
        )?;
        let out = run_dlagp(&mut pool, cfg.tau, cfg.radius, DlagpMode::Full, TraceMode::Summary)?;
        rows.push(ResultRow {
            experiment: "budget-sweep".into(),
            seed: 0,
            strategy: "reference-exact".into(),
            epsilon: 0.0,
            k: None,
            big_k: Some(out.iterations as u64),
            q: Some(n as u64 * out.iterations as u64),
            loss: *out.run.losses.last().expect("at least the start is recorded"),
            gap: None,
            queries: out.queries_used,
        });
    }

    Ok(rows)
}

// ---------------------------------------------------------------------------
// lower-bound: adversarial certificates

#[derive(Debug, Clone)]
pub struct LowerBoundConfig {
    /// (smoothness, radius, epsilon) triples for the indistinguishable-pair
    /// construction.
    pub grid: Vec<(f64, f64, f64)>,
    /// Random transcripts for the retroactive adversary.
    pub transcripts: usize,
    pub transcript_len: usize,
    pub tau: f64,
    pub smoothness: f64,
    pub seed: u64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        let mut grid = Vec::new();
        for radius in [1.0, 2.0] {
            for ell in [1.0, 4.0] {
                for epsilon in [0.1, 0.5, 1.0] {
                    grid.push((ell, radius, epsilon));
                }
            }
        }
        Self {
            grid,
            transcripts: 20,
            transcript_len: 25,
            tau: 0.5,
            smoothness: 1.0,
            seed: 0,
        }
    }
}

/// One zero-reply case: the silent oracle is legal for a mirrored pair of
/// instances, so any output pays at least ε·R/2 against one of them.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReplyCase {
    pub smoothness: f64,
    pub radius: f64,
    pub epsilon: f64,
    /// True for the early-stopping method, false for plain descent.
    pub early_stop: bool,
    pub max_gap: f64,
    pub bound: f64,
    /// Every reply was within ε of both instances' gradients.
    pub legal: bool,
    pub passed: bool,
}

/// One retroactive-adversary transcript: after seeing every query, the
/// adversary commits to an instance for which all its constant replies were
/// exact gradients and the algorithm's output is 3τ above the minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct DeferredCase {
    pub transcript: usize,
    pub queries: usize,
    pub value_at_output: f64,
    pub target: f64,
    pub replies_match: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub zero_reply: Vec<ZeroReplyCase>,
    pub deferred: Vec<DeferredCase>,
    pub all_passed: bool,
}

pub fn run_lower_bound(cfg: &LowerBoundConfig) -> Result<(LowerBoundReport, Vec<ResultRow>)> {
    let mut zero_reply = Vec::new();
    let mut rows = Vec::new();

    for &(ell, radius, epsilon) in &cfg.grid {
        let ascending = HardInstance1d::ascending(radius, ell, epsilon)?;
        let descending = HardInstance1d::descending(radius, ell, epsilon)?;
        for early_stop in [true, false] {
            let tau = epsilon * radius;
            let mut opt = OptimizerConfig::new(ell, epsilon, radius).with_tau(tau);
            opt.early_stop = early_stop;
            let obj = ascending.as_objective();
            let run = agp_opt(&obj, |_w| Ok(vec![0.0]), &opt)?;

            // Queried points are the first `oracle_calls` iterates; the
            // zero reply must be within ε of both instances there.
            let legal = run.iterates[..run.oracle_calls as usize].iter().all(|w| {
                ascending.grad(w[0]).abs() <= epsilon + 1e-12
                    && descending.grad(w[0]).abs() <= epsilon + 1e-12
            });

            let out = run.final_iterate[0];
            let max_gap = ascending.eval(out).max(descending.eval(out));
            let bound = epsilon * radius / 2.0;
            let passed = legal && max_gap * (1.0 + 1e-12) >= bound;
            zero_reply.push(ZeroReplyCase {
                smoothness: ell,
                radius,
                epsilon,
                early_stop,
                max_gap,
                bound,
                legal,
                passed,
            });
            rows.push(ResultRow {
                experiment: "lower-bound".into(),
                seed: cfg.seed,
                strategy: if early_stop {
                    "zero-reply-early-stop".into()
                } else {
                    "zero-reply-plain".into()
                },
                epsilon,
                k: None,
                big_k: Some(run.oracle_calls),
                q: None,
                loss: max_gap,
                gap: Some(max_gap),
                queries: run.oracle_calls,
            });
        }
    }

    let mut deferred = Vec::new();
    for t in 0..cfg.transcripts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1_000_000 + t as u64));
        let adversary = DeferredAdversary::new(cfg.tau, cfg.smoothness)?;
        let queries: Vec<f64> = (0..cfg.transcript_len)
            .map(|_| rng.random::<f64>() * 20.0 - 10.0)
            .collect();
        let replies: Vec<f64> = queries.iter().map(|_| adversary.reply()).collect();
        let w_out = rng.random::<f64>() * 20.0 - 10.0;
        let instance = adversary.finalize(&queries, w_out);

        let replies_match = queries
            .iter()
            .zip(&replies)
            .all(|(w, r)| instance.grad(*w) == *r)
            && instance.grad(w_out) == adversary.reply();
        let value_at_output = instance.eval(w_out);
        let target = 3.0 * cfg.tau;
        let passed = replies_match && value_at_output >= target;
        deferred.push(DeferredCase {
            transcript: t,
            queries: queries.len(),
            value_at_output,
            target,
            replies_match,
            passed,
        });
        rows.push(ResultRow {
            experiment: "lower-bound".into(),
            seed: cfg.seed,
            strategy: "deferred".into(),
            epsilon: 0.0,
            k: Some(t as u64),
            big_k: Some(cfg.transcript_len as u64),
            q: None,
            loss: value_at_output,
            gap: Some(value_at_output),
            queries: cfg.transcript_len as u64,
        });
    }

    let all_passed =
        zero_reply.iter().all(|c| c.passed) && deferred.iter().all(|c| c.passed);
    Ok((
        LowerBoundReport {
            zero_reply,
            deferred,
            all_passed,
        },
        rows,
    ))
}

// ---------------------------------------------------------------------------
// center-est: Monte Carlo check of the sampling bound

#[derive(Debug, Clone)]
pub struct CenterEstConfig {
    pub n: usize,
    pub d: usize,
    /// Norm bound for the generated points.
    pub b: f64,
    /// Target accuracy.
    pub t: f64,
    /// Failure probability the sample count is certified for.
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for CenterEstConfig {
    fn default() -> Self {
        Self {
            n: 100,
            d: 5,
            b: 1.0,
            t: 0.3,
            delta: 0.05,
            trials: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterEstReport {
    pub m: usize,
    pub trials: usize,
    pub failures: usize,
    pub empirical: f64,
    /// δ plus three binomial standard deviations: an empirical rate above
    /// this contradicts the certified failure probability.
    pub threshold: f64,
    pub passed: bool,
}

pub fn run_center_est(cfg: &CenterEstConfig) -> Result<(CenterEstReport, Vec<ResultRow>)> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter(
            "trial count must be at least 1".into(),
        ));
    }
    if cfg.n == 0 || cfg.d == 0 {
        return Err(Error::InvalidParameter(
            "point count and dimension must be at least 1".into(),
        ));
    }
    // Components in [−B/√d, B/√d] keep every norm at most B.
    let mut gen_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 7));
    let half_width = cfg.b / (cfg.d as f64).sqrt();
    let points: Vec<Vec<f64>> = (0..cfg.n)
        .map(|_| {
            (0..cfg.d)
                .map(|_| (gen_rng.random::<f64>() * 2.0 - 1.0) * half_width)
                .collect()
        })
        .collect();
    let set = PointSet::new(points, cfg.b)?;
    let center = set.center();
    let m = required_m(cfg.b, cfg.t, cfg.delta)?;

    let mut rows = Vec::with_capacity(cfg.trials + 1);
    let mut failures = 0;
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 100 + trial as u64));
        let estimate = set.sampled_center(m, &mut rng)?;
        let err = dist(&estimate, &center);
        if err > cfg.t {
            failures += 1;
        }
        rows.push(ResultRow {
            experiment: "center-est".into(),
            seed: cfg.seed,
            strategy: "sampled".into(),
            epsilon: cfg.t,
            k: Some(trial as u64),
            big_k: None,
            q: None,
            loss: err,
            gap: None,
            queries: m as u64,
        });
    }

    let empirical = failures as f64 / cfg.trials as f64;
    let threshold =
        cfg.delta + 3.0 * (cfg.delta * (1.0 - cfg.delta) / cfg.trials as f64).sqrt();
    let passed = empirical <= threshold;
    rows.push(ResultRow {
        experiment: "center-est".into(),
        seed: cfg.seed,
        strategy: "summary".into(),
        epsilon: cfg.t,
        k: None,
        big_k: None,
        q: None,
        loss: empirical,
        gap: None,
        queries: (m * cfg.trials) as u64,
    });

    Ok((
        CenterEstReport {
            m,
            trials: cfg.trials,
            failures,
            empirical,
            threshold,
            passed,
        },
        rows,
    ))
}
