//! End-to-end acceptance checks, one test per shipped guarantee.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see one
//! `[PASS]`/`[FAIL]` line per criterion. Every tolerance is pinned here; a
//! failure means the library broke a promise, not that a bound needs
//! loosening.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use dlagp::data::{preprocess, LabelMap, RawDataset};
use dlagp::distributed::{derive_seed, run_dlagp, ClientPool, DlagpMode, REGIME_FACTOR};
use dlagp::estimation::{required_m, PointSet};
use dlagp::experiment::{
    epsilon_ladder, render, run_lower_bound, run_oracle_sweep, DataSource, LowerBoundConfig,
    OracleSweepConfig, OutputFormat, ResultRow, StrategyName,
};
use dlagp::losses::{AggregateLoss, Loss, LossKind, Objective};
use dlagp::optimizer::{
    agp_opt, k_schedule, plain_gd, suboptimality_gap, OptimizerConfig, OptimizerRun, Termination,
};
use dlagp::oracle::OracleStrategy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Prints the criterion verdict, then fails the test when `ok` is false.
fn verdict(ok: bool, line: &str, details: &str) {
    println!("[{}] {line}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{line}\n{details}");
}

// ---------------------------------------------------------------------------
// Shared batch: 50 seeded quadratic aggregates under five strategies.

const BATCH_STRATEGIES: [StrategyName; 5] = [
    StrategyName::Exact,
    StrategyName::Opposing,
    StrategyName::Amplifying,
    StrategyName::FixedDirection,
    StrategyName::RandomMix,
];

struct BatchRun {
    instance: u64,
    strategy: &'static str,
    epsilon: f64,
    tau: f64,
    radius: f64,
    wstar: Vec<f64>,
    planned_k: usize,
    run: OptimizerRun,
    gap: f64,
}

struct GuaranteeBatch {
    early_stop_runs: Vec<BatchRun>,
    plain_runs: Vec<BatchRun>,
    csv: String,
    elapsed: Duration,
}

fn build_guarantee_batch() -> GuaranteeBatch {
    let t0 = Instant::now();
    let ns = [1usize, 10, 100];
    let dims = [2usize, 10];
    let epsilons = [0.001, 0.01, 0.1];

    let mut early_stop_runs = Vec::new();
    let mut plain_runs = Vec::new();
    for i in 0..50u64 {
        let combo = (i % 18) as usize;
        let n = ns[combo % 3];
        let d = dims[(combo / 3) % 2];
        let epsilon = epsilons[combo / 6];

        let mut gen = ChaCha8Rng::seed_from_u64(1000 + i);
        let centers: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| gen.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let agg = AggregateLoss::new(
            centers
                .iter()
                .map(|c| Loss::quadratic(c.clone(), 1.0).unwrap())
                .collect(),
        )
        .unwrap();
        // Mean of unit-scale quadratics: the minimizer is the center mean.
        let mut wstar = vec![0.0; d];
        for c in &centers {
            for (acc, ci) in wstar.iter_mut().zip(c) {
                *acc += ci;
            }
        }
        for acc in &mut wstar {
            *acc /= n as f64;
        }
        let radius = norm(&wstar);
        let tau = 5.0 * epsilon * radius;
        let planned_k = k_schedule(1.0, radius, tau, epsilon).unwrap();

        for (si, name) in BATCH_STRATEGIES.iter().enumerate() {
            let strat = OracleStrategy::new(name.to_kind(d), epsilon).unwrap();
            let cfg = OptimizerConfig::new(1.0, epsilon, radius).with_tau(tau);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(1000 + i, si as u64));
            let run = agp_opt(&agg, |w| Ok(strat.reply(&agg.grad(w)?, &mut rng)), &cfg).unwrap();
            let gap = suboptimality_gap(&agg, &run, &wstar).unwrap();
            early_stop_runs.push(BatchRun {
                instance: i,
                strategy: name.as_str(),
                epsilon,
                tau,
                radius,
                wstar: wstar.clone(),
                planned_k,
                run,
                gap,
            });

            let strat = OracleStrategy::new(name.to_kind(d), epsilon).unwrap();
            let cfg = OptimizerConfig::new(1.0, epsilon, radius).with_budget(planned_k);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(1000 + i, 100 + si as u64));
            let run = plain_gd(&agg, |w| Ok(strat.reply(&agg.grad(w)?, &mut rng)), &cfg).unwrap();
            let gap = suboptimality_gap(&agg, &run, &wstar).unwrap();
            plain_runs.push(BatchRun {
                instance: i,
                strategy: name.as_str(),
                epsilon,
                tau,
                radius,
                wstar: wstar.clone(),
                planned_k,
                run,
                gap,
            });
        }
    }

    let rows: Vec<ResultRow> = early_stop_runs
        .iter()
        .map(|r| ResultRow {
            experiment: "guarantee-batch".into(),
            seed: 1000 + r.instance,
            strategy: r.strategy.into(),
            epsilon: r.epsilon,
            k: Some(r.run.losses.len() as u64 - 1),
            big_k: Some(r.planned_k as u64),
            q: None,
            loss: *r.run.losses.last().unwrap(),
            gap: Some(r.gap),
            queries: r.run.oracle_calls,
        })
        .collect();
    let csv = render(rows, OutputFormat::Csv);
    GuaranteeBatch {
        early_stop_runs,
        plain_runs,
        csv,
        elapsed: t0.elapsed(),
    }
}

fn guarantee_batch() -> &'static GuaranteeBatch {
    static BATCH: OnceLock<GuaranteeBatch> = OnceLock::new();
    BATCH.get_or_init(build_guarantee_batch)
}

// ---------------------------------------------------------------------------
// Shared batch: sampled-mode distributed protocol, 100 seeded runs.

struct SampledBatch {
    successes: usize,
    trials: usize,
    m: usize,
    worst_gap: f64,
    tau: f64,
    csv: String,
    elapsed: Duration,
}

fn build_sampled_batch() -> SampledBatch {
    let t0 = Instant::now();
    let (n, d) = (200usize, 2usize);
    let epsilon = 25.0;
    let radius = 0.5;
    let tau = REGIME_FACTOR * epsilon * radius;
    let delta = 0.1;

    let mut gen = ChaCha8Rng::seed_from_u64(424242);
    let centers: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut c = vec![0.3];
            c.extend(std::iter::repeat(0.0).take(d - 1));
            for ci in c.iter_mut() {
                *ci += 0.2 * (gen.random::<f64>() * 2.0 - 1.0);
            }
            c
        })
        .collect();
    let losses: Vec<Loss> = centers
        .iter()
        .map(|c| Loss::quadratic(c.clone(), 1.0).unwrap())
        .collect();
    let mut wstar = vec![0.0; d];
    for c in &centers {
        for (acc, ci) in wstar.iter_mut().zip(c) {
            *acc += ci;
        }
    }
    for acc in &mut wstar {
        *acc /= n as f64;
    }
    let agg = AggregateLoss::new(losses.clone()).unwrap();
    let fstar = agg.eval(&wstar).unwrap();

    let strategies: Vec<_> = (0..n)
        .map(|i| BATCH_STRATEGIES[i % 5].to_kind(d))
        .collect();

    let trials = 100usize;
    let mut successes = 0usize;
    let mut m = 0usize;
    let mut worst_gap: f64 = 0.0;
    let mut rows = Vec::with_capacity(trials);
    for s in 0..trials as u64 {
        let mut pool = ClientPool::new(
            losses.clone(),
            strategies.clone(),
            epsilon,
            derive_seed(9000, s),
        )
        .unwrap();
        let out = run_dlagp(
            &mut pool,
            tau,
            radius,
            DlagpMode::Sampled { delta },
            dlagp::optimizer::TraceMode::Summary,
        )
        .unwrap();
        m = out.sampled.as_ref().unwrap().m;
        let gap = agg.eval(&out.run.final_iterate).unwrap() - fstar;
        worst_gap = worst_gap.max(gap);
        if gap <= tau {
            successes += 1;
        }
        rows.push(ResultRow {
            experiment: "sampled-protocol".into(),
            seed: s,
            strategy: "mixed".into(),
            epsilon,
            k: Some(out.iterations as u64),
            big_k: Some(out.run.oracle_calls),
            q: None,
            loss: *out.run.losses.last().unwrap(),
            gap: Some(gap),
            queries: out.queries_used,
        });
    }
    SampledBatch {
        successes,
        trials,
        m,
        worst_gap,
        tau,
        csv: render(rows, OutputFormat::Csv),
        elapsed: t0.elapsed(),
    }
}

fn sampled_batch() -> &'static SampledBatch {
    static BATCH: OnceLock<SampledBatch> = OnceLock::new();
    BATCH.get_or_init(build_sampled_batch)
}

// ---------------------------------------------------------------------------
// Shared batch: perturbation sweep on a logistic instance.

struct CurveBatch {
    rows: Vec<ResultRow>,
    epsilons: Vec<f64>,
    k: usize,
    csv: String,
    elapsed: Duration,
}

fn build_curve_batch() -> CurveBatch {
    let t0 = Instant::now();
    let mut cfg = OracleSweepConfig::new(
        DataSource::Synthetic {
            n: 500,
            d: 5,
            seed: 0,
            separable: false,
        },
        LossKind::BinaryCrossEntropy,
    );
    cfg.k = 600;
    cfg.seed = 0;
    cfg.strategies = vec![StrategyName::FixedDirection, StrategyName::Opposing];
    cfg.epsilons = epsilon_ladder(0.005);
    let rows = run_oracle_sweep(&cfg).unwrap();
    CurveBatch {
        csv: render(rows.clone(), OutputFormat::Csv),
        rows,
        epsilons: cfg.epsilons,
        k: cfg.k,
        elapsed: t0.elapsed(),
    }
}

fn curve_batch() -> &'static CurveBatch {
    static BATCH: OnceLock<CurveBatch> = OnceLock::new();
    BATCH.get_or_init(build_curve_batch)
}

// ---------------------------------------------------------------------------
// Criteria

#[test]
fn a01_early_stop_reaches_tau_whenever_tau_covers_the_perturbation() {
    let batch = guarantee_batch();
    let mut violations = Vec::new();
    for r in &batch.early_stop_runs {
        if r.gap > r.tau + 1e-9 {
            violations.push(format!(
                "instance {} / {}: gap {:.3e} above tau {:.3e}",
                r.instance, r.strategy, r.gap, r.tau
            ));
        }
        if r.run.outside_guarantee {
            violations.push(format!(
                "instance {} / {}: run mislabeled as outside the guarantee",
                r.instance, r.strategy
            ));
        }
    }
    let timely = batch.elapsed < Duration::from_secs(30);
    if !timely {
        violations.push(format!("batch took {:?} (budget 30 s)", batch.elapsed));
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 01: gap <= tau on {} early-stopped runs (built in {:?})",
            batch.early_stop_runs.len(),
            batch.elapsed
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a02_iterates_never_leave_the_inflated_radius_ball() {
    let batch = guarantee_batch();
    let bound_factor = 17.0 / 8.0;
    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    for r in &batch.early_stop_runs {
        for w in &r.run.iterates {
            let ratio = norm(w) / r.radius.max(f64::MIN_POSITIVE);
            worst = worst.max(ratio);
            if norm(w) > bound_factor * r.radius + 1e-9 {
                violations.push(format!(
                    "instance {} / {}: |w| = {:.6} exceeds (17/8) R = {:.6}",
                    r.instance,
                    r.strategy,
                    norm(w),
                    bound_factor * r.radius
                ));
            }
        }
    }
    verdict(
        violations.is_empty(),
        &format!("criterion 02: iterate norms within (17/8)R (worst |w|/R = {worst:.4})"),
        &violations.join("\n"),
    );
}

#[test]
fn a03_every_step_above_the_stop_threshold_descends() {
    let batch = guarantee_batch();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for r in batch.early_stop_runs.iter().chain(&batch.plain_runs) {
        for k in 0..r.run.losses.len().saturating_sub(1) {
            if r.run.grad_norms[k] >= 4.0 * r.epsilon {
                checked += 1;
                if r.run.losses[k + 1] >= r.run.losses[k] {
                    violations.push(format!(
                        "instance {} / {}: step {k} rose from {:.17e} to {:.17e}",
                        r.instance,
                        r.strategy,
                        r.run.losses[k],
                        r.run.losses[k + 1]
                    ));
                }
            }
        }
    }
    verdict(
        violations.is_empty(),
        &format!("criterion 03: strict descent on all {checked} above-threshold steps"),
        &violations.join("\n"),
    );
}

#[test]
fn a04_distance_to_the_minimizer_drifts_slowly() {
    let batch = guarantee_batch();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for r in batch.early_stop_runs.iter().chain(&batch.plain_runs) {
        let allowed = r.epsilon / 2.0 + 1e-12; // eps/(2L) with L = 1
        for pair in r.run.iterates.windows(2) {
            let drift = dist(&pair[1], &r.wstar) - dist(&pair[0], &r.wstar);
            worst = worst.max(drift - r.epsilon / 2.0);
            if drift > allowed {
                violations.push(format!(
                    "instance {} / {}: drift {:.3e} above eps/(2L) = {:.3e}",
                    r.instance, r.strategy, drift, r.epsilon / 2.0
                ));
            }
        }
    }
    verdict(
        violations.is_empty(),
        &format!("criterion 04: per-step drift within eps/(2L) (worst excess {worst:.3e})"),
        &violations.join("\n"),
    );
}

#[test]
fn a05_zero_replies_force_the_epsilon_radius_floor() {
    let t0 = Instant::now();
    let mut grid = Vec::new();
    for radius in [1.0, 2.0] {
        for ell in [1.0, 4.0] {
            for epsilon in [0.1, 0.5, 1.0] {
                grid.push((ell, radius, epsilon));
            }
        }
    }
    let cells = grid.len();
    let cfg = LowerBoundConfig {
        grid,
        transcripts: 0,
        transcript_len: 25,
        tau: 0.5,
        smoothness: 1.0,
        seed: 0,
    };
    let (report, _rows) = run_lower_bound(&cfg).unwrap();
    let elapsed = t0.elapsed();

    let mut violations = Vec::new();
    if report.zero_reply.len() != 2 * cells {
        violations.push(format!(
            "expected {} cases, got {}",
            2 * cells,
            report.zero_reply.len()
        ));
    }
    for c in &report.zero_reply {
        let floor = c.epsilon * c.radius / 2.0;
        if !c.legal {
            violations.push(format!(
                "L={} R={} eps={}: zero replies were not legal for both instances",
                c.smoothness, c.radius, c.epsilon
            ));
        }
        if c.max_gap < floor - 1e-12 {
            violations.push(format!(
                "L={} R={} eps={} early_stop={}: max gap {:.17e} below eps*R/2 = {:.17e}",
                c.smoothness, c.radius, c.epsilon, c.early_stop, c.max_gap, floor
            ));
        }
    }
    if elapsed >= Duration::from_secs(5) {
        violations.push(format!("took {elapsed:?} (budget 5 s)"));
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 05: indistinguishable pair forces gap >= eps*R/2 in {} / {} cases ({elapsed:?})",
            report.zero_reply.iter().filter(|c| c.passed).count(),
            report.zero_reply.len()
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a06_retroactive_adversary_certifies_every_transcript() {
    let t0 = Instant::now();
    let cfg = LowerBoundConfig {
        grid: Vec::new(),
        transcripts: 20,
        transcript_len: 25,
        tau: 0.5,
        smoothness: 1.0,
        seed: 0,
    };
    let (report, _rows) = run_lower_bound(&cfg).unwrap();
    let elapsed = t0.elapsed();

    let mut violations = Vec::new();
    if report.deferred.len() != 20 {
        violations.push(format!("expected 20 transcripts, got {}", report.deferred.len()));
    }
    for c in &report.deferred {
        if !c.replies_match {
            violations.push(format!(
                "transcript {}: a queried point's derivative is not bitwise 3*tau",
                c.transcript
            ));
        }
        if c.value_at_output < c.target {
            violations.push(format!(
                "transcript {}: f(w_out) = {:.17e} below 3*tau = {:.17e}",
                c.transcript, c.value_at_output, c.target
            ));
        }
    }
    if elapsed >= Duration::from_secs(1) {
        violations.push(format!("took {elapsed:?} (budget 1 s)"));
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 06: retroactive instance matches all 20 transcripts exactly ({elapsed:?})"
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a07_plain_descent_lands_within_its_floor() {
    let batch = guarantee_batch();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for r in &batch.plain_runs {
        let bound = 5.0 * r.epsilon * norm(&r.wstar) + 2.5 * r.epsilon * r.radius;
        worst = worst.max(r.gap - bound);
        if r.gap > bound + 1e-9 {
            violations.push(format!(
                "instance {} / {}: gap {:.3e} above 5*eps*|w*| + (5/2)*eps*R = {:.3e}",
                r.instance, r.strategy, r.gap, bound
            ));
        }
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 07: plain descent within its floor on {} runs (worst excess {worst:.3e})",
            batch.plain_runs.len()
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a08_subsampled_means_concentrate_at_the_derived_rate() {
    let t0 = Instant::now();
    let (n, d) = (50usize, 5usize);
    let (b, t, delta) = (1.0, 0.3, 0.05);
    let m = required_m(b, t, delta).unwrap();

    let mut violations = Vec::new();
    if m != 1312 {
        violations.push(format!("required_m(1, 0.3, 0.05) = {m}, expected 1312"));
    }

    // Points uniform in the centered cube inscribed in the unit ball.
    let half = b / (d as f64).sqrt();
    let mut gen = ChaCha8Rng::seed_from_u64(31415);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| gen.random::<f64>() * 2.0 * half - half)
                .collect()
        })
        .collect();
    let set = PointSet::new(points, b).unwrap();
    let center = set.center();

    let trials = 2000u64;
    let mut failures = 0usize;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(31415, 1 + trial));
        let est = set.sampled_center(m, &mut rng).unwrap();
        if dist(&est, &center) > t {
            failures += 1;
        }
    }
    let empirical = failures as f64 / trials as f64;
    let elapsed = t0.elapsed();

    if empirical > delta + 0.02 {
        violations.push(format!(
            "empirical failure rate {empirical} above {delta} + 0.02"
        ));
    }
    if elapsed >= Duration::from_secs(10) {
        violations.push(format!("took {elapsed:?} (budget 10 s)"));
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 08: m = {m} samples miss by more than t in {failures}/{trials} trials ({elapsed:?})"
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a09_sampled_protocol_hits_tau_with_high_probability() {
    let batch = sampled_batch();
    let mut violations = Vec::new();
    if batch.successes * 10 < batch.trials * 9 {
        violations.push(format!(
            "only {}/{} runs reached gap <= tau",
            batch.successes, batch.trials
        ));
    }
    if batch.m != 111_943 {
        violations.push(format!(
            "derived per-round sample count changed: {} (expected 111943)",
            batch.m
        ));
    }
    let timely = batch.elapsed < Duration::from_secs(60);
    if !timely {
        violations.push(format!("batch took {:?} (budget 60 s)", batch.elapsed));
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 09: {}/{} sampled runs within tau = {:.6} (worst gap {:.3e}, m = {}, {:?})",
            batch.successes, batch.trials, batch.tau, batch.worst_gap, batch.m, batch.elapsed
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a10_query_accounting_is_exact_in_both_modes() {
    let mut violations = Vec::new();
    let mut lines = Vec::new();

    // Full mode, eps = 0 so the stop threshold is unreachable: n*K queries.
    for (cfg_i, (n, tau)) in [(1usize, 0.25), (3, 0.1), (7, 0.5), (20, 0.05), (50, 1.0)]
        .into_iter()
        .enumerate()
    {
        let losses: Vec<Loss> = (0..n)
            .map(|i| Loss::quadratic(vec![0.5 + i as f64 / n as f64, -0.25], 1.0).unwrap())
            .collect();
        let mut pool = ClientPool::uniform(
            losses,
            dlagp::oracle::StrategyKind::Exact,
            0.0,
            derive_seed(5000, cfg_i as u64),
        )
        .unwrap();
        let k = k_schedule(1.0, 1.0, tau, 0.0).unwrap();
        let out = run_dlagp(
            &mut pool,
            tau,
            1.0,
            DlagpMode::Full,
            dlagp::optimizer::TraceMode::Summary,
        )
        .unwrap();
        let expected = (n * k) as u64;
        if out.queries_used != expected
            || pool.queries() != expected
            || out.iterations != k
            || out.run.termination != Termination::BudgetExhausted
        {
            violations.push(format!(
                "full mode n={n} tau={tau}: used {} queries over {} rounds, expected {} over {k}",
                out.queries_used, out.iterations, expected
            ));
        }
        lines.push(format!("full n={n} K={k}: {}", out.queries_used));
    }

    // Budget mode: floor(Q/K)*K queries, never more than Q.
    for (cfg_i, q) in [100u64, 123, 480, 999, 3200].into_iter().enumerate() {
        let losses: Vec<Loss> = (0..10)
            .map(|i| Loss::quadratic(vec![i as f64 / 10.0, 0.25], 1.0).unwrap())
            .collect();
        let mut pool = ClientPool::uniform(
            losses,
            dlagp::oracle::StrategyKind::RandomMix,
            0.05,
            derive_seed(6000, cfg_i as u64),
        )
        .unwrap();
        let tau = 0.25;
        let k = k_schedule(1.0, 1.0, tau, 0.05).unwrap();
        let out = run_dlagp(
            &mut pool,
            tau,
            1.0,
            DlagpMode::Budget { q },
            dlagp::optimizer::TraceMode::Summary,
        )
        .unwrap();
        let expected = (q / k as u64) * k as u64;
        if out.queries_used != expected || out.queries_used > q || out.iterations != k {
            violations.push(format!(
                "budget mode Q={q}: used {} queries over {} rounds, expected {expected} over {k}",
                out.queries_used, out.iterations
            ));
        }
        lines.push(format!("budget Q={q} K={k}: {}", out.queries_used));
    }

    verdict(
        violations.is_empty(),
        &format!(
            "criterion 10: query accounting exact on 10 configurations ({})",
            lines.join(", ")
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a11_perturbation_reshapes_the_loss_curves() {
    let batch = curve_batch();
    let mut violations = Vec::new();

    // (a) Fixed-direction drift at the largest perturbation: the best loss
    // occurs strictly inside the horizon, so training longer hurts.
    let eps_max = *batch
        .epsilons
        .iter()
        .max_by(|a, b| a.total_cmp(b))
        .unwrap();
    let mut curve: Vec<(u64, f64)> = batch
        .rows
        .iter()
        .filter(|r| r.strategy == "fixed-direction" && r.epsilon == eps_max)
        .map(|r| (r.k.unwrap(), r.loss))
        .collect();
    curve.sort_by_key(|(k, _)| *k);
    let (argmin, min_loss) = curve
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let final_loss = curve.last().unwrap().1;
    let interior = argmin > 0 && argmin < batch.k as u64;
    if !interior {
        violations.push(format!(
            "fixed-direction argmin at k = {argmin} is not interior to [0, {}]",
            batch.k
        ));
    }
    if final_loss - min_loss < 1e-2 {
        violations.push(format!(
            "overtraining penalty {:.3e} too small to call a V shape",
            final_loss - min_loss
        ));
    }

    // (b) Opposing shrinkage: the reachable floor rises with epsilon.
    let mut finals = Vec::new();
    for eps in &batch.epsilons {
        let f = batch
            .rows
            .iter()
            .find(|r| {
                r.strategy == "opposing" && r.epsilon == *eps && r.k == Some(batch.k as u64)
            })
            .map(|r| r.loss)
            .unwrap();
        finals.push(f);
    }
    for pair in finals.windows(2) {
        if pair[1] < pair[0] {
            violations.push(format!(
                "opposing final loss decreased from {:.17e} to {:.17e} as eps grew",
                pair[0], pair[1]
            ));
        }
    }

    let timely = batch.elapsed < Duration::from_secs(60);
    if !timely {
        violations.push(format!("sweep took {:?} (budget 60 s)", batch.elapsed));
    }
    verdict(
        violations.is_empty(),
        &format!(
            "criterion 11: V-shaped drift curve (argmin k = {argmin}, penalty {:.3}) and \
             monotone opposing floor {:?} ({:?})",
            final_loss - min_loss,
            finals.iter().map(|f| (f * 1e4).round() / 1e4).collect::<Vec<_>>(),
            batch.elapsed
        ),
        &violations.join("\n"),
    );
}

#[test]
fn a12_preprocessing_dimension_arithmetic() {
    let map = LabelMap::plus_minus_one();
    let mut violations = Vec::new();
    let mut lines = Vec::new();
    for (raw_dim, drops, expected) in [
        (22usize, vec![], 23usize),
        (54, vec![], 55),
        (28, vec![9, 13, 17, 21], 25),
    ] {
        let n = 4;
        let raw = RawDataset {
            labels: (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            features: (0..n)
                .map(|i| (0..raw_dim).map(|j| ((i + j) % 5) as f64 * 0.25).collect())
                .collect(),
            dim: raw_dim,
        };
        let drop_dims: BTreeSet<usize> = drops.iter().copied().collect();
        let ds = preprocess(&raw, &map, &drop_dims).unwrap();
        if ds.dim() != expected {
            violations.push(format!(
                "raw dim {raw_dim} minus {} drops gave {}, expected {expected}",
                drop_dims.len(),
                ds.dim()
            ));
        }
        lines.push(format!(
            "{raw_dim}-{}+bias={}",
            drop_dims.len(),
            ds.dim()
        ));
    }
    verdict(
        violations.is_empty(),
        &format!("criterion 12: preprocessing dimensions check out ({})", lines.join(", ")),
        &violations.join("\n"),
    );
}

#[test]
fn a13_identical_seeds_reproduce_result_files_byte_for_byte() {
    let mut violations = Vec::new();

    let first = &guarantee_batch().csv;
    let again = build_guarantee_batch().csv;
    if *first != again {
        violations.push("guarantee batch rerun differed".to_string());
    }

    let first = &sampled_batch().csv;
    let again = build_sampled_batch().csv;
    if *first != again {
        violations.push("sampled protocol rerun differed".to_string());
    }

    let first = &curve_batch().csv;
    let again = build_curve_batch().csv;
    if *first != again {
        violations.push("perturbation sweep rerun differed".to_string());
    }

    verdict(
        violations.is_empty(),
        "criterion 13: reruns with identical seeds are byte-identical across all three pipelines",
        &violations.join("\n"),
    );
}
