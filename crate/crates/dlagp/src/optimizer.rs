//! The early-stopping gradient method for ε-perturbed oracles.
//!
//! From w₀ = 0, repeat up to K times: query the oracle at w_k; if the reply
//! has norm below 4ε, return w_k; otherwise step w_{k+1} = w_k − g_k/(2L).
//! With K = ⌈min{5LR²/(4τ), LR/(4ε)}⌉ and a target τ ≥ 5·ε·‖w*‖ the returned
//! point has suboptimality gap at most τ, and every iterate stays within
//! (17/8)·R of the origin. Plain gradient descent is the same loop with the
//! early return disabled; it stalls at a Θ(εR) floor instead.

use crate::losses::Objective;
use crate::vector::{self, norm};
use crate::{Error, Result};

/// Early-return threshold as a multiple of ε.
pub const STOP_FACTOR: f64 = 4.0;

/// What gets recorded along a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// Keep every iterate and every oracle reply.
    Full,
    /// Keep only per-iteration losses and reply norms (for large sweeps).
    Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The reply norm dropped below 4ε and the loop returned early.
    EarlyStop,
    /// All K iterations ran.
    BudgetExhausted,
}

/// Run parameters.
///
/// `radius` is the assumed bound on ‖w*‖; together with `tau` it determines
/// the iteration count via [`k_schedule`] unless `k_override` pins one.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub smoothness: f64,
    pub epsilon: f64,
    pub radius: f64,
    pub tau: Option<f64>,
    pub k_override: Option<usize>,
    pub early_stop: bool,
    pub w0: Option<Vec<f64>>,
    pub trace: TraceMode,
}

impl OptimizerConfig {
    pub fn new(smoothness: f64, epsilon: f64, radius: f64) -> Self {
        Self {
            smoothness,
            epsilon,
            radius,
            tau: None,
            k_override: None,
            early_stop: true,
            w0: None,
            trace: TraceMode::Full,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_budget(mut self, k: usize) -> Self {
        self.k_override = Some(k);
        self
    }

    pub fn without_early_stop(mut self) -> Self {
        self.early_stop = false;
        self
    }

    pub fn with_start(mut self, w0: Vec<f64>) -> Self {
        self.w0 = Some(w0);
        self
    }

    pub fn summary_trace(mut self) -> Self {
        self.trace = TraceMode::Summary;
        self
    }

    /// Iterations to run: the explicit override, or the schedule from
    /// (L, R, τ, ε).
    pub fn iteration_budget(&self) -> Result<usize> {
        if let Some(k) = self.k_override {
            if k == 0 {
                return Err(Error::InvalidParameter(
                    "iteration budget must be at least 1".into(),
                ));
            }
            return Ok(k);
        }
        match self.tau {
            Some(tau) => k_schedule(self.smoothness, self.radius, tau, self.epsilon),
            None => Err(Error::InvalidParameter(
                "no iteration budget: set tau or an explicit K".into(),
            )),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.smoothness > 0.0) || !self.smoothness.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "smoothness must be positive and finite, got {}",
                self.smoothness
            )));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be nonnegative and finite, got {}",
                self.epsilon
            )));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive and finite, got {}",
                self.radius
            )));
        }
        Ok(())
    }

    /// True when a run with early stopping enabled claims the τ-gap
    /// guarantee: τ ≥ 5·ε·R up to rounding slack.
    fn tau_covers_radius(&self) -> bool {
        self.tau
            .is_some_and(|t| t * (1.0 + 1e-12) >= 5.0 * self.epsilon * self.radius)
    }
}

/// Iteration count ⌈min{5LR²/(4τ), LR/(4ε)}⌉; the second branch is +∞ when
/// ε = 0. Errors when τ ≤ 0.
pub fn k_schedule(smoothness: f64, radius: f64, tau: f64, epsilon: f64) -> Result<usize> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::NonPositiveTau(tau));
    }
    if !(smoothness > 0.0) || !(radius > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k_schedule needs L > 0, R > 0, epsilon >= 0; \
             got L = {smoothness}, R = {radius}, epsilon = {epsilon}"
        )));
    }
    let by_tau = 5.0 * smoothness * radius * radius / (4.0 * tau);
    let by_eps = if epsilon > 0.0 {
        smoothness * radius / (4.0 * epsilon)
    } else {
        f64::INFINITY
    };
    Ok(by_tau.min(by_eps).ceil() as usize)
}

/// The record of one run.
///
/// `losses[k]` is the true objective at the k-th recorded iterate (always
/// kept, in both trace modes); `grad_norms[k]` is the norm of the k-th oracle
/// reply. In [`TraceMode::Full`], `iterates` holds w₀..w_last and `replies`
/// one entry per oracle call: equal lengths after an early stop, one fewer
/// reply when the budget ran out.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerRun {
    pub iterates: Vec<Vec<f64>>,
    pub replies: Vec<Vec<f64>>,
    pub losses: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub final_iterate: Vec<f64>,
    pub termination: Termination,
    pub oracle_calls: u64,
    pub outside_guarantee: bool,
}

impl OptimizerRun {
    /// Smallest recorded objective value; an upper bound on the gap floor
    /// when the minimizer is unknown.
    pub fn best_loss(&self) -> f64 {
        self.losses.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Run the early-stopping method against an oracle.
///
/// The oracle sees only query points; `f` itself is used for instrumentation
/// (per-iterate losses). Replies must be finite vectors of the right
/// dimension or the run aborts with an error naming the iteration.
pub fn agp_opt<F, O>(f: &F, oracle: O, cfg: &OptimizerConfig) -> Result<OptimizerRun>
where
    F: Objective + ?Sized,
    O: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    run_loop(f, oracle, cfg, cfg.early_stop)
}

/// Plain gradient descent: the same loop with early return disabled, always
/// consuming the full iteration budget.
pub fn plain_gd<F, O>(f: &F, oracle: O, cfg: &OptimizerConfig) -> Result<OptimizerRun>
where
    F: Objective + ?Sized,
    O: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    run_loop(f, oracle, cfg, false)
}

fn run_loop<F, O>(f: &F, mut oracle: O, cfg: &OptimizerConfig, early_stop: bool) -> Result<OptimizerRun>
where
    F: Objective + ?Sized,
    O: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    let k_max = cfg.iteration_budget()?;
    let d = f.dim();
    let mut w = match &cfg.w0 {
        Some(w0) => {
            if w0.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: w0.len(),
                });
            }
            w0.clone()
        }
        None => vec![0.0; d],
    };

    let step = -1.0 / (2.0 * cfg.smoothness);
    let threshold = STOP_FACTOR * cfg.epsilon;
    let full = cfg.trace == TraceMode::Full;
    let outside_guarantee = !(early_stop && cfg.tau_covers_radius());

    let mut run = OptimizerRun {
        iterates: Vec::new(),
        replies: Vec::new(),
        losses: Vec::with_capacity(k_max + 1),
        grad_norms: Vec::with_capacity(k_max),
        final_iterate: Vec::new(),
        termination: Termination::BudgetExhausted,
        oracle_calls: 0,
        outside_guarantee,
    };

    if full {
        run.iterates.push(w.clone());
    }
    run.losses.push(f.eval(&w)?);

    for k in 0..k_max {
        let g = oracle(&w)?;
        if g.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: g.len(),
            });
        }
        if !vector::is_finite(&g) {
            return Err(Error::NonFiniteReply { iteration: k });
        }
        run.oracle_calls += 1;
        let g_norm = norm(&g);
        run.grad_norms.push(g_norm);
        if full {
            run.replies.push(g.clone());
        }
        if early_stop && g_norm < threshold {
            run.termination = Termination::EarlyStop;
            run.final_iterate = w;
            return Ok(run);
        }
        w = vector::add_scaled(&w, step, &g);
        if full {
            run.iterates.push(w.clone());
        }
        run.losses.push(f.eval(&w)?);
    }

    run.termination = Termination::BudgetExhausted;
    run.final_iterate = w;
    Ok(run)
}

/// f(final iterate) − f(w_star). Nonnegative (up to rounding) when `w_star`
/// is a true minimizer.
pub fn suboptimality_gap<F>(f: &F, run: &OptimizerRun, w_star: &[f64]) -> Result<f64>
where
    F: Objective + ?Sized,
{
    let gap = f.eval(&run.final_iterate)? - f.eval(w_star)?;
    debug_assert!(gap >= -1e-12, "negative gap {gap}: w_star is not a minimizer");
    Ok(gap)
}
