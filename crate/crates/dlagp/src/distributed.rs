//! Multi-client optimization where the server sees one perturbed gradient
//! per client query.
//!
//! Each of n clients holds a loss ℓᵢ and answers gradient queries through
//! its own ε-perturbation strategy; the server minimizes the average loss.
//! Three query modes: aggregate every client each round (`Full`), average a
//! certified number of uniform draws so the sampling error stays inside the
//! perturbation budget (`Sampled`), or spread a fixed total query budget
//! across the rounds (`Budget`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::losses::{AggregateLoss, Loss};
use crate::optimizer::{
    agp_opt, k_schedule, plain_gd, OptimizerConfig, OptimizerRun, TraceMode,
};
use crate::oracle::{OracleStrategy, StrategyKind};
use crate::vector;
use crate::{Error, Result};

/// Sampled mode needs τ ≥ 5.01·ε·R: a hair above the 5·ε·R guarantee line,
/// leaving slack for the sampling error itself.
pub const REGIME_FACTOR: f64 = 5.01;

/// Stretch applied to the iterate-norm bound: iterates stay within
/// (17/8)·R of the origin, so client replies along a run are bounded by
/// their gradient norm there.
pub const ITERATE_NORM_FACTOR: f64 = 17.0 / 8.0;

/// Deterministic per-stream seed derivation (one splitmix64 round over the
/// pair). Stream 0 feeds the server's sampler; stream i+1 feeds client i.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One participant: a loss and the perturbation strategy it answers with.
#[derive(Debug, Clone)]
pub struct Client {
    id: usize,
    loss: Loss,
    strategy: OracleStrategy,
}

impl Client {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn loss(&self) -> &Loss {
        &self.loss
    }

    pub fn strategy(&self) -> &OracleStrategy {
        &self.strategy
    }
}

/// The full roster plus the randomness and accounting for a run.
///
/// Queries through [`ClientPool::query`] (and the oracles built on it) are
/// counted; instrumentation like [`ClientPool::compute_b0`] reads the losses
/// directly and is not.
#[derive(Debug, Clone)]
pub struct ClientPool {
    clients: Vec<Client>,
    rngs: Vec<ChaCha8Rng>,
    sampler: ChaCha8Rng,
    epsilon: f64,
    queries: u64,
}

impl ClientPool {
    pub fn new(
        losses: Vec<Loss>,
        strategies: Vec<StrategyKind>,
        epsilon: f64,
        seed: u64,
    ) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::EmptyAggregate);
        }
        if losses.len() != strategies.len() {
            return Err(Error::InvalidParameter(format!(
                "{} losses but {} strategies",
                losses.len(),
                strategies.len()
            )));
        }
        let d = losses[0].dim();
        for l in &losses {
            if l.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: l.dim(),
                });
            }
        }
        let clients = losses
            .into_iter()
            .zip(strategies)
            .enumerate()
            .map(|(id, (loss, kind))| {
                Ok(Client {
                    id,
                    loss,
                    strategy: OracleStrategy::new(kind, epsilon)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rngs = (0..clients.len())
            .map(|i| ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64 + 1)))
            .collect();
        Ok(Self {
            clients,
            rngs,
            sampler: ChaCha8Rng::seed_from_u64(derive_seed(seed, 0)),
            epsilon,
            queries: 0,
        })
    }

    /// Every client answers with the same strategy kind.
    pub fn uniform(losses: Vec<Loss>, kind: StrategyKind, epsilon: f64, seed: u64) -> Result<Self> {
        let strategies = vec![kind; losses.len()];
        Self::new(losses, strategies, epsilon, seed)
    }

    pub fn len(&self) -> usize {
        self.clients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.clients[0].loss.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn reset_queries(&mut self) {
        self.queries = 0;
    }

    pub fn clients(&self) -> &[Client] {
        &self.clients
    }

    /// One counted query: client i's perturbed gradient at w.
    pub fn query(&mut self, i: usize, w: &[f64]) -> Result<Vec<f64>> {
        let n = self.clients.len();
        let client = self.clients.get(i).ok_or(Error::ClientIndex { index: i, len: n })?;
        let g = client.loss.grad(w)?;
        self.queries += 1;
        Ok(client.strategy.reply(&g, &mut self.rngs[i]))
    }

    /// Index-order mean of every client's reply at w (n queries).
    pub fn full_oracle(&mut self, w: &[f64]) -> Result<Vec<f64>> {
        let n = self.clients.len();
        let mut acc = vec![0.0; self.dim()];
        for i in 0..n {
            let reply = self.query(i, w)?;
            acc = vector::add_scaled(&acc, 1.0, &reply);
        }
        Ok(vector::scaled(&acc, 1.0 / n as f64))
    }

    /// Mean of m replies from clients drawn uniformly with replacement
    /// (m queries).
    pub fn sampled_oracle(&mut self, w: &[f64], m: usize) -> Result<Vec<f64>> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "sample count must be at least 1".into(),
            ));
        }
        let n = self.clients.len();
        let mut acc = vec![0.0; self.dim()];
        for _ in 0..m {
            let i = self.sampler.random_range(0..n);
            let reply = self.query(i, w)?;
            acc = vector::add_scaled(&acc, 1.0, &reply);
        }
        Ok(vector::scaled(&acc, 1.0 / m as f64))
    }

    /// Largest true gradient norm at the origin across clients
    /// (instrumentation, not a counted query).
    pub fn compute_b0(&self) -> Result<f64> {
        let w0 = vec![0.0; self.dim()];
        let mut b0: f64 = 0.0;
        for c in &self.clients {
            b0 = b0.max(vector::norm(&c.loss.grad(&w0)?));
        }
        Ok(b0)
    }

    /// The objective the server is actually minimizing: the average of the
    /// client losses.
    pub fn aggregate(&self) -> Result<AggregateLoss> {
        AggregateLoss::new(self.clients.iter().map(|c| c.loss.clone()).collect())
    }

    /// Smoothness of the aggregate (max over members).
    pub fn smoothness(&self) -> f64 {
        self.clients
            .iter()
            .map(|c| c.loss.smoothness())
            .fold(0.0, f64::max)
    }
}

/// Derived parameters for one sampled-mode run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledConfig {
    /// Target gap.
    pub tau: f64,
    pub radius: f64,
    /// Overall failure probability across the whole run.
    pub delta: f64,
    /// Reply-norm bound along the run: max origin gradient plus the norm
    /// growth allowance (17/8)·L·R.
    pub b: f64,
    /// Per-client perturbation level.
    pub epsilon: f64,
    /// Sampling accuracy: the slack τ/(5R) − ε left between the target and
    /// the perturbation budget.
    pub t: f64,
    /// Per-iteration failure share δ/K.
    pub delta_step: f64,
    /// Samples per round.
    pub m: usize,
}

impl SampledConfig {
    /// Computes the per-round sample count for K rounds at overall failure
    /// probability δ. Requires the regime τ ≥ 5.01·ε·R, which leaves
    /// t = τ/(5R) − ε > 0 of the budget for sampling error.
    pub fn derive(
        tau: f64,
        radius: f64,
        delta: f64,
        b: f64,
        epsilon: f64,
        k: usize,
    ) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::NonPositiveTau(tau));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive and finite, got {radius}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "failure probability must lie in (0, 1), got {delta}"
            )));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reply norm bound must be positive and finite, got {b}"
            )));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be nonnegative and finite, got {epsilon}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter(
                "iteration count must be at least 1".into(),
            ));
        }
        let threshold = REGIME_FACTOR * epsilon * radius;
        if tau < threshold {
            return Err(Error::OutsideSampledRegime { tau, threshold });
        }
        let t = tau / (5.0 * radius) - epsilon;
        let delta_step = delta / k as f64;
        let ratio = b / t;
        let m = (32.0 * ratio * ratio * (2.0 * k as f64 / delta).ln() + 16.0 * ratio * ratio)
            .ceil() as usize;
        Ok(Self {
            tau,
            radius,
            delta,
            b,
            epsilon,
            t,
            delta_step,
            m: m.max(1),
        })
    }
}

/// How the server queries the pool each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DlagpMode {
    /// Every client, every round.
    Full,
    /// Uniform sub-sampling sized so the whole run succeeds with
    /// probability at least 1 − δ.
    Sampled { delta: f64 },
    /// A fixed total budget of Q queries split evenly over the rounds;
    /// runs without early stopping.
    Budget { q: u64 },
}

/// Outcome of one distributed run.
#[derive(Debug, Clone, PartialEq)]
pub struct DlagpRun {
    pub run: OptimizerRun,
    /// Counted client queries consumed by this run.
    pub queries_used: u64,
    /// Server rounds actually executed.
    pub iterations: usize,
    /// Queries per round.
    pub per_call: usize,
    /// Derived sampling parameters (sampled mode only).
    pub sampled: Option<SampledConfig>,
}

/// Run the early-stopping method against the pool in the given mode.
///
/// `tau` is the target gap and `radius` the assumed bound on the aggregate
/// minimizer's norm. Smoothness and ε come from the pool itself.
pub fn run_dlagp(
    pool: &mut ClientPool,
    tau: f64,
    radius: f64,
    mode: DlagpMode,
    trace: TraceMode,
) -> Result<DlagpRun> {
    let ell = pool.smoothness();
    let epsilon = pool.epsilon();
    let agg = pool.aggregate()?;
    let before = pool.queries();

    let (run, per_call, sampled) = match mode {
        DlagpMode::Full => {
            let mut cfg = OptimizerConfig::new(ell, epsilon, radius).with_tau(tau);
            cfg.trace = trace;
            let run = agp_opt(&agg, |w| pool.full_oracle(w), &cfg)?;
            (run, agg.len(), None)
        }
        DlagpMode::Sampled { delta } => {
            // Iteration count from the target alone; the ε branch of the
            // schedule is replaced by the sampling accuracy below.
            let k = (5.0 * ell * radius * radius / (4.0 * tau)).ceil() as usize;
            let k = k.max(1);
            let b0 = pool.compute_b0()?;
            let b = b0 + ITERATE_NORM_FACTOR * ell * radius;
            let params = SampledConfig::derive(tau, radius, delta, b, epsilon, k)?;
            // The server-side reply error is at most ε + t = τ/(5R) with
            // probability 1 − δ, so the single-oracle analysis applies at
            // that effective perturbation level.
            let eff_epsilon = tau / (5.0 * radius);
            let mut cfg = OptimizerConfig::new(ell, eff_epsilon, radius)
                .with_tau(tau)
                .with_budget(k);
            cfg.trace = trace;
            let m = params.m;
            let run = agp_opt(&agg, |w| pool.sampled_oracle(w, m), &cfg)?;
            (run, m, Some(params))
        }
        DlagpMode::Budget { q } => {
            let k = k_schedule(ell, radius, tau, epsilon)?;
            if q < k as u64 {
                return Err(Error::BudgetTooSmall { q, k: k as u64 });
            }
            let m = (q / k as u64) as usize;
            let mut cfg = OptimizerConfig::new(ell, epsilon, radius)
                .with_budget(k)
                .without_early_stop();
            cfg.trace = trace;
            let run = plain_gd(&agg, |w| pool.sampled_oracle(w, m), &cfg)?;
            (run, m, None)
        }
    };

    Ok(DlagpRun {
        queries_used: pool.queries() - before,
        iterations: run.oracle_calls as usize,
        per_call,
        sampled,
        run,
    })
}
