//! Perturbed gradient oracles and the instances that defeat them.
//!
//! An ε-perturbed oracle may answer a gradient query with any vector within
//! distance ε of the truth. [`OracleStrategy`] implements the perturbation
//! policies used in experiments; every reply is checked against the ε budget
//! in debug builds.
//!
//! [`HardInstance1d`] is the one-dimensional piecewise instance (flat, then
//! a quadratic ramp, then a linear tail of slope ε) whose gradient never
//! exceeds ε: an oracle replying zero everywhere is legal for the instance
//! and for its mirror image simultaneously, so no algorithm can tell them
//! apart, and one of the two costs at least εR/2. [`DeferredAdversary`]
//! answers every query with a constant slope and commits to an instance only
//! after the run, which rules out any finite gap bound when the norm of the
//! minimizer is unknown.

use crate::vector::{dist, norm};
use crate::{losses::Objective, Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Slack added to ε when asserting reply legality, to absorb rounding.
pub const LEGALITY_SLACK: f64 = 1e-12;

/// Perturbation policy applied to a true gradient.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    /// Reply with the true gradient.
    Exact,
    /// Shrink the gradient: g − ε·ĝ. Returns g unchanged when ‖g‖ = 0.
    Opposing,
    /// Stretch the gradient: g + ε·ĝ. Returns g unchanged when ‖g‖ = 0.
    Amplifying,
    /// Add ε in a fixed unit direction: g + ε·u.
    FixedDirection(Vec<f64>),
    /// Reply zero when that is legal (‖g‖ ≤ ε); otherwise fall back to
    /// `Opposing` so the reply stays within budget.
    ZeroReply,
    /// Pick uniformly per call among `Opposing`, `Amplifying`, and
    /// `FixedDirection` along the negative first axis.
    RandomMix,
}

impl StrategyKind {
    /// Default fixed perturbation direction: the negative first basis vector.
    pub fn neg_first_axis(d: usize) -> Vec<f64> {
        let mut u = vec![0.0; d];
        u[0] = -1.0;
        u
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Exact => "exact",
            StrategyKind::Opposing => "opposing",
            StrategyKind::Amplifying => "amplifying",
            StrategyKind::FixedDirection(_) => "fixed-direction",
            StrategyKind::ZeroReply => "zero-reply",
            StrategyKind::RandomMix => "random-mix",
        }
    }
}

/// A perturbation policy together with its budget ε.
///
/// Strategies are immutable; randomness comes in through the generator handed
/// to [`reply`](OracleStrategy::reply), so sweeps clone strategies freely and
/// derive per-run seeds instead of sharing generator state.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleStrategy {
    kind: StrategyKind,
    epsilon: f64,
}

impl OracleStrategy {
    pub fn new(kind: StrategyKind, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        if let StrategyKind::FixedDirection(u) = &kind {
            let n = norm(u);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "fixed perturbation direction must be a unit vector, norm = {n}"
                )));
            }
        }
        Ok(Self { kind, epsilon })
    }

    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Produce a reply to a query whose true gradient is `g_true`.
    ///
    /// Every reply is within ε of `g_true`; debug builds assert it.
    pub fn reply(&self, g_true: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let reply = self.reply_inner(&self.kind, g_true, rng);
        debug_assert!(
            dist(&reply, g_true) <= self.epsilon + LEGALITY_SLACK,
            "illegal oracle reply: ||reply - g|| = {} > epsilon = {}",
            dist(&reply, g_true),
            self.epsilon
        );
        reply
    }

    fn reply_inner(&self, kind: &StrategyKind, g: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let eps = self.epsilon;
        match kind {
            StrategyKind::Exact => g.to_vec(),
            StrategyKind::Opposing => scale_along(g, -eps),
            StrategyKind::Amplifying => scale_along(g, eps),
            StrategyKind::FixedDirection(u) => {
                g.iter().zip(u).map(|(gi, ui)| gi + eps * ui).collect()
            }
            StrategyKind::ZeroReply => {
                if norm(g) <= eps {
                    vec![0.0; g.len()]
                } else {
                    scale_along(g, -eps)
                }
            }
            StrategyKind::RandomMix => {
                let pick = rng.random_range(0..3u8);
                match pick {
                    0 => self.reply_inner(&StrategyKind::Opposing, g, rng),
                    1 => self.reply_inner(&StrategyKind::Amplifying, g, rng),
                    _ => {
                        let u = StrategyKind::neg_first_axis(g.len());
                        self.reply_inner(&StrategyKind::FixedDirection(u), g, rng)
                    }
                }
            }
        }
    }
}

/// g + s·ĝ; g itself when ‖g‖ = 0.
fn scale_along(g: &[f64], s: f64) -> Vec<f64> {
    let n = norm(g);
    if n == 0.0 {
        return g.to_vec();
    }
    let f = 1.0 + s / n;
    g.iter().map(|gi| gi * f).collect()
}

/// One-dimensional piecewise instance: flat at 0, a quadratic ramp of
/// curvature L over a width-ε/L window, then a linear tail of slope ε.
///
/// In the ascending orientation the minimizer spans (−∞, −R] with value 0
/// and the gradient never exceeds ε; `mirrored` reflects the instance so it
/// descends toward +R instead. The pair is indistinguishable to an oracle
/// that replies zero everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardInstance1d {
    radius: f64,
    smoothness: f64,
    epsilon: f64,
    mirrored: bool,
}

impl HardInstance1d {
    /// Ascending instance, minimizer at −R. Requires R ≥ 1, L ≥ 1, 0 < ε ≤ 1.
    pub fn ascending(radius: f64, smoothness: f64, epsilon: f64) -> Result<Self> {
        Self::checked(radius, smoothness, epsilon, false)
    }

    /// Mirror image of [`ascending`](Self::ascending), minimizer at +R.
    pub fn descending(radius: f64, smoothness: f64, epsilon: f64) -> Result<Self> {
        Self::checked(radius, smoothness, epsilon, true)
    }

    fn checked(radius: f64, smoothness: f64, epsilon: f64, mirrored: bool) -> Result<Self> {
        if !(radius >= 1.0) || !(smoothness >= 1.0) || !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ramp instance needs R >= 1, L >= 1, 0 < epsilon <= 1; \
                 got R = {radius}, L = {smoothness}, epsilon = {epsilon}"
            )));
        }
        Ok(Self {
            radius,
            smoothness,
            epsilon,
            mirrored,
        })
    }

    /// Unvalidated form used by the deferred adversary, whose finalized
    /// radius may be any nonnegative value and whose slope may exceed 1.
    fn raw(radius: f64, smoothness: f64, epsilon: f64) -> Self {
        debug_assert!(radius >= 0.0 && smoothness > 0.0 && epsilon > 0.0);
        Self {
            radius,
            smoothness,
            epsilon,
            mirrored: false,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn mirrored(&self) -> bool {
        self.mirrored
    }

    /// A global minimizer with value 0: ∓R depending on orientation.
    pub fn minimizer(&self) -> f64 {
        if self.mirrored {
            self.radius
        } else {
            -self.radius
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        let x = if self.mirrored { -w } else { w };
        let (r, l, e) = (self.radius, self.smoothness, self.epsilon);
        if x < -r {
            0.0
        } else if x <= -r + e / l {
            0.5 * l * (x + r) * (x + r)
        } else {
            e * x + e * r - e * e / (2.0 * l)
        }
    }

    pub fn grad(&self, w: f64) -> f64 {
        let x = if self.mirrored { -w } else { w };
        let (r, l, e) = (self.radius, self.smoothness, self.epsilon);
        let g = if x < -r {
            0.0
        } else if x <= -r + e / l {
            l * (x + r)
        } else {
            e
        };
        if self.mirrored {
            -g
        } else {
            g
        }
    }

    /// Borrowed view as a 1-dimensional [`Objective`].
    pub fn as_objective(&self) -> Hard1dObjective<'_> {
        Hard1dObjective(self)
    }
}

/// [`Objective`] adapter for [`HardInstance1d`].
pub struct Hard1dObjective<'a>(&'a HardInstance1d);

impl Objective for Hard1dObjective<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, w: &[f64]) -> Result<f64> {
        check_1d(w)?;
        Ok(self.0.eval(w[0]))
    }

    fn grad(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_1d(w)?;
        Ok(vec![self.0.grad(w[0])])
    }

    fn smoothness(&self) -> f64 {
        self.0.smoothness()
    }
}

fn check_1d(w: &[f64]) -> Result<()> {
    if w.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: w.len(),
        });
    }
    Ok(())
}

/// Adversary that answers every query with the constant slope 3τ and picks
/// the actual instance only after seeing the whole transcript.
///
/// Whatever the algorithm outputs, the finalized instance is consistent with
/// every reply it received (its gradient equals 3τ at each queried point) and
/// charges the output a gap of at least 3τ. Since τ is arbitrary, no finite
/// gap guarantee is possible without knowing a bound on ‖w*‖ up front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeferredAdversary {
    pub tau: f64,
    pub smoothness: f64,
}

impl DeferredAdversary {
    pub fn new(tau: f64, smoothness: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() || !(smoothness > 0.0) || !smoothness.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "deferred adversary needs tau > 0 and L > 0, got tau = {tau}, L = {smoothness}"
            )));
        }
        Ok(Self { tau, smoothness })
    }

    /// The constant reply to every gradient query.
    pub fn reply(&self) -> f64 {
        3.0 * self.tau
    }

    /// Commit to an instance after the run: place the ramp far enough left
    /// that every queried point and the output land on the linear tail.
    ///
    /// With v the leftmost point among the queries and the output, the
    /// finalized radius is max(0, 3τ/L − v + 1), so the tail (slope 3τ)
    /// starts at v − 1 and the transcript is exactly what the true oracle
    /// would have produced.
    pub fn finalize(&self, queries: &[f64], w_out: f64) -> HardInstance1d {
        debug_assert!(w_out.is_finite() && queries.iter().all(|q| q.is_finite()));
        let v = queries.iter().copied().fold(w_out, f64::min);
        let slope = 3.0 * self.tau;
        let radius = (slope / self.smoothness - v + 1.0).max(0.0);
        HardInstance1d::raw(radius, self.smoothness, slope)
    }
}
