//! Estimating the mean of a bounded point set from uniform samples.
//!
//! A set of n points with norms at most B has a center (the coordinate-wise
//! mean) that can be estimated by averaging m independent uniform draws.
//! [`required_m`] gives a sample count guaranteeing the estimate lands
//! within t of the center with probability at least 1 − δ.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::vector::{self, norm};
use crate::{Error, Result};

/// A nonempty set of same-dimension points with a certified norm bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vec<f64>>,
    bound: f64,
}

impl PointSet {
    /// Validates that the set is nonempty, dimensions agree, and every
    /// point has norm at most `bound` (up to a relative rounding slack).
    pub fn new(points: Vec<Vec<f64>>, bound: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "norm bound must be nonnegative and finite, got {bound}"
            )));
        }
        let d = points[0].len();
        let slack = 1e-12 * bound.max(1.0);
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            let n = norm(p);
            if !(n <= bound + slack) {
                return Err(Error::PointNormBound {
                    index: i,
                    norm: n,
                    bound,
                });
            }
        }
        Ok(Self { points, bound })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Coordinate-wise mean in index order.
    pub fn center(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim()];
        for p in &self.points {
            acc = vector::add_scaled(&acc, 1.0, p);
        }
        vector::scaled(&acc, 1.0 / self.points.len() as f64)
    }

    /// Mean of m uniform draws with replacement.
    pub fn sampled_center(&self, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "sample count must be at least 1".into(),
            ));
        }
        let mut acc = vec![0.0; self.dim()];
        for _ in 0..m {
            let i = rng.random_range(0..self.points.len());
            acc = vector::add_scaled(&acc, 1.0, &self.points[i]);
        }
        Ok(vector::scaled(&acc, 1.0 / m as f64))
    }
}

/// Samples sufficient for ‖sampled center − center‖ ≤ t with probability
/// ≥ 1 − δ over sets bounded by `b`: the larger of ⌈32(B/t)²·ln(2/δ)⌉ and
/// ⌈(4B/t)²⌉, never less than 1.
pub fn required_m(b: f64, t: f64, delta: f64) -> Result<usize> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "norm bound must be positive and finite, got {b}"
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "accuracy must be positive and finite, got {t}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "failure probability must lie in (0, 1), got {delta}"
        )));
    }
    let ratio = b / t;
    let concentration = (32.0 * ratio * ratio * (2.0 / delta).ln()).ceil();
    let expectation = (16.0 * ratio * ratio).ceil();
    Ok((concentration.max(expectation) as usize).max(1))
}
