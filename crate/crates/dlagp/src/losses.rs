//! Member losses, their smoothness constants, and uniform averages.
//!
//! Each loss is built from one labeled point (or, for the quadratic family,
//! a center), and the objective optimized elsewhere is the arithmetic mean
//! of the members. Labels are always in {0, 1}; raw datasets must be mapped
//! before losses are built (see [`crate::data::preprocess`]).

use crate::vector::{dot, norm, sub};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest curvature of z ↦ (σ(z) − y)² over z ∈ ℝ, y ∈ {0, 1}.
///
/// Determined numerically: the second derivative is 2s²(1−s)(2−3s) with
/// s = σ(z), peaking at s = (15 − √33)/24. Dense grid search agrees to
/// 1e-9; the stored value is rounded up in the last digit so it upper
/// bounds the true supremum.
pub const RR_CURVATURE_SUP: f64 = 0.154_058_570_121_350_6;

/// Curvature bound of the log-loss link: sup σ′ = 1/4.
pub const BCE_CURVATURE_SUP: f64 = 0.25;

/// Numerically stable σ(z) = 1 / (1 + e^{−z}).
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log σ(z), branch-stable for large |z| (never exponentiates a positive arg).
pub fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// One training point: features and a {0, 1} label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: f64,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if y != 0.0 && y != 1.0 {
            return Err(Error::InvalidLabel(y));
        }
        if x.is_empty() || !x.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "feature vector must be nonempty and finite".into(),
            ));
        }
        Ok(Self { x, y })
    }
}

/// A uniform-dimension collection of labeled points.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
}

impl Dataset {
    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        let d = match points.first() {
            Some(p) => p.x.len(),
            None => return Err(Error::InvalidParameter("dataset is empty".into())),
        };
        if let Some(bad) = points.iter().find(|p| p.x.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.x.len(),
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].x.len()
    }
}

/// Loss family tag, used by configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Quadratic,
    RobustRegression,
    BinaryCrossEntropy,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Quadratic => "quadratic",
            LossKind::RobustRegression => "rr",
            LossKind::BinaryCrossEntropy => "bce",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" | "quad" => Ok(LossKind::Quadratic),
            "rr" | "robust-regression" => Ok(LossKind::RobustRegression),
            "bce" | "binary-cross-entropy" => Ok(LossKind::BinaryCrossEntropy),
            other => Err(Error::InvalidParameter(format!(
                "unknown loss `{other}` (expected quadratic, rr, or bce)"
            ))),
        }
    }
}

/// One member loss.
///
/// * `Quadratic`: (scale/2)·‖w − center‖², minimizer at the center.
/// * `RobustRegression`: (σ(⟨w,x⟩) − y)², bounded but not convex in w.
/// * `BinaryCrossEntropy`: −y·log σ(⟨w,x⟩) − (1−y)·log(1 − σ(⟨w,x⟩)), convex.
#[derive(Debug, Clone, PartialEq)]
pub enum Loss {
    Quadratic { center: Vec<f64>, scale: f64 },
    RobustRegression(LabeledPoint),
    BinaryCrossEntropy(LabeledPoint),
}

impl Loss {
    pub fn quadratic(center: Vec<f64>, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "quadratic scale must be positive and finite, got {scale}"
            )));
        }
        if center.is_empty() || !center.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "quadratic center must be nonempty and finite".into(),
            ));
        }
        Ok(Loss::Quadratic { center, scale })
    }

    pub fn robust_regression(point: LabeledPoint) -> Self {
        Loss::RobustRegression(point)
    }

    pub fn binary_cross_entropy(point: LabeledPoint) -> Self {
        Loss::BinaryCrossEntropy(point)
    }

    /// Build a member of the given kind from one data point.
    /// Quadratic members come from centers, not points.
    pub fn from_point(kind: LossKind, point: LabeledPoint) -> Result<Self> {
        match kind {
            LossKind::RobustRegression => Ok(Loss::RobustRegression(point)),
            LossKind::BinaryCrossEntropy => Ok(Loss::BinaryCrossEntropy(point)),
            LossKind::Quadratic => Err(Error::InvalidParameter(
                "quadratic members are built from centers, not data points".into(),
            )),
        }
    }

    pub fn kind(&self) -> LossKind {
        match self {
            Loss::Quadratic { .. } => LossKind::Quadratic,
            Loss::RobustRegression(_) => LossKind::RobustRegression,
            Loss::BinaryCrossEntropy(_) => LossKind::BinaryCrossEntropy,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Loss::Quadratic { center, .. } => center.len(),
            Loss::RobustRegression(p) | Loss::BinaryCrossEntropy(p) => p.x.len(),
        }
    }

    fn check_dim(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: w.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, w: &[f64]) -> Result<f64> {
        self.check_dim(w)?;
        Ok(match self {
            Loss::Quadratic { center, scale } => {
                let diff = sub(w, center);
                0.5 * scale * dot(&diff, &diff)
            }
            Loss::RobustRegression(p) => {
                let e = sigmoid(dot(w, &p.x)) - p.y;
                e * e
            }
            Loss::BinaryCrossEntropy(p) => {
                let z = dot(w, &p.x);
                -p.y * log_sigmoid(z) - (1.0 - p.y) * log_sigmoid(-z)
            }
        })
    }

    pub fn grad(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(w)?;
        Ok(match self {
            Loss::Quadratic { center, scale } => {
                w.iter().zip(center).map(|(wi, ci)| scale * (wi - ci)).collect()
            }
            Loss::RobustRegression(p) => {
                let s = sigmoid(dot(w, &p.x));
                let coeff = 2.0 * (s - p.y) * s * (1.0 - s);
                p.x.iter().map(|xi| coeff * xi).collect()
            }
            Loss::BinaryCrossEntropy(p) => {
                let coeff = sigmoid(dot(w, &p.x)) - p.y;
                p.x.iter().map(|xi| coeff * xi).collect()
            }
        })
    }

    /// Smoothness constant L of this member: the gradient is L-Lipschitz.
    pub fn smoothness(&self) -> f64 {
        match self {
            Loss::Quadratic { scale, .. } => *scale,
            Loss::RobustRegression(p) => {
                let n = norm(&p.x);
                RR_CURVATURE_SUP * n * n
            }
            Loss::BinaryCrossEntropy(p) => {
                let n = norm(&p.x);
                BCE_CURVATURE_SUP * n * n
            }
        }
    }
}

/// Anything the optimizer can evaluate and differentiate.
pub trait Objective {
    fn dim(&self) -> usize;
    fn eval(&self, w: &[f64]) -> Result<f64>;
    fn grad(&self, w: &[f64]) -> Result<Vec<f64>>;
    /// Gradient Lipschitz constant.
    fn smoothness(&self) -> f64;
}

impl Objective for Loss {
    fn dim(&self) -> usize {
        Loss::dim(self)
    }

    fn eval(&self, w: &[f64]) -> Result<f64> {
        Loss::eval(self, w)
    }

    fn grad(&self, w: &[f64]) -> Result<Vec<f64>> {
        Loss::grad(self, w)
    }

    fn smoothness(&self) -> f64 {
        Loss::smoothness(self)
    }
}

/// Arithmetic mean of member losses, summed in index order.
///
/// Value and gradient are the exact means (sum in index order, then one
/// division); the smoothness constant is the max over members.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateLoss {
    members: Vec<Loss>,
}

impl AggregateLoss {
    pub fn new(members: Vec<Loss>) -> Result<Self> {
        let d = match members.first() {
            Some(m) => m.dim(),
            None => return Err(Error::EmptyAggregate),
        };
        if let Some(bad) = members.iter().find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        Ok(Self { members })
    }

    /// One member per data point, all of the same kind (rr or bce).
    pub fn from_dataset(ds: &Dataset, kind: LossKind) -> Result<Self> {
        let members = ds
            .points()
            .iter()
            .map(|p| Loss::from_point(kind, p.clone()))
            .collect::<Result<Vec<_>>>()?;
        AggregateLoss::new(members)
    }

    pub fn members(&self) -> &[Loss] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl Objective for AggregateLoss {
    fn dim(&self) -> usize {
        self.members[0].dim()
    }

    fn eval(&self, w: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for m in &self.members {
            sum += m.eval(w)?;
        }
        Ok(sum / self.members.len() as f64)
    }

    fn grad(&self, w: &[f64]) -> Result<Vec<f64>> {
        let mut sum = vec![0.0; self.dim()];
        for m in &self.members {
            let g = m.grad(w)?;
            for (s, gi) in sum.iter_mut().zip(&g) {
                *s += gi;
            }
        }
        let inv = 1.0 / self.members.len() as f64;
        for s in &mut sum {
            *s *= inv;
        }
        Ok(sum)
    }

    fn smoothness(&self) -> f64 {
        self.members
            .iter()
            .map(Loss::smoothness)
            .fold(0.0, f64::max)
    }
}

/// Synthetic binary classification data: features uniform in [−1, 1] with a
/// trailing bias coordinate fixed to 1, labels from a random ground-truth
/// hyperplane, optionally with 10% label flips.
///
/// Bit-identical across calls with equal `(n, d, seed, separable)`.
pub fn synth_dataset(n: usize, d: usize, seed: u64, separable: bool) -> Result<Dataset> {
    synth_dataset_with_truth(n, d, seed, separable).map(|(ds, _)| ds)
}

/// Same as [`synth_dataset`], also returning the generating hyperplane.
pub fn synth_dataset_with_truth(
    n: usize,
    d: usize,
    seed: u64,
    separable: bool,
) -> Result<(Dataset, Vec<f64>)> {
    if n < 1 || d < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1 and d >= 2, got n = {n}, d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        x.push(1.0);
        let mut y = if dot(&truth, &x) >= 0.0 { 1.0 } else { 0.0 };
        if !separable && rng.random::<f64>() < 0.1 {
            y = 1.0 - y;
        }
        points.push(LabeledPoint { x, y });
    }
    Ok((Dataset::new(points)?, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn point(x: &[f64], y: f64) -> LabeledPoint {
        LabeledPoint::new(x.to_vec(), y).unwrap()
    }

    #[test]
    fn bce_at_origin_is_ln_two() {
        let l = Loss::binary_cross_entropy(point(&[1.0, 0.0], 1.0));
        assert!((l.eval(&[0.0, 0.0]).unwrap() - LN2).abs() < 1e-15);
    }

    #[test]
    fn bce_stays_finite_at_extreme_margins() {
        let l = Loss::binary_cross_entropy(point(&[1.0, 0.0], 0.0));
        let v = l.eval(&[700.0, 0.0]).unwrap();
        assert!(v.is_finite());
        assert!((v - 700.0).abs() < 1e-9); // −log σ(−z) → z for large z
        let v = l.eval(&[-700.0, 0.0]).unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }

    #[test]
    fn rr_at_origin() {
        let l = Loss::robust_regression(point(&[1.0, 0.0], 1.0));
        assert_eq!(l.eval(&[0.0, 0.0]).unwrap(), 0.25);
    }

    #[test]
    fn quadratic_value_and_grad() {
        let l = Loss::quadratic(vec![1.0, 1.0], 2.0).unwrap();
        assert_eq!(l.eval(&[0.0, 0.0]).unwrap(), 2.0);
        assert_eq!(l.grad(&[0.0, 0.0]).unwrap(), vec![-2.0, -2.0]);
    }

    #[test]
    fn bce_grad_worked_example() {
        let l = Loss::binary_cross_entropy(point(&[1.0, 1.0], 1.0));
        assert_eq!(l.grad(&[0.0, 0.0]).unwrap(), vec![-0.5, -0.5]);
    }

    #[test]
    fn rr_grad_worked_example() {
        // 2(σ−y)σ(1−σ) at z = 0, y = 0 is 2·(1/2)·(1/2)·(1/2) = 1/4.
        let l = Loss::robust_regression(point(&[1.0, 0.0], 0.0));
        assert_eq!(l.grad(&[0.0, 0.0]).unwrap(), vec![0.25, 0.0]);
    }

    fn fd_grad(l: &Loss, w: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..w.len())
            .map(|i| {
                let mut wp = w.to_vec();
                let mut wm = w.to_vec();
                wp[i] += h;
                wm[i] -= h;
                (l.eval(&wp).unwrap() - l.eval(&wm).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradients_match_finite_differences_on_worked_points() {
        let cases = [
            Loss::quadratic(vec![0.3, -0.7], 2.5).unwrap(),
            Loss::robust_regression(point(&[1.0, -0.5], 1.0)),
            Loss::binary_cross_entropy(point(&[0.8, 0.4], 0.0)),
        ];
        for l in &cases {
            for w in [[0.0, 0.0], [0.5, -1.0], [-1.2, 0.3]] {
                let a = l.grad(&w).unwrap();
                let f = fd_grad(l, &w);
                for (ai, fi) in a.iter().zip(&f) {
                    assert!((ai - fi).abs() < 1e-6, "{ai} vs {fi}");
                }
            }
        }
    }

    #[test]
    fn smoothness_constants() {
        let bce = Loss::binary_cross_entropy(point(&[2.0, 0.0], 1.0));
        assert_eq!(bce.smoothness(), 1.0);
        let rr = Loss::robust_regression(point(&[1.0, 0.0], 0.0));
        assert_eq!(rr.smoothness(), RR_CURVATURE_SUP);
        let q = Loss::quadratic(vec![0.0], 3.0).unwrap();
        assert_eq!(q.smoothness(), 3.0);
    }

    /// Re-derives the hard-coded RR curvature bound by dense grid search over
    /// the second central difference of z ↦ (σ(z) − y)².
    #[test]
    fn rr_curvature_constant_matches_grid_search() {
        let h = 1e-4;
        let mut sup: f64 = 0.0;
        for y in [0.0, 1.0] {
            let f = |z: f64| {
                let e = sigmoid(z) - y;
                e * e
            };
            let mut z = -12.0;
            while z <= 12.0 {
                let d2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
                sup = sup.max(d2.abs());
                z += 1e-3;
            }
        }
        assert!((RR_CURVATURE_SUP - sup).abs() < 1e-6);
        // The frozen constant must dominate, so the smoothness claim is safe.
        assert!(RR_CURVATURE_SUP + 1e-9 >= sup);
    }

    #[test]
    fn aggregate_is_plain_mean() {
        let agg = AggregateLoss::new(vec![
            Loss::quadratic(vec![1.0, 0.0], 1.0).unwrap(),
            Loss::quadratic(vec![-1.0, 0.0], 1.0).unwrap(),
        ])
        .unwrap();
        let w = [0.0, 0.0];
        assert_eq!(agg.eval(&w).unwrap(), 0.5);
        assert_eq!(agg.grad(&w).unwrap(), vec![0.0, 0.0]);
        assert_eq!(agg.smoothness(), 1.0);
    }

    #[test]
    fn aggregate_single_member_is_identity() {
        let inner = Loss::binary_cross_entropy(point(&[1.0, 1.0], 1.0));
        let agg = AggregateLoss::new(vec![inner.clone()]).unwrap();
        let w = [0.3, -0.4];
        assert_eq!(agg.eval(&w).unwrap(), inner.eval(&w).unwrap());
        assert_eq!(agg.grad(&w).unwrap(), inner.grad(&w).unwrap());
    }

    #[test]
    fn aggregate_rejects_empty_and_mismatched() {
        assert!(matches!(
            AggregateLoss::new(vec![]),
            Err(Error::EmptyAggregate)
        ));
        let r = AggregateLoss::new(vec![
            Loss::quadratic(vec![0.0, 0.0], 1.0).unwrap(),
            Loss::quadratic(vec![0.0], 1.0).unwrap(),
        ]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let l = Loss::quadratic(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            l.eval(&[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            l.grad(&[0.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn labels_outside_unit_pair_are_rejected() {
        assert!(matches!(
            LabeledPoint::new(vec![1.0], -1.0),
            Err(Error::InvalidLabel(_))
        ));
    }

    #[test]
    fn synth_dataset_is_deterministic_and_biased() {
        let a = synth_dataset(20, 4, 7, true).unwrap();
        let b = synth_dataset(20, 4, 7, true).unwrap();
        assert_eq!(a, b);
        assert!(a.points().iter().all(|p| p.x[3] == 1.0));
        assert_eq!(a.dim(), 4);
    }

    #[test]
    fn separable_data_is_separated_by_the_truth() {
        let (ds, truth) = synth_dataset_with_truth(200, 5, 11, true).unwrap();
        for p in ds.points() {
            let predicted = if dot(&truth, &p.x) >= 0.0 { 1.0 } else { 0.0 };
            assert_eq!(predicted, p.y);
        }
    }

    #[test]
    fn flip_noise_changes_some_labels() {
        let (noisy, truth) = synth_dataset_with_truth(400, 5, 11, false).unwrap();
        let flipped = noisy
            .points()
            .iter()
            .filter(|p| {
                let t = if dot(&truth, &p.x) >= 0.0 { 1.0 } else { 0.0 };
                t != p.y
            })
            .count();
        assert!(flipped > 0, "expected some flipped labels");
        assert!((flipped as f64) < 0.2 * 400.0);
    }
}
