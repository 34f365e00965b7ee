//! Convex optimization against adversarially perturbed gradient oracles.
//!
//! An ε-perturbed gradient oracle may answer a query at `w` with any vector
//! within distance ε of the true gradient. This crate simulates what convex
//! L-smooth optimization can and cannot achieve against such oracles:
//!
//! * [`optimizer`] — the early-stopping gradient method that reaches a target
//!   gap τ whenever τ ≥ 5·ε·‖w*‖, plus plain gradient descent for comparison.
//! * [`oracle`] — perturbation strategies, the one-dimensional ramp instances
//!   on which every algorithm must suffer Ω(εR) error, and the deferred
//!   adversary that certifies the norm bound R must be known in advance.
//! * [`distributed`] — a multi-client protocol where each client holds one
//!   loss and answers perturbed gradient queries; full, sampled, and fixed
//!   query-budget modes with the concentration-backed sample schedule.
//! * [`estimation`] — the center-estimation primitive behind the sampled
//!   mode: estimate the mean of n bounded vectors from m uniform draws.
//! * [`losses`] — quadratic, robust-regression, and binary cross-entropy
//!   member losses with their smoothness constants.
//! * [`data`] / [`experiment`] — LIBSVM ingestion, preprocessing, and the
//!   seeded sweep drivers with CSV/JSON emission.
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example single_run            # one optimizer run, gap vs target
//! cargo run --example adversarial_lower_bound
//! cargo run --example distributed_modes     # full vs sampled vs budget queries
//! cargo run --example center_estimation
//! cargo run --example oracle_sweep          # per-iteration loss curves -> CSV
//! cargo run --example budget_allocation     # final loss vs (Q, K) split -> CSV
//! cargo run --example ingest_libsvm
//! ```
//!
//! The same capabilities are exposed by the thin `dlagp` binary; see the
//! subcommands of `dlagp --help`.

pub mod cli;
pub mod data;
pub mod distributed;
pub mod estimation;
pub mod experiment;
pub mod losses;
pub mod optimizer;
pub mod oracle;
pub mod vector;

pub use losses::{AggregateLoss, Dataset, LabeledPoint, Loss, LossKind, Objective};
pub use optimizer::{agp_opt, k_schedule, plain_gd, OptimizerConfig, OptimizerRun};
pub use oracle::{DeferredAdversary, HardInstance1d, OracleStrategy, StrategyKind};

/// Errors shared by the library modules.
///
/// Data-file syntax problems carry their own location-aware type,
/// [`data::ParseError`], and convert into [`Error::Parse`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label {0} is not 0 or 1; map labels before building losses")]
    InvalidLabel(f64),
    #[error("aggregate needs at least one member loss")]
    EmptyAggregate,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("target gap tau must be positive, got {0}")]
    NonPositiveTau(f64),
    #[error("oracle reply at iteration {iteration} is not finite")]
    NonFiniteReply { iteration: usize },
    #[error("client index {index} out of range for pool of {len}")]
    ClientIndex { index: usize, len: usize },
    #[error(
        "tau = {tau} is below the sampled-mode threshold {threshold} \
         (need tau >= 5.01 * epsilon * R)"
    )]
    OutsideSampledRegime { tau: f64, threshold: f64 },
    #[error("query budget {q} is smaller than the iteration count {k}")]
    BudgetTooSmall { q: u64, k: u64 },
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("point {index} has norm {norm} above the declared bound {bound}")]
    PointNormBound { index: usize, norm: f64, bound: f64 },
    #[error("label {label} on row {row} has no entry in the label map")]
    UnmappedLabel { label: f64, row: usize },
    #[error(transparent)]
    Parse(#[from] data::ParseError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
