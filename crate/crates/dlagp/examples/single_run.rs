//! One early-stopping run against a perturbed oracle.
//!
//! Builds a small quadratic objective, lets the oracle shrink every reply by
//! epsilon along the gradient (the worst legal slowdown), and traces the run
//! until the reply norm drops under the stopping threshold.
//!
//! ```sh
//! cargo run --example single_run
//! ```

use std::error::Error;

use dlagp::losses::{AggregateLoss, Loss, Objective};
use dlagp::optimizer::{agp_opt, suboptimality_gap, OptimizerConfig, Termination};
use dlagp::oracle::{OracleStrategy, StrategyKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn Error>> {
    // Average of three unit quadratics; the minimizer is the center mean.
    let f = AggregateLoss::new(vec![
        Loss::quadratic(vec![1.0, -0.5], 1.0)?,
        Loss::quadratic(vec![0.5, 0.25], 1.0)?,
        Loss::quadratic(vec![0.75, 0.25], 1.0)?,
    ])?;
    let wstar = [0.75f64, 0.0];
    let radius = (wstar[0] * wstar[0] + wstar[1] * wstar[1]).sqrt();

    let epsilon = 0.05;
    let tau = 5.0 * epsilon * radius; // the smallest target the guarantee covers
    let cfg = OptimizerConfig::new(f.smoothness(), epsilon, radius).with_tau(tau);
    println!(
        "epsilon = {epsilon}, tau = {tau:.4}, iteration budget = {}",
        cfg.iteration_budget()?
    );

    let oracle = OracleStrategy::new(StrategyKind::Opposing, epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let run = agp_opt(&f, |w| Ok(oracle.reply(&f.grad(w)?, &mut rng)), &cfg)?;

    for (k, (loss, g)) in run.losses.iter().zip(&run.grad_norms).enumerate() {
        println!("k = {k:2}  loss = {loss:.6}  |reply| = {g:.6}");
    }
    println!(
        "stopped: {:?} after {} oracle calls, final w = {:?}",
        run.termination, run.oracle_calls, run.final_iterate
    );

    let gap = suboptimality_gap(&f, &run, &wstar)?;
    println!("suboptimality gap = {gap:.6} (target tau = {tau:.4})");
    assert_eq!(run.termination, Termination::EarlyStop);
    assert!(gap <= tau);
    assert!(!run.outside_guarantee);
    Ok(())
}
