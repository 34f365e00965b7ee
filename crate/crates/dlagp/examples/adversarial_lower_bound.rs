//! Why epsilon*R/2 error is unavoidable, shown two ways.
//!
//! First: a pair of one-dimensional instances whose gradients never exceed
//! epsilon, so an oracle replying zero everywhere is legal for both at once.
//! Any output is epsilon*R/2 wrong on at least one of them.
//!
//! Second: a retroactive adversary that answers every query with the same
//! constant and only afterwards commits to an instance on which all its
//! answers were exact gradients, yet the solver's output is 3*tau wrong.
//!
//! ```sh
//! cargo run --example adversarial_lower_bound
//! ```

use std::error::Error;

use dlagp::optimizer::{agp_opt, OptimizerConfig};
use dlagp::oracle::{DeferredAdversary, HardInstance1d};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn Error>> {
    let (radius, ell, epsilon) = (1.0, 1.0, 0.5);

    //
    // Part 1: the indistinguishable pair.
    //
    let rising = HardInstance1d::ascending(radius, ell, epsilon)?;
    let falling = HardInstance1d::descending(radius, ell, epsilon)?;
    println!(
        "minimizers: {} and {}, gradients bounded by epsilon = {epsilon}",
        rising.minimizer(),
        falling.minimizer()
    );

    // The all-zero reply is legal for BOTH instances at every point, so the
    // solver cannot tell which one it is facing.
    let cfg = OptimizerConfig::new(ell, epsilon, radius).with_tau(epsilon * radius);
    let run = agp_opt(&rising.as_objective(), |_w| Ok(vec![0.0]), &cfg)?;
    let w_out = run.final_iterate[0];
    let gap_rising = rising.eval(w_out) - rising.eval(rising.minimizer());
    let gap_falling = falling.eval(w_out) - falling.eval(falling.minimizer());
    println!(
        "zero replies stop at w = {w_out}; gaps = ({gap_rising:.4}, {gap_falling:.4}), \
         floor = {:.4}",
        epsilon * radius / 2.0
    );
    assert!(gap_rising.max(gap_falling) >= epsilon * radius / 2.0 - 1e-12);

    //
    // Part 2: the retroactive adversary.
    //
    let tau = 0.5;
    let adversary = DeferredAdversary::new(tau, ell)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let queries: Vec<f64> = (0..12).map(|_| rng.random_range(-5.0..5.0)).collect();
    let w_out = rng.random_range(-5.0..5.0);

    // Only after seeing the whole transcript does it pick the instance.
    let instance = adversary.finalize(&queries, w_out);
    for q in &queries {
        // Bitwise equality: the constant replies were exact gradients.
        assert_eq!(instance.grad(*q), adversary.reply());
    }
    println!(
        "all {} replies of {} were exact on the committed instance; f(w_out) = {:.4} >= 3*tau = {:.4}",
        queries.len(),
        adversary.reply(),
        instance.eval(w_out),
        3.0 * tau
    );
    assert!(instance.eval(w_out) >= 3.0 * tau);
    Ok(())
}
