//! How many uniform draws does a mean need?
//!
//! `required_m(b, t, delta)` sizes a with-replacement sample so the sample
//! mean of n bounded vectors lands within t of the true mean with
//! probability at least 1 - delta. The bound is distribution-free, so the
//! empirical failure rate usually sits far below delta.
//!
//! ```sh
//! cargo run --example center_estimation
//! ```

use std::error::Error;

use dlagp::estimation::{required_m, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn Error>> {
    let b = 1.0;
    println!("sample sizes for vectors of norm <= {b}:");
    for (t, delta) in [(0.5, 0.05), (0.3, 0.05), (0.1, 0.05), (0.3, 0.2)] {
        println!(
            "  within {t} with probability {:.0}%:  m = {}",
            (1.0 - delta) * 100.0,
            required_m(b, t, delta)?
        );
    }

    // Monte Carlo check of one row of the table.
    let (t, delta) = (0.3, 0.05);
    let m = required_m(b, t, delta)?;
    let d = 4;
    let half = b / (d as f64).sqrt();
    let mut gen = ChaCha8Rng::seed_from_u64(271828);
    let points: Vec<Vec<f64>> = (0..60)
        .map(|_| (0..d).map(|_| gen.random_range(-half..half)).collect())
        .collect();
    let set = PointSet::new(points, b)?;
    let center = set.center();

    let trials = 500;
    let mut failures = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let est = set.sampled_center(m, &mut rng)?;
        let err: f64 = est
            .iter()
            .zip(&center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt();
        if err > t {
            failures += 1;
        }
    }
    let empirical = failures as f64 / trials as f64;
    println!(
        "m = {m}: missed by more than {t} in {failures}/{trials} trials \
         (empirical {empirical:.4}, certified {delta})"
    );
    assert!(empirical <= delta);
    Ok(())
}
