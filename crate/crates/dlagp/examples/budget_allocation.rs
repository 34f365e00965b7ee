//! Final loss as a function of the total query allowance.
//!
//! Budget mode splits Q queries evenly over the scheduled rounds, so small
//! budgets mean few clients per round and a noisier aggregate reply. The
//! sweep records a min/max band over repeated seeds for every budget plus
//! one exact full-information baseline.
//!
//! ```sh
//! cargo run --example budget_allocation
//! ```

use std::error::Error;

use dlagp::experiment::{run_budget_sweep, BudgetSweepConfig, DataSource};
use dlagp::losses::LossKind;

fn main() -> Result<(), Box<dyn Error>> {
    let mut cfg = BudgetSweepConfig::new(
        DataSource::Synthetic {
            n: 60,
            d: 4,
            seed: 1,
            separable: false,
        },
        LossKind::BinaryCrossEntropy,
        0.1,
    );
    cfg.epsilon = 0.02;
    cfg.qs = vec![5, 40, 160, 640, 2560];
    cfg.seeds = (0..8).collect();
    let rows = run_budget_sweep(&cfg)?;

    println!("      Q   runs  skipped     band of final losses");
    for q in &cfg.qs {
        let finals: Vec<f64> = rows
            .iter()
            .filter(|r| r.strategy == "random-mix" && r.q == Some(*q))
            .map(|r| r.loss)
            .collect();
        let skipped = rows
            .iter()
            .filter(|r| r.strategy == "skipped" && r.q == Some(*q))
            .count();
        let lo = rows
            .iter()
            .find(|r| r.strategy == "band-min" && r.q == Some(*q))
            .map(|r| r.loss);
        let hi = rows
            .iter()
            .find(|r| r.strategy == "band-max" && r.q == Some(*q))
            .map(|r| r.loss);
        match (lo, hi) {
            (Some(lo), Some(hi)) => println!(
                "  {q:5}  {:5}  {skipped:7}     [{lo:.5}, {hi:.5}]",
                finals.len()
            ),
            _ => println!("  {q:5}  {:5}  {skipped:7}     (below one query per round)", finals.len()),
        }
    }

    let reference = rows
        .iter()
        .find(|r| r.strategy == "reference-exact")
        .expect("baseline row");
    println!(
        "  exact full-information baseline: {:.5} ({} queries)",
        reference.loss, reference.queries
    );

    // Wider budgets can only help: the band floor is monotone down to the
    // baseline's neighborhood.
    let floors: Vec<f64> = cfg
        .qs
        .iter()
        .filter_map(|q| {
            rows.iter()
                .find(|r| r.strategy == "band-min" && r.q == Some(*q))
                .map(|r| r.loss)
        })
        .collect();
    assert!(floors.windows(2).all(|w| w[1] <= w[0] + 0.05));
    Ok(())
}
