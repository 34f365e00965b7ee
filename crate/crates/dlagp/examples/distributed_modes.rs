//! The three ways a server can query a client pool.
//!
//! Full mode asks every client each round; sampled mode asks a derived
//! number m of uniformly drawn clients so the whole run still succeeds with
//! probability 1 - delta; budget mode splits a fixed query allowance evenly
//! across the scheduled rounds.
//!
//! ```sh
//! cargo run --example distributed_modes
//! ```

use std::error::Error;

use dlagp::distributed::{run_dlagp, ClientPool, DlagpMode};
use dlagp::losses::Loss;
use dlagp::optimizer::TraceMode;
use dlagp::oracle::StrategyKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pool(epsilon: f64) -> Result<ClientPool, dlagp::Error> {
    let mut gen = ChaCha8Rng::seed_from_u64(17);
    let losses: Vec<Loss> = (0..40)
        .map(|_| {
            let c = vec![
                0.3 + 0.2 * gen.random_range(-1.0..1.0),
                0.2 * gen.random_range(-1.0..1.0),
            ];
            Loss::quadratic(c, 1.0)
        })
        .collect::<Result<_, _>>()?;
    // Every client perturbs its replies; RandomMix picks a different legal
    // distortion on every call.
    ClientPool::uniform(losses, StrategyKind::RandomMix, epsilon, 99)
}

fn main() -> Result<(), Box<dyn Error>> {
    let radius = 0.5;

    // Full mode: small perturbation, tight target.
    let mut p = pool(0.01)?;
    let full = run_dlagp(&mut p, 0.05, radius, DlagpMode::Full, TraceMode::Summary)?;
    println!(
        "full:    {} rounds x {} clients = {} queries, final loss {:.6}",
        full.iterations,
        full.per_call,
        full.queries_used,
        full.run.losses.last().unwrap()
    );
    assert_eq!(full.queries_used, (full.iterations * full.per_call) as u64);

    // Sampled mode: the target must clear the 5.01*eps*R regime floor, and
    // the derived m grows as the slack above it shrinks.
    let epsilon = 2.0;
    let tau = 5.5 * epsilon * radius;
    let mut p = pool(epsilon)?;
    let sampled = run_dlagp(
        &mut p,
        tau,
        radius,
        DlagpMode::Sampled { delta: 0.1 },
        TraceMode::Summary,
    )?;
    let sc = sampled.sampled.as_ref().unwrap();
    println!(
        "sampled: {} rounds x m = {} draws = {} queries (t = {:.3}, B = {:.3}), final loss {:.6}",
        sampled.iterations,
        sc.m,
        sampled.queries_used,
        sc.t,
        sc.b,
        sampled.run.losses.last().unwrap()
    );

    // Budget mode: a hard cap of Q total queries, split as m = Q / K.
    let mut p = pool(0.01)?;
    let budget = run_dlagp(
        &mut p,
        0.05,
        radius,
        DlagpMode::Budget { q: 500 },
        TraceMode::Summary,
    )?;
    println!(
        "budget:  {} rounds x m = {} draws = {} queries (cap 500), final loss {:.6}",
        budget.iterations,
        budget.per_call,
        budget.queries_used,
        budget.run.losses.last().unwrap()
    );
    assert!(budget.queries_used <= 500);
    Ok(())
}
