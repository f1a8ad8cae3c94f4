//! Budget-optimal sample counts for a three-level stack, and how far the
//! rounded counts sit from the continuous optimum.
//!
//! ```text
//! cargo run --release --example allocation
//! ```

use adequacy_mlmc::estimator::{allocate, allocation_variance, optimal_variance};

fn main() -> anyhow::Result<()> {
    let sigmas = [4.0e-2, 6.0e-3, 1.5e-3];
    let taus = [1.0e-6, 2.0e-4, 5.0e-3];
    for budget in [0.1, 1.0, 10.0, 60.0] {
        let plan = allocate(&sigmas, &taus, budget)?;
        let counts: Vec<f64> = plan.counts.iter().map(|&n| n as f64).collect();
        let cost = plan.cost(&taus);
        let v = allocation_variance(&sigmas, &counts);
        let best = optimal_variance(&sigmas, &taus, cost);
        println!("budget {budget:>5} s: counts {:?}, cost {cost:.4} s, variance {v:.3e} ({:+.2e} vs optimum)", plan.counts, v / best - 1.0);
    }
    Ok(())
}
