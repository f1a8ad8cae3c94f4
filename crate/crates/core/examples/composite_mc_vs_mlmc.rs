//! Plain Monte Carlo on the network model against the two-level estimator
//! whose bottom level is the exact single-node convolution, at equal budget.
//!
//! ```text
//! cargo run --release --example composite_mc_vs_mlmc -- [seconds per run]
//! ```

use adequacy_mlmc::estimator::Timing;
use adequacy_mlmc::experiment::{compare_runs, run_experiment, EstimatorKind, ExperimentConfig, RunOptions};

fn main() -> anyhow::Result<()> {
    let t_star: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2.0);
    let base = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/composite_mc.toml"))?;

    let mut mc = base.clone();
    mc.name = "mc".into();
    mc.controller.runs = 3;
    mc.controller.t_star = t_star;
    mc.controller.timing = Timing::Measured;

    let mut mlmc = mc.clone();
    mlmc.name = "mlmc".into();
    mlmc.estimator = EstimatorKind::MlmcWithExpectation;
    mlmc.stack = vec!["hl1".into(), "hl2".into()];

    let options = RunOptions::default();
    let records = [run_experiment(&mc, &options)?, run_experiment(&mlmc, &options)?];
    for r in &records {
        println!("{}", r.report());
    }
    print!("{}", compare_runs(&records)?.render());
    Ok(())
}
