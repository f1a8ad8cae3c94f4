//! Sweeps the transmission rating scale and reports how risk and the
//! multilevel speedup move as the network becomes the binding constraint.
//!
//! ```text
//! cargo run --release --example rating_sweep
//! ```

use adequacy_mlmc::estimator::Timing;
use adequacy_mlmc::experiment::{compare_runs, run_experiment, EstimatorKind, ExperimentConfig, RunOptions};

fn main() -> anyhow::Result<()> {
    let base = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/composite_mc.toml"))?;
    let options = RunOptions::default();
    for scale in [0.8, 0.9, 1.0] {
        let mut mc = base.clone();
        mc.name = format!("mc@{scale}");
        mc.rating_scale = Some(scale);
        mc.controller.runs = 2;
        mc.controller.t_star = 1.5;
        mc.controller.timing = Timing::Measured;
        let mut mlmc = mc.clone();
        mlmc.name = format!("mlmc@{scale}");
        mlmc.estimator = EstimatorKind::MlmcWithExpectation;
        mlmc.stack = vec!["hl1".into(), "hl2".into()];
        let records = [run_experiment(&mc, &options)?, run_experiment(&mlmc, &options)?];
        println!("rating scale {scale}");
        println!("{}", compare_runs(&records)?.render());
    }
    Ok(())
}
