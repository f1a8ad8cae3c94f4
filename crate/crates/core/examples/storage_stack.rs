//! Three-model storage stack: fixed daily pattern (convolved exactly), greedy
//! dispatch and fleet-coordinated dispatch. Prints the per-level breakdown.
//!
//! ```text
//! cargo run --release --example storage_stack -- [seconds per run]
//! ```

use adequacy_mlmc::experiment::{run_experiment, ExperimentConfig, RunOptions};

fn main() -> anyhow::Result<()> {
    let t_star: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3.0);
    let mut cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/storage_mlmc.toml"))?;
    cfg.controller.runs = 2;
    cfg.controller.t_star = t_star;
    let record = run_experiment(&cfg, &RunOptions::default())?;
    println!("{}", record.report());
    print!("{}", record.levels_csv());
    Ok(())
}
