//! The dense LP and QP solvers on small problems, and the daily peak-shaving
//! pattern they produce for the storage fleet.
//!
//! ```text
//! cargo run --release --example solvers
//! ```

use nalgebra::DMatrix;

use adequacy_mlmc::experiment::default_data_dir;
use adequacy_mlmc::solvers::{solve_lp, solve_qp, BoundedLp, BoxQp, LinearRow};
use adequacy_mlmc::storage::{mean_daily_profile, peak_shave_profile, StorageSystem};

fn main() -> anyhow::Result<()> {
    // Two generators (cost 1 and 3, 60 MW each) serving 90 MW.
    let mut lp = BoundedLp::new(vec![1.0, 3.0]).with_bounds(0, 0.0, 60.0).with_bounds(1, 0.0, 60.0);
    lp.add_equality(vec![1.0, 1.0], 90.0);
    let s = solve_lp(&lp)?;
    println!("economic dispatch: {:?} at cost {} (residual {:.1e})", s.x, s.objective, s.primal_residual);

    // Least squares towards (2, 1) inside x + y <= 2, x, y >= 0.
    let mut qp = BoxQp::new(DMatrix::identity(2, 2) * 2.0, vec![-4.0, -2.0]);
    qp.lower = vec![0.0; 2];
    qp.inequalities.push(LinearRow { coeffs: vec![1.0, 1.0], lower: f64::NEG_INFINITY, upper: 2.0 });
    let s = solve_qp(&qp)?;
    println!("projection: {:?} (kkt residual {:.1e})", s.x, s.kkt_residual);

    let system = StorageSystem::load(default_data_dir().join("storage/system.toml"))?;
    let demand = mean_daily_profile(&system.demand);
    let p = peak_shave_profile(&demand, system.fleet_power(), system.fleet_energy())?;
    println!("\nhour  mean demand  dispatch  stored energy");
    for h in 0..p.dispatch.len() {
        println!("{h:>4}  {:>11.1}  {:>8.1}  {:>13.1}", demand[h], p.dispatch[h], p.energy[h]);
    }
    Ok(())
}
