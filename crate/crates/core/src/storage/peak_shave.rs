use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::StorageError;
use crate::sampling::TraceLibrary;
use crate::solvers::{solve_qp, BoxQp, LinearRow, QpStatus};

pub const HOURS_PER_DAY: usize = 24;

/// Daily storage pattern that flattens the mean demand profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakShaveProfile {
    /// MW per hour of day, consumption positive.
    pub dispatch: Vec<f64>,
    /// Stored energy at the start of each hour of day, MWh.
    pub energy: Vec<f64>,
    /// `sum_h (demand_h + dispatch_h)^2`.
    pub objective: f64,
    pub kkt_residual: f64,
}

/// Mean demand by hour of day over every day of every year.
pub fn mean_daily_profile(demand: &TraceLibrary) -> Vec<f64> {
    let mut sum = vec![0.0; HOURS_PER_DAY];
    let mut count = 0usize;
    for year in &demand.years {
        for day in year.chunks_exact(HOURS_PER_DAY) {
            for (s, d) in sum.iter_mut().zip(day) {
                *s += d;
            }
            count += 1;
        }
    }
    sum.iter().map(|s| s / count as f64).collect()
}

/// Minimises `sum_h (d_h + s_h)^2` over a cyclic day for one storage unit with
/// power rating `p_total` and energy rating `e_total`.
///
/// The stored energy is eliminated: with `P_h = s_0 + .. + s_{h-1}`, a valid
/// energy path `e_h = e_0 + P_h` within `[0, e_total]` exists iff every
/// partial sum over a contiguous window of hours lies in `[-e_total, e_total]`
/// and the daily sum is zero (which also closes the cycle). The remaining
/// problem is strictly convex in the 24 dispatch variables.
pub fn peak_shave_profile(mean_demand: &[f64], p_total: f64, e_total: f64) -> Result<PeakShaveProfile, StorageError> {
    let n = mean_demand.len();
    if n != HOURS_PER_DAY {
        return Err(StorageError::Length { expected: HOURS_PER_DAY, got: n });
    }
    if !(p_total > 0.0) || !(e_total > 0.0) {
        return Err(StorageError::Invalid(format!("fleet ratings must be positive (got {p_total} MW, {e_total} MWh)")));
    }
    let mut qp = BoxQp::new(DMatrix::identity(n, n) * 2.0, mean_demand.iter().map(|d| 2.0 * d).collect());
    qp.lower = vec![-p_total; n];
    qp.upper = vec![p_total; n];
    qp.equalities.push((vec![1.0; n], 0.0));
    for a in 0..n {
        for b in a + 1..n {
            let mut coeffs = vec![0.0; n];
            for c in &mut coeffs[a..b] {
                *c = 1.0;
            }
            qp.inequalities.push(LinearRow { coeffs, lower: -e_total, upper: e_total });
        }
    }
    let sol = solve_qp(&qp)?;
    if sol.status != QpStatus::Optimal {
        return Err(StorageError::Invalid("peak-shaving program reported infeasible".into()));
    }
    let dispatch = sol.x;
    let mut partial = Vec::with_capacity(n);
    let mut acc = 0.0;
    for s in &dispatch {
        partial.push(acc);
        acc += s;
    }
    let start = -partial.iter().copied().fold(f64::INFINITY, f64::min);
    let energy: Vec<f64> = partial.iter().map(|p| start + p).collect();
    let objective = mean_demand.iter().zip(&dispatch).map(|(d, s)| (d + s).powi(2)).sum();
    Ok(PeakShaveProfile { dispatch, energy, objective, kkt_residual: sol.kkt_residual })
}
