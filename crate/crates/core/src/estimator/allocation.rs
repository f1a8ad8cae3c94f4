use serde::{Deserialize, Serialize};

use super::{EstimatorError, LevelStats, MeasureId};

/// Per-level sample counts for one budgeted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    /// Seconds.
    pub budget: f64,
    pub counts: Vec<u64>,
    pub target_measure: Option<MeasureId>,
    /// Set when the one-sample-per-level floor alone exceeds the budget.
    pub over_budget: bool,
}

impl AllocationPlan {
    pub fn cost(&self, taus: &[f64]) -> f64 {
        self.counts.iter().zip(taus).map(|(&n, t)| n as f64 * t).sum()
    }
}

/// Variance floor against undersampling of rare-event levels.
///
/// `sigma_x^2` is the largest outcome variance seen on any sampled level; the
/// adjusted level variance is `max(var_y, alpha^level * sigma_x^2)`.
pub fn variance_floor(stats: &[LevelStats], alpha: f64) -> Vec<f64> {
    let sigma2_x = stats
        .iter()
        .flat_map(|s| [s.var_x_upper, s.var_x_lower])
        .fold(0.0, f64::max);
    stats
        .iter()
        .map(|s| s.var_y.max(alpha.powi(s.level as i32) * sigma2_x))
        .collect()
}

/// Budget-optimal sample counts `n_l ∝ sigma_l / sqrt(tau_l)` with
/// `sum n_l tau_l = budget`.
///
/// Levels with zero standard deviation receive one sample, paid for out of
/// the budget before the rest is distributed. Counts are rounded half-up and
/// clamped to at least one.
pub fn allocate(sigmas: &[f64], taus: &[f64], budget: f64) -> Result<AllocationPlan, EstimatorError> {
    if sigmas.len() != taus.len() || sigmas.is_empty() {
        return Err(EstimatorError::Allocation("need one sigma and tau per level".into()));
    }
    if !(budget > 0.0) {
        return Err(EstimatorError::Allocation(format!("budget must be positive, got {budget}")));
    }
    if taus.iter().any(|t| !(*t > 0.0)) || sigmas.iter().any(|s| !(*s >= 0.0)) {
        return Err(EstimatorError::Allocation("tau must be positive and sigma non-negative".into()));
    }
    if sigmas.iter().all(|&s| s == 0.0) {
        return Err(EstimatorError::ZeroVariance);
    }
    let floor_cost: f64 = sigmas.iter().zip(taus).filter(|(s, _)| **s == 0.0).map(|(_, t)| t).sum();
    let min_cost: f64 = taus.iter().sum();
    let remaining = budget - floor_cost;
    let mut counts = vec![1u64; sigmas.len()];
    if remaining <= 0.0 || min_cost > budget {
        return Ok(AllocationPlan { budget, counts, target_measure: None, over_budget: true });
    }
    let norm: f64 = sigmas.iter().zip(taus).map(|(s, t)| s * t.sqrt()).sum();
    for (c, (s, t)) in counts.iter_mut().zip(sigmas.iter().zip(taus)) {
        if *s > 0.0 {
            let n_star = remaining / norm * s / t.sqrt();
            *c = ((n_star + 0.5).floor() as u64).max(1);
        }
    }
    Ok(AllocationPlan { budget, counts, target_measure: None, over_budget: false })
}

/// [`allocate`] on the raw `var_y` and `tau` of each level.
pub fn optimal_allocation(stats: &[LevelStats], budget: f64) -> Result<AllocationPlan, EstimatorError> {
    let sigmas: Vec<f64> = stats.iter().map(|s| s.var_y.sqrt()).collect();
    let taus: Vec<f64> = stats.iter().map(|s| s.tau).collect();
    allocate(&sigmas, &taus, budget)
}

/// `sum sigma_l^2 / n_l`.
pub fn allocation_variance(sigmas: &[f64], counts: &[f64]) -> f64 {
    sigmas.iter().zip(counts).map(|(s, n)| s * s / n).sum()
}

/// Optimal variance for a given cost: `(sum sigma_l sqrt(tau_l))^2 / t`.
pub fn optimal_variance(sigmas: &[f64], taus: &[f64], cost: f64) -> f64 {
    let s: f64 = sigmas.iter().zip(taus).map(|(s, t)| s * t.sqrt()).sum();
    s * s / cost
}
