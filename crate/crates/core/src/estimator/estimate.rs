use serde::{Deserialize, Serialize};

use super::{EstimatorError, LevelStats, MeasureId, PairMoments};

/// Point estimate and estimator variance for one risk measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub measure: MeasureId,
    pub q_hat: f64,
    /// `None` when fewer than two samples were available on some sampled level.
    pub var_q_hat: Option<f64>,
    pub n_total: u64,
    /// Seconds.
    pub elapsed: f64,
}

impl RiskEstimate {
    pub fn std_error(&self) -> Option<f64> {
        self.var_q_hat.map(f64::sqrt)
    }

    /// Computational speed `q^2 / (t var)`, see [`speed_metric`].
    pub fn speed(&self) -> Result<f64, EstimatorError> {
        let var = self.var_q_hat.ok_or(EstimatorError::VarianceUnavailable)?;
        speed_metric(self.q_hat, var, self.elapsed)
    }

    pub fn with_elapsed(mut self, elapsed: f64) -> Self {
        self.elapsed = elapsed;
        self
    }
}

/// Conventional Monte Carlo estimate: sample mean and `s^2 / n`.
pub fn mc_estimate(
    measure: impl Into<MeasureId>,
    values: &[f64],
    elapsed: f64,
) -> Result<RiskEstimate, EstimatorError> {
    if values.is_empty() {
        return Err(EstimatorError::UndefinedEstimate);
    }
    let mut m = PairMoments::default();
    for &v in values {
        m.push(v, 0.0);
    }
    let n = values.len() as u64;
    Ok(RiskEstimate {
        measure: measure.into(),
        q_hat: m.mean_upper,
        var_q_hat: (n >= 2).then(|| m.var_upper() / n as f64),
        n_total: n,
        elapsed,
    })
}

/// Multilevel estimate: sum of level contributions, plus an exact level-0
/// expectation when one is supplied. `stats` must cover the sampled levels
/// contiguously, starting at 1 when `analytic_r0` is present and 0 otherwise.
///
/// The elapsed time is the modelled cost `sum n_l tau_l`; callers that
/// measure wall-clock time override it.
pub fn mlmc_estimate(
    measure: impl Into<MeasureId>,
    stats: &[LevelStats],
    analytic_r0: Option<f64>,
) -> Result<RiskEstimate, EstimatorError> {
    let first = usize::from(analytic_r0.is_some());
    for (k, s) in stats.iter().enumerate() {
        if s.level != first + k {
            return Err(EstimatorError::MissingLevel(first + k));
        }
    }
    if stats.is_empty() && analytic_r0.is_none() {
        return Err(EstimatorError::UndefinedEstimate);
    }
    let mut q = analytic_r0.unwrap_or(0.0);
    let mut var = Some(0.0);
    let mut n_total = 0;
    let mut cost = 0.0;
    for s in stats {
        if s.n == 0 {
            return Err(EstimatorError::MissingLevel(s.level));
        }
        q += s.mean_y;
        var = match var {
            Some(v) if s.has_variance() => Some(v + s.var_y / s.n as f64),
            _ => None,
        };
        n_total += s.n;
        cost += s.n as f64 * s.tau;
    }
    Ok(RiskEstimate {
        measure: measure.into(),
        q_hat: q,
        var_q_hat: var,
        n_total,
        elapsed: cost,
    })
}

/// `z = q^2 / (t var)`, in 1/s.
pub fn speed_metric(q_hat: f64, var_q_hat: f64, elapsed: f64) -> Result<f64, EstimatorError> {
    if q_hat == 0.0 {
        return Err(EstimatorError::UndefinedSpeed("estimate is zero"));
    }
    if !(elapsed > 0.0) {
        return Err(EstimatorError::UndefinedSpeed("elapsed time is not positive"));
    }
    if !(var_q_hat > 0.0) {
        return Err(EstimatorError::UndefinedSpeed("estimator variance is not positive"));
    }
    Ok(q_hat * q_hat / (elapsed * var_q_hat))
}

/// Run time needed to reach coefficient of variation `cv` at speed `z`.
pub fn required_time(z: f64, cv: f64) -> f64 {
    1.0 / (cv * cv * z)
}

/// Speed ratio `z(candidate) / z(baseline)`.
pub fn speedup(baseline: &RiskEstimate, candidate: &RiskEstimate) -> Result<f64, EstimatorError> {
    Ok(candidate.speed()? / baseline.speed()?)
}
