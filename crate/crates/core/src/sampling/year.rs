use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SamplingError, StreamRng};
use crate::estimator::{Model, ModelFailure};

pub const HOURS_PER_YEAR: usize = 8760;

/// Two-state thermal unit with exponential up and down times, stepped hourly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionalUnit {
    /// Integer MW so that capacity outage tables are exact at 1 MW.
    pub capacity: u32,
    /// Mean time to failure, hours.
    pub mttf: f64,
    /// Mean time to repair, hours. May be infinite.
    pub mttr: f64,
}

impl ConventionalUnit {
    pub fn validate(&self) -> Result<(), SamplingError> {
        if !(self.mttf > 0.0 && self.mttf.is_finite()) || !(self.mttr > 0.0) {
            return Err(SamplingError::InvalidUnit(format!(
                "unit needs finite MTTF > 0 and MTTR > 0 (got {} / {})",
                self.mttf, self.mttr
            )));
        }
        Ok(())
    }

    /// Per-hour probability of failing while up.
    pub fn p_fail(&self) -> f64 {
        1.0 - (-1.0 / self.mttf).exp()
    }

    /// Per-hour probability of repair while down.
    pub fn p_repair(&self) -> f64 {
        1.0 - (-1.0 / self.mttr).exp()
    }

    /// Stationary probability of the hourly chain being up.
    pub fn availability(&self) -> f64 {
        let (f, r) = (self.p_fail(), self.p_repair());
        r / (f + r)
    }
}

/// Library of equal-length annual traces, one per historical or synthetic year.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLibrary {
    pub ids: Vec<String>,
    pub years: Vec<Arc<[f64]>>,
}

impl TraceLibrary {
    pub fn new(ids: Vec<String>, years: Vec<Vec<f64>>) -> Result<Self, SamplingError> {
        if years.is_empty() || ids.len() != years.len() {
            return Err(SamplingError::EmptyLibrary);
        }
        for (id, y) in ids.iter().zip(&years) {
            if y.len() != HOURS_PER_YEAR {
                return Err(SamplingError::TraceLength { id: id.clone(), expected: HOURS_PER_YEAR, got: y.len() });
            }
            if y.iter().any(|v| !(*v >= 0.0)) {
                return Err(SamplingError::Format(format!("year {id} has negative or non-finite values")));
            }
        }
        Ok(Self { ids, years: years.into_iter().map(Arc::from).collect() })
    }

    /// Reads a CSV with one column per year (header row holds the year ids).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self, SamplingError> {
        let path = path.as_ref();
        let io = |e: csv::Error| SamplingError::Io(format!("{}: {e}", path.display()));
        let mut reader = csv::Reader::from_path(path).map_err(io)?;
        let ids: Vec<String> = reader.headers().map_err(io)?.iter().map(str::to_owned).collect();
        let mut years = vec![Vec::with_capacity(HOURS_PER_YEAR); ids.len()];
        for record in reader.records() {
            let record = record.map_err(io)?;
            for (col, field) in years.iter_mut().zip(record.iter()) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| SamplingError::Format(format!("{}: bad number {field:?}", path.display())))?;
                col.push(v);
            }
        }
        Self::new(ids, years)
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }
}

/// One sampled year of the storage study.
#[derive(Debug, Clone, PartialEq)]
pub struct YearState {
    pub demand: Arc<[f64]>,
    pub wind: Arc<[f64]>,
    /// Available conventional capacity, MW.
    pub conventional: Vec<f64>,
    pub demand_year: usize,
    pub wind_year: usize,
}

/// Draws a number of additional hours spent in the current state before the
/// chain leaves it, for per-hour exit probability `p`.
fn geometric(p: f64, rng: &mut StreamRng) -> u64 {
    if p <= 0.0 {
        return u64::MAX;
    }
    if p >= 1.0 {
        return 0;
    }
    let u = 1.0 - rng.random::<f64>();
    let k = (u.ln() / (-p).ln_1p()).floor();
    if k >= u64::MAX as f64 { u64::MAX } else { k as u64 }
}

/// Adds `unit.capacity` to `out[t]` for every hour the unit is up, starting
/// from the given state at hour 0.
pub fn add_unit_trace(unit: &ConventionalUnit, initially_up: bool, rng: &mut StreamRng, out: &mut [f64]) {
    let hours = out.len() as u64;
    let (pf, pr) = (unit.p_fail(), unit.p_repair());
    let cap = f64::from(unit.capacity);
    let mut t = 0u64;
    let mut up = initially_up;
    while t < hours {
        let stay = geometric(if up { pf } else { pr }, rng);
        let end = t.saturating_add(stay).saturating_add(1).min(hours);
        if up {
            for v in &mut out[t as usize..end as usize] {
                *v += cap;
            }
        }
        t = end;
        up = !up;
    }
}

/// Demand and wind years are drawn independently and uniformly (with
/// replacement); each conventional unit follows its hourly chain started from
/// the stationary distribution.
pub fn sample_year_state(
    portfolio: &[ConventionalUnit],
    demand_years: &TraceLibrary,
    wind_years: &TraceLibrary,
    rng: &mut StreamRng,
) -> Result<YearState, SamplingError> {
    if demand_years.is_empty() || wind_years.is_empty() {
        return Err(SamplingError::EmptyLibrary);
    }
    if portfolio.is_empty() {
        return Err(SamplingError::InvalidUnit("empty conventional portfolio".into()));
    }
    let demand_year = rng.random_range(0..demand_years.len());
    let wind_year = rng.random_range(0..wind_years.len());
    let mut conventional = vec![0.0; HOURS_PER_YEAR];
    for unit in portfolio {
        let up = rng.random::<f64>() < unit.availability();
        add_unit_trace(unit, up, rng, &mut conventional);
    }
    Ok(YearState {
        demand: demand_years.years[demand_year].clone(),
        wind: wind_years.years[wind_year].clone(),
        conventional,
        demand_year,
        wind_year,
    })
}

/// Evaluates two models on the identical state.
pub fn pattern2_pair<S>(
    state: &S,
    lower: &dyn Model<S>,
    upper: &dyn Model<S>,
    x_lower: &mut [f64],
    x_upper: &mut [f64],
) -> Result<(), ModelFailure> {
    lower.evaluate(state, x_lower)?;
    upper.evaluate(state, x_upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RngStream;

    fn flat_library(value: f64, n: usize) -> TraceLibrary {
        let ids = (0..n).map(|i| format!("y{i}")).collect();
        TraceLibrary::new(ids, (0..n).map(|i| vec![value + i as f64; HOURS_PER_YEAR]).collect()).unwrap()
    }

    #[test]
    fn single_years_always_chosen() {
        let d = flat_library(100.0, 1);
        let w = flat_library(5.0, 1);
        let unit = ConventionalUnit { capacity: 50, mttf: 1000.0, mttr: 50.0 };
        let streams = RngStream::new(4);
        for i in 0..20 {
            let y = sample_year_state(std::slice::from_ref(&unit), &d, &w, &mut streams.for_sample(0, i)).unwrap();
            assert_eq!((y.demand_year, y.wind_year), (0, 0));
            assert_eq!(y.demand[17], 100.0);
            assert!(y.conventional.iter().all(|g| *g == 0.0 || *g == 50.0));
        }
    }

    #[test]
    fn absorbing_failure() {
        let unit = ConventionalUnit { capacity: 80, mttf: 500.0, mttr: f64::INFINITY };
        let mut rng = RngStream::new(8).for_sample(0, 3);
        let mut trace = vec![0.0; HOURS_PER_YEAR];
        add_unit_trace(&unit, true, &mut rng, &mut trace);
        let first_down = trace.iter().position(|g| *g == 0.0).unwrap();
        assert!(first_down > 0);
        assert!(trace[..first_down].iter().all(|g| *g == 80.0));
        assert!(trace[first_down..].iter().all(|g| *g == 0.0));
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(TraceLibrary::new(vec![], vec![]).is_err());
        assert!(TraceLibrary::new(vec!["a".into()], vec![vec![1.0; 10]]).is_err());
        let d = flat_library(1.0, 1);
        let mut rng = RngStream::new(0).for_sample(0, 0);
        assert!(sample_year_state(&[], &d, &d, &mut rng).is_err());
    }

    #[test]
    fn holding_times_match_transition_probabilities() {
        // Fraction of up-to-down transitions among up hours estimates p_fail.
        let unit = ConventionalUnit { capacity: 1, mttf: 20.0, mttr: 5.0 };
        let mut fails = 0u64;
        let mut up_hours = 0u64;
        let mut up_total = 0u64;
        let mut hours = 0u64;
        let streams = RngStream::new(21);
        for i in 0..200 {
            let mut trace = vec![0.0; HOURS_PER_YEAR];
            let mut rng = streams.for_sample(0, i);
            let up = rng.random::<f64>() < unit.availability();
            add_unit_trace(&unit, up, &mut rng, &mut trace);
            for w in trace.windows(2) {
                if w[0] == 1.0 {
                    up_hours += 1;
                    if w[1] == 0.0 {
                        fails += 1;
                    }
                }
            }
            up_total += trace.iter().filter(|g| **g == 1.0).count() as u64;
            hours += HOURS_PER_YEAR as u64;
        }
        let p_hat = fails as f64 / up_hours as f64;
        let p = unit.p_fail();
        assert!((p_hat - p).abs() < 4.0 * (p * (1.0 - p) / up_hours as f64).sqrt());
        let a_hat = up_total as f64 / hours as f64;
        assert!((a_hat - unit.availability()).abs() < 0.01);
    }
}
