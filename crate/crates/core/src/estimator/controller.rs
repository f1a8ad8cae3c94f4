//! Adaptive multi-run MLMC driver.
//!
//! An exploratory run draws `n0` pairs on every sampled level. Each of the
//! following runs re-estimates per-level cost and (floored) variance of the
//! target measure and draws the budget-optimal number of new pairs. Samples
//! accumulate across runs; the final estimate uses all of them.

use std::time::Instant;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    allocate, mlmc_estimate, variance_floor, AllocationPlan, EstimatorError, LevelStats, MeasureId,
    ModelStack, PairMoments, RiskEstimate,
};
use crate::sampling::RngStream;

/// Pairs per work unit. Fixed so that merge order, and therefore every
/// accumulated moment, is independent of the worker count.
const BLOCK: u64 = 64;
/// Weight kept by earlier runs when updating cost estimates.
const TAU_DECAY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Timing {
    /// Costs come from wall-clock measurements.
    Measured,
    /// Costs are fixed seconds per pair evaluation, one per level. Makes the
    /// allocation, and therefore the whole run, reproducible bit for bit.
    Nominal { seconds_per_pair: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerSettings {
    pub n0: u64,
    pub runs: usize,
    /// Per-run budget in seconds.
    pub t_star: f64,
    pub target: MeasureId,
    pub alpha: f64,
    pub seed: u64,
    pub workers: usize,
    pub timing: Timing,
}

impl ControllerSettings {
    pub fn new(target: impl Into<MeasureId>, seed: u64) -> Self {
        Self {
            n0: 100,
            runs: 10,
            t_star: 60.0,
            target: target.into(),
            alpha: 0.1,
            seed,
            workers: 1,
            timing: Timing::Measured,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub upper_model: String,
    pub lower_model: Option<String>,
    pub n: u64,
    /// Seconds per pair.
    pub tau: f64,
    /// One entry per measure, in registration order.
    pub stats: Vec<LevelStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// 0 for the exploratory run.
    pub run: usize,
    /// New pairs per sampled level.
    pub counts: Vec<u64>,
    pub seconds: f64,
    pub over_budget: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerOutput {
    pub estimates: Vec<RiskEstimate>,
    pub levels: Vec<LevelReport>,
    pub runs: Vec<RunRecord>,
    pub analytic_level0: Option<Vec<f64>>,
    /// Seconds, including the exploratory run and any analytic level.
    pub elapsed: f64,
}

impl ControllerOutput {
    pub fn estimate(&self, measure: &MeasureId) -> Option<&RiskEstimate> {
        self.estimates.iter().find(|e| &e.measure == measure)
    }
}

struct LevelState {
    level: usize,
    next_index: u64,
    moments: Vec<PairMoments>,
    tau: f64,
    tau_weight: f64,
}

/// Executes the exploratory run followed by `runs` budgeted runs.
pub fn run_controller(
    stack: &ModelStack,
    settings: &ControllerSettings,
) -> Result<ControllerOutput, EstimatorError> {
    validate(stack, settings)?;
    let started = Instant::now();
    let target = stack
        .measures
        .index_of(&settings.target)
        .ok_or_else(|| EstimatorError::UnknownMeasure(settings.target.clone()))?;
    let streams = RngStream::new(settings.seed);
    let pool = if settings.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(settings.workers)
                .build()
                .map_err(|e| EstimatorError::InvalidSettings(e.to_string()))?,
        )
    } else {
        None
    };
    let measures = stack.measures.len();
    let mut levels: Vec<LevelState> = stack
        .sampled_levels()
        .map(|level| LevelState {
            level,
            next_index: 0,
            moments: vec![PairMoments::default(); measures],
            tau: 0.0,
            tau_weight: 0.0,
        })
        .collect();

    let mut runs = Vec::new();
    let mut modelled_time = 0.0;
    for run in 0..=settings.runs {
        if levels.is_empty() {
            break;
        }
        let (counts, over_budget) = if run == 0 {
            (vec![settings.n0; levels.len()], false)
        } else {
            let plan = plan_run(&levels, settings, target)?;
            (plan.counts, plan.over_budget)
        };
        if over_budget {
            warn!("run {run}: one pair per level exceeds the {} s budget", settings.t_star);
        }
        let mut run_seconds = 0.0;
        for (state, &count) in levels.iter_mut().zip(&counts) {
            let (moments, seconds) =
                sample_level(stack, &streams, pool.as_ref(), state.level, state.next_index, count, measures)?;
            let seconds = match &settings.timing {
                Timing::Measured => seconds,
                Timing::Nominal { seconds_per_pair } => seconds_per_pair[state.level] * count as f64,
            };
            for (acc, m) in state.moments.iter_mut().zip(&moments) {
                acc.merge(m);
            }
            state.next_index += count;
            if count > 0 {
                let run_tau = (seconds / count as f64).max(1e-12);
                let w_old = state.tau_weight * TAU_DECAY;
                state.tau = (w_old * state.tau + count as f64 * run_tau) / (w_old + count as f64);
                state.tau_weight = w_old + count as f64;
            }
            run_seconds += seconds;
        }
        debug!("run {run}: counts {counts:?}, {run_seconds:.3} s");
        modelled_time += run_seconds;
        runs.push(RunRecord { run, counts, seconds: run_seconds, over_budget });
    }

    let names = stack.sampler.model_names();
    let analytic = stack.analytic_level0.as_ref();
    let elapsed = match &settings.timing {
        Timing::Measured => started.elapsed().as_secs_f64() + analytic.map_or(0.0, |a| a.seconds),
        Timing::Nominal { .. } => modelled_time,
    };

    let level_reports: Vec<LevelReport> = levels
        .iter()
        .map(|s| LevelReport {
            level: s.level,
            upper_model: names[s.level].clone(),
            lower_model: (s.level > 0).then(|| names[s.level - 1].clone()),
            n: s.next_index,
            tau: s.tau,
            stats: s.moments.iter().map(|m| LevelStats::from_moments(s.level, m, s.tau)).collect(),
        })
        .collect();

    let mut estimates = Vec::with_capacity(measures);
    for (k, id) in stack.measures.ids().iter().enumerate() {
        let stats: Vec<LevelStats> = level_reports.iter().map(|l| l.stats[k].clone()).collect();
        let r0 = analytic.map(|a| a.values[k]);
        estimates.push(mlmc_estimate(id.clone(), &stats, r0)?.with_elapsed(elapsed));
    }

    Ok(ControllerOutput {
        estimates,
        levels: level_reports,
        runs,
        analytic_level0: analytic.map(|a| a.values.clone()),
        elapsed,
    })
}

fn validate(stack: &ModelStack, s: &ControllerSettings) -> Result<(), EstimatorError> {
    let bad = |m: String| Err(EstimatorError::InvalidSettings(m));
    if stack.num_levels() == 0 {
        return bad("model stack has no levels".into());
    }
    if s.n0 < 2 {
        return bad(format!("n0 must be at least 2, got {}", s.n0));
    }
    if !(s.t_star > 0.0) {
        return bad(format!("t_star must be positive, got {}", s.t_star));
    }
    if !(s.alpha > 0.0 && s.alpha <= 1.0) {
        return bad(format!("alpha must lie in (0, 1], got {}", s.alpha));
    }
    if s.workers == 0 {
        return bad("workers must be at least 1".into());
    }
    if let Some(a) = &stack.analytic_level0 {
        if a.values.len() != stack.measures.len() {
            return bad("analytic level-0 values do not match the measure count".into());
        }
    }
    if let Timing::Nominal { seconds_per_pair } = &s.timing {
        if seconds_per_pair.len() != stack.num_levels() || seconds_per_pair.iter().any(|t| !(*t > 0.0)) {
            return bad("nominal timing needs one positive cost per level".into());
        }
    }
    Ok(())
}

fn plan_run(
    levels: &[LevelState],
    settings: &ControllerSettings,
    target: usize,
) -> Result<AllocationPlan, EstimatorError> {
    let stats: Vec<LevelStats> = levels
        .iter()
        .map(|s| LevelStats::from_moments(s.level, &s.moments[target], s.tau))
        .collect();
    let sigmas: Vec<f64> = variance_floor(&stats, settings.alpha).iter().map(|v| v.sqrt()).collect();
    let taus: Vec<f64> = levels.iter().map(|s| s.tau).collect();
    let budget = settings.t_star * settings.workers as f64;
    match allocate(&sigmas, &taus, budget) {
        Ok(mut plan) => {
            plan.target_measure = Some(settings.target.clone());
            Ok(plan)
        }
        Err(EstimatorError::ZeroVariance) => {
            // Nothing observed on the target yet: spread the budget by cost alone.
            let ones = vec![1.0; levels.len()];
            let mut plan = allocate(&ones, &taus, budget)?;
            plan.target_measure = Some(settings.target.clone());
            Ok(plan)
        }
        Err(e) => Err(e),
    }
}

fn sample_level(
    stack: &ModelStack,
    streams: &RngStream,
    pool: Option<&rayon::ThreadPool>,
    level: usize,
    start: u64,
    count: u64,
    measures: usize,
) -> Result<(Vec<PairMoments>, f64), EstimatorError> {
    let blocks = count.div_ceil(BLOCK);
    let block = |b: u64| -> Result<(Vec<PairMoments>, f64), EstimatorError> {
        let from = start + b * BLOCK;
        let to = (from + BLOCK).min(start + count);
        let mut acc = vec![PairMoments::default(); measures];
        let mut upper = vec![0.0; measures];
        let mut lower = vec![0.0; measures];
        let t0 = Instant::now();
        for index in from..to {
            let mut rng = streams.for_sample(level, index);
            stack
                .sampler
                .sample_pair(level, &mut rng, &mut upper, &mut lower)
                .map_err(|e| EstimatorError::ModelFailure { level, sample_index: index, message: e.0 })?;
            for ((m, &u), &l) in acc.iter_mut().zip(&upper).zip(&lower) {
                m.push(u, l);
            }
        }
        Ok((acc, t0.elapsed().as_secs_f64()))
    };
    let results: Vec<Result<(Vec<PairMoments>, f64), EstimatorError>> = match pool {
        Some(pool) => pool.install(|| (0..blocks).into_par_iter().map(block).collect()),
        None => (0..blocks).map(block).collect(),
    };
    let mut total = vec![PairMoments::default(); measures];
    let mut seconds = 0.0;
    for r in results {
        let (acc, s) = r?;
        for (t, a) in total.iter_mut().zip(&acc) {
            t.merge(a);
        }
        seconds += s;
    }
    Ok((total, seconds))
}
