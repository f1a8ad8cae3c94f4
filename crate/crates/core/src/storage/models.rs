use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    convolve_level0, curtail_trace, dispatch_greedy, dispatch_optimal, measure_outputs_annual, net_margin, StorageError,
    StorageSystem,
};
use crate::estimator::{register_measures, AnalyticLevel, JointSampler, Model, ModelFailure, ModelStack, Pairing, StateSpace};
use crate::sampling::{sample_year_state, StreamRng, YearState};

pub const LOLE: &str = "LOLE";
pub const EENS: &str = "EENS";

/// Storage dispatch models, from crudest to most detailed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageModelId {
    /// Storage ignored.
    NoStorage,
    /// Fixed daily peak-shaving pattern of the aggregated fleet.
    Average,
    /// Sequential per-unit greedy dispatch.
    Greedy,
    /// Fleet-coordinated dispatch.
    Optimal,
}

impl StorageModelId {
    /// Models whose dispatch does not depend on the sampled year.
    pub fn is_deterministic(self) -> bool {
        matches!(self, Self::NoStorage | Self::Average)
    }
}

impl fmt::Display for StorageModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NoStorage => "no_storage",
            Self::Average => "average",
            Self::Greedy => "greedy",
            Self::Optimal => "optimal",
        })
    }
}

pub struct YearSpace {
    system: Arc<StorageSystem>,
}

impl YearSpace {
    pub fn new(system: Arc<StorageSystem>) -> Self {
        Self { system }
    }
}

impl StateSpace for YearSpace {
    type State = YearState;

    fn sample(&self, _finest: usize, rng: &mut StreamRng) -> YearState {
        let s = &self.system;
        sample_year_state(&s.portfolio, &s.demand, &s.wind, rng).expect("storage system validated at load")
    }
}

pub struct StorageModel {
    id: StorageModelId,
    system: Arc<StorageSystem>,
}

impl StorageModel {
    pub fn new(id: StorageModelId, system: Arc<StorageSystem>) -> Self {
        Self { id, system }
    }

    /// `[LOLE, EENS]` for one year.
    pub fn annual_measures(&self, year: &YearState) -> Result<[f64; 2], StorageError> {
        let margin = net_margin(year)?;
        let dispatch = match self.id {
            StorageModelId::NoStorage => {
                return Ok(measure_outputs_annual(&margin.iter().map(|m| (-m).max(0.0)).collect::<Vec<_>>()))
            }
            StorageModelId::Average => {
                let p = &self.system.profile.dispatch;
                (0..margin.len()).map(|t| p[t % p.len()]).collect()
            }
            StorageModelId::Greedy => dispatch_greedy(&margin, &self.system.fleet),
            StorageModelId::Optimal => dispatch_optimal(&margin, &self.system.fleet),
        };
        Ok(measure_outputs_annual(&curtail_trace(&margin, &dispatch)?))
    }
}

impl Model<YearState> for StorageModel {
    fn name(&self) -> String {
        self.id.to_string()
    }

    fn evaluate(&self, state: &YearState, out: &mut [f64]) -> Result<(), ModelFailure> {
        let x = self.annual_measures(state).map_err(|e| {
            ModelFailure(format!("{e}; state: demand year {}, wind year {}", state.demand_year, state.wind_year))
        })?;
        out.copy_from_slice(&x);
        Ok(())
    }
}

/// Builds a stack over `models` (crudest first) measuring LOLE and EENS. With
/// `analytic_level0` the bottom model must be deterministic; its expectation
/// comes from convolution.
pub fn build_storage_stack(
    system: Arc<StorageSystem>,
    models: &[StorageModelId],
    analytic_level0: bool,
) -> Result<ModelStack, StorageError> {
    if models.is_empty() {
        return Err(StorageError::Invalid("model stack is empty".into()));
    }
    if analytic_level0 && !models[0].is_deterministic() {
        return Err(StorageError::Invalid(format!("model {} has no analytic expectation", models[0])));
    }
    let evaluators: Vec<Box<dyn Model<YearState>>> =
        models.iter().map(|&id| Box::new(StorageModel::new(id, system.clone())) as Box<dyn Model<YearState>>).collect();
    let measures = register_measures([LOLE, EENS]).expect("fixed measure names are unique");
    let sampler = JointSampler::new(YearSpace::new(system.clone()), evaluators);
    let stack = ModelStack::new(measures, Pairing::IdenticalRandomness, Arc::new(sampler));
    if !analytic_level0 {
        return Ok(stack);
    }
    let t0 = Instant::now();
    let pattern = (models[0] == StorageModelId::Average).then(|| system.profile.dispatch.as_slice());
    let r = convolve_level0(&system.portfolio, &system.demand, &system.wind, pattern);
    Ok(stack.with_analytic_level0(AnalyticLevel { values: vec![r.lole, r.eens], seconds: t0.elapsed().as_secs_f64() }))
}
