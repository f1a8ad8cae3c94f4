use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::MeasureSet;
use crate::sampling::StreamRng;

/// How the two members of a level pair share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// The coarser model omits components of the finer one; states are drawn
    /// in the finer model's space and the extra components are ignored.
    ComponentSubset,
    /// Both models consume the identical sampled state.
    IdenticalRandomness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFailure(pub String);

impl std::fmt::Display for ModelFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Source of sampled states. `finest` is the highest model index that will
/// see the state, so spaces may skip components no model up to it uses.
pub trait StateSpace: Send + Sync {
    type State;
    fn sample(&self, finest: usize, rng: &mut StreamRng) -> Self::State;
}

/// A model maps a state to one value per registered measure.
pub trait Model<S>: Send + Sync {
    fn name(&self) -> String;
    fn evaluate(&self, state: &S, out: &mut [f64]) -> Result<(), ModelFailure>;
}

/// Draws level pairs. For level 0, only `upper` is written and `lower` stays zero.
pub trait LevelSampler: Send + Sync {
    fn num_levels(&self) -> usize;
    fn model_names(&self) -> Vec<String>;
    fn sample_pair(
        &self,
        level: usize,
        rng: &mut StreamRng,
        upper: &mut [f64],
        lower: &mut [f64],
    ) -> Result<(), ModelFailure>;
}

/// Level sampler over a shared state space: each pair draws one state and
/// evaluates models `level` and `level - 1` on it.
pub struct JointSampler<Sp: StateSpace> {
    space: Sp,
    models: Vec<Box<dyn Model<Sp::State>>>,
}

impl<Sp: StateSpace> JointSampler<Sp> {
    pub fn new(space: Sp, models: Vec<Box<dyn Model<Sp::State>>>) -> Self {
        Self { space, models }
    }

    pub fn space(&self) -> &Sp {
        &self.space
    }
}

impl<Sp: StateSpace> LevelSampler for JointSampler<Sp> {
    fn num_levels(&self) -> usize {
        self.models.len()
    }

    fn model_names(&self) -> Vec<String> {
        self.models.iter().map(|m| m.name()).collect()
    }

    fn sample_pair(
        &self,
        level: usize,
        rng: &mut StreamRng,
        upper: &mut [f64],
        lower: &mut [f64],
    ) -> Result<(), ModelFailure> {
        let state = self.space.sample(level, rng);
        self.models[level].evaluate(&state, upper)?;
        if level > 0 {
            self.models[level - 1].evaluate(&state, lower)?;
        } else {
            lower.fill(0.0);
        }
        Ok(())
    }
}

/// Exact expectation of the level-0 model, per measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticLevel {
    pub values: Vec<f64>,
    /// Wall-clock seconds spent computing it.
    pub seconds: f64,
}

/// Ordered model hierarchy `M_0 .. M_L` with its pairing strategy.
#[derive(Clone)]
pub struct ModelStack {
    pub measures: MeasureSet,
    pub pairing: Pairing,
    pub sampler: Arc<dyn LevelSampler>,
    /// When present, level 0 is never sampled.
    pub analytic_level0: Option<AnalyticLevel>,
}

impl ModelStack {
    pub fn new(measures: MeasureSet, pairing: Pairing, sampler: Arc<dyn LevelSampler>) -> Self {
        Self { measures, pairing, sampler, analytic_level0: None }
    }

    pub fn with_analytic_level0(mut self, analytic: AnalyticLevel) -> Self {
        self.analytic_level0 = Some(analytic);
        self
    }

    pub fn num_levels(&self) -> usize {
        self.sampler.num_levels()
    }

    /// Indices of levels estimated by sampling.
    pub fn sampled_levels(&self) -> std::ops::Range<usize> {
        let first = usize::from(self.analytic_level0.is_some());
        first..self.num_levels()
    }
}

impl std::fmt::Debug for ModelStack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelStack")
            .field("measures", &self.measures)
            .field("pairing", &self.pairing)
            .field("models", &self.sampler.model_names())
            .field("analytic_level0", &self.analytic_level0)
            .finish()
    }
}
