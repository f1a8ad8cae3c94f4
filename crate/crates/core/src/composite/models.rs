use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{copt_convolve, evaluate_hl1, measure_outputs, CompositeError, Hl2Evaluator, NetworkDescription};
use crate::estimator::{register_measures, AnalyticLevel, JointSampler, Model, ModelFailure, ModelStack, Pairing, StateSpace};
use crate::sampling::{project_pattern1, sample_hl2_state, StreamRng, SystemStateHL2};

pub const PLC: &str = "PLC";
pub const EPNS: &str = "EPNS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositeModelId {
    /// Generation only.
    Hl1,
    /// Generation and transmission.
    Hl2,
}

impl fmt::Display for CompositeModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hl1 => "HL1",
            Self::Hl2 => "HL2",
        })
    }
}

/// Full network states; coarser models project them.
pub struct CompositeSpace {
    network: Arc<NetworkDescription>,
}

impl CompositeSpace {
    pub fn new(network: Arc<NetworkDescription>) -> Self {
        Self { network }
    }
}

impl StateSpace for CompositeSpace {
    type State = SystemStateHL2;

    fn sample(&self, _finest: usize, rng: &mut StreamRng) -> SystemStateHL2 {
        sample_hl2_state(&self.network, rng)
    }
}

pub struct Hl2Model {
    evaluator: Hl2Evaluator,
}

impl Hl2Model {
    pub fn new(network: Arc<NetworkDescription>) -> Result<Self, CompositeError> {
        Ok(Self { evaluator: Hl2Evaluator::new(network)? })
    }
}

impl Model<SystemStateHL2> for Hl2Model {
    fn name(&self) -> String {
        CompositeModelId::Hl2.to_string()
    }

    fn evaluate(&self, state: &SystemStateHL2, out: &mut [f64]) -> Result<(), ModelFailure> {
        let r = self.evaluator.evaluate(state).map_err(|e| {
            ModelFailure(format!(
                "{e}; state: hour {}, generators down {:?}, lines down {:?}",
                state.hour,
                down(&state.gen_status),
                down(&state.line_status)
            ))
        })?;
        out.copy_from_slice(&measure_outputs(&r));
        Ok(())
    }
}

fn down(status: &[bool]) -> Vec<usize> {
    status.iter().enumerate().filter(|(_, s)| !**s).map(|(i, _)| i).collect()
}

pub struct Hl1Model {
    network: Arc<NetworkDescription>,
}

impl Hl1Model {
    pub fn new(network: Arc<NetworkDescription>) -> Self {
        Self { network }
    }
}

impl Model<SystemStateHL2> for Hl1Model {
    fn name(&self) -> String {
        CompositeModelId::Hl1.to_string()
    }

    fn evaluate(&self, state: &SystemStateHL2, out: &mut [f64]) -> Result<(), ModelFailure> {
        let r = evaluate_hl1(&self.network, &project_pattern1(state));
        out.copy_from_slice(&measure_outputs(&r));
        Ok(())
    }
}

/// Builds a stack over `models` (coarsest first) measuring PLC and EPNS.
/// With `analytic_level0`, the bottom model must be HL1 and its expectation
/// is computed by convolution at `step` MW.
pub fn build_composite_stack(
    network: Arc<NetworkDescription>,
    models: &[CompositeModelId],
    analytic_level0: bool,
    step: f64,
) -> Result<ModelStack, CompositeError> {
    if models.is_empty() {
        return Err(CompositeError::Invalid("model stack is empty".into()));
    }
    if analytic_level0 && models[0] != CompositeModelId::Hl1 {
        return Err(CompositeError::Invalid("only the single-node model has an analytic expectation".into()));
    }
    let mut evaluators: Vec<Box<dyn Model<SystemStateHL2>>> = Vec::new();
    for id in models {
        evaluators.push(match id {
            CompositeModelId::Hl1 => Box::new(Hl1Model::new(network.clone())),
            CompositeModelId::Hl2 => Box::new(Hl2Model::new(network.clone())?),
        });
    }
    let measures = register_measures([PLC, EPNS]).expect("fixed measure names are unique");
    let sampler = JointSampler::new(CompositeSpace::new(network.clone()), evaluators);
    let stack = ModelStack::new(measures, Pairing::ComponentSubset, Arc::new(sampler));
    if !analytic_level0 {
        return Ok(stack);
    }
    let t0 = Instant::now();
    let r = copt_convolve(&network, step);
    Ok(stack.with_analytic_level0(AnalyticLevel { values: vec![r.plc, r.epns], seconds: t0.elapsed().as_secs_f64() }))
}
