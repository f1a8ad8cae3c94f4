use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::composite::{CompositeModelId, EPNS, PLC};
use crate::estimator::{ControllerSettings, Timing};
use crate::storage::{StorageModelId, EENS, LOLE};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Composite,
    Storage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Single model, plain sampling.
    Mc,
    /// Every level sampled.
    Mlmc,
    /// Bottom level replaced by its exact expectation.
    MlmcWithExpectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    #[serde(default = "default_n0")]
    pub n0: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Seconds of model evaluation per run, per worker.
    #[serde(default = "default_t_star")]
    pub t_star: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_timing")]
    pub timing: Timing,
}

fn default_n0() -> u64 {
    100
}
fn default_runs() -> usize {
    10
}
fn default_t_star() -> f64 {
    60.0
}
fn default_alpha() -> f64 {
    0.1
}
fn default_workers() -> usize {
    1
}
fn default_timing() -> Timing {
    Timing::Measured
}
fn default_step() -> f64 {
    1.0
}

/// Declarative experiment, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    pub study: Study,
    pub estimator: EstimatorKind,
    /// Model names, coarsest first.
    pub stack: Vec<String>,
    /// System manifest; relative paths resolve against the data directory.
    pub data: PathBuf,
    pub target_measure: String,
    /// Line-rating multiplier (composite study only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating_scale: Option<f64>,
    /// Outage-table grid in MW (composite study only).
    #[serde(default = "default_step")]
    pub convolution_step: f64,
    /// `results.json` of a run to compute speedups against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<PathBuf>,
    pub controller: ControllerConfig,
}

/// Parsed model stack.
#[derive(Debug, Clone, PartialEq)]
pub enum StackModels {
    Composite(Vec<CompositeModelId>),
    Storage(Vec<StorageModelId>),
}

fn field(name: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Config { field: name.to_owned(), message: message.into() }
}

fn parse_model<T: for<'de> Deserialize<'de>>(name: &str) -> Result<T, ExperimentError> {
    T::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(name))
        .map_err(|_| field("stack", format!("unknown model {name:?}")))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let config: Self = toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn measures(&self) -> [&'static str; 2] {
        match self.study {
            Study::Composite => [PLC, EPNS],
            Study::Storage => [LOLE, EENS],
        }
    }

    pub fn models(&self) -> Result<StackModels, ExperimentError> {
        Ok(match self.study {
            Study::Composite => {
                StackModels::Composite(self.stack.iter().map(|s| parse_model(s)).collect::<Result<_, _>>()?)
            }
            Study::Storage => StackModels::Storage(self.stack.iter().map(|s| parse_model(s)).collect::<Result<_, _>>()?),
        })
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(field(
                "schema_version",
                format!("unsupported version {} (expected {CONFIG_SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.stack.is_empty() {
            return Err(field("stack", "at least one model required"));
        }
        let models = self.models()?;
        let n = self.stack.len();
        match self.estimator {
            EstimatorKind::Mc if n != 1 => return Err(field("stack", "plain Monte Carlo takes exactly one model")),
            EstimatorKind::Mlmc | EstimatorKind::MlmcWithExpectation if n < 2 => {
                return Err(field("stack", "multilevel estimators need at least two models"))
            }
            _ => {}
        }
        if self.estimator == EstimatorKind::MlmcWithExpectation {
            let ok = match &models {
                StackModels::Composite(m) => m[0] == CompositeModelId::Hl1,
                StackModels::Storage(m) => m[0].is_deterministic(),
            };
            if !ok {
                return Err(field("stack", format!("bottom model {:?} has no analytic expectation", self.stack[0])));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.stack[i] == self.stack[j] {
                    return Err(field("stack", format!("model {:?} listed twice", self.stack[i])));
                }
            }
        }
        if !self.measures().contains(&self.target_measure.as_str()) {
            return Err(field(
                "target_measure",
                format!("{:?} is not one of {:?}", self.target_measure, self.measures()),
            ));
        }
        match (self.study, self.rating_scale) {
            (Study::Storage, Some(_)) => return Err(field("rating_scale", "only applies to the composite study")),
            (Study::Composite, Some(s)) if !(s > 0.0) => return Err(field("rating_scale", "must be positive")),
            _ => {}
        }
        if !(self.convolution_step > 0.0) {
            return Err(field("convolution_step", "must be positive"));
        }
        let c = &self.controller;
        if c.n0 < 2 {
            return Err(field("controller.n0", "must be at least 2"));
        }
        if !(c.t_star > 0.0) {
            return Err(field("controller.t_star", "must be positive"));
        }
        if !(c.alpha > 0.0 && c.alpha <= 1.0) {
            return Err(field("controller.alpha", "must lie in (0, 1]"));
        }
        if c.workers == 0 {
            return Err(field("controller.workers", "must be at least 1"));
        }
        if let Timing::Nominal { seconds_per_pair } = &c.timing {
            if seconds_per_pair.len() != n || seconds_per_pair.iter().any(|t| !(*t > 0.0)) {
                return Err(field("controller.timing.seconds_per_pair", format!("need {n} positive values, one per model")));
            }
        }
        Ok(())
    }

    pub fn controller_settings(&self) -> ControllerSettings {
        let c = &self.controller;
        ControllerSettings {
            n0: c.n0,
            runs: c.runs,
            t_star: c.t_star,
            target: self.target_measure.as_str().into(),
            alpha: c.alpha,
            seed: c.seed,
            workers: c.workers,
            timing: c.timing.clone(),
        }
    }

    /// Manifest path: absolute paths are kept, relative ones are joined to `data_dir`.
    pub fn data_path(&self, data_dir: &Path) -> PathBuf {
        if self.data.is_absolute() { self.data.clone() } else { data_dir.join(&self.data) }
    }
}
