use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::info;
use serde::Serialize;

use super::record::sha256_hex;
use super::{
    EstimatorKind, ExperimentConfig, ExperimentError, FileHash, ResultsRecord, StackModels, VersionInfo, WallClock,
};
use crate::composite::{build_composite_stack, NetworkDescription};
use crate::estimator::{run_controller, EstimatorError, ModelStack, Timing};
use crate::storage::{build_storage_stack, StorageSystem};

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "ADEQUACY_DATA_DIR";

/// `$ADEQUACY_DATA_DIR` if set, else the data bundled with the crate.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub data_dir: PathBuf,
    /// Where outputs (and a failure dump, if any) go; `None` writes nothing.
    pub out_dir: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { data_dir: default_data_dir(), out_dir: None }
    }
}

/// Loads the system named by `config` and assembles its model stack.
pub fn build_stack(config: &ExperimentConfig, data_dir: &Path) -> Result<ModelStack, ExperimentError> {
    config.validate()?;
    let manifest = config.data_path(data_dir);
    if !manifest.is_file() {
        return Err(ExperimentError::Config {
            field: "data".into(),
            message: format!("{} does not exist", manifest.display()),
        });
    }
    let analytic = config.estimator == EstimatorKind::MlmcWithExpectation;
    Ok(match config.models()? {
        StackModels::Composite(models) => {
            let mut network = NetworkDescription::load(&manifest)?;
            if let Some(scale) = config.rating_scale {
                network = network.with_rating_scale(scale);
            }
            build_composite_stack(Arc::new(network), &models, analytic, config.convolution_step)?
        }
        StackModels::Storage(models) => {
            let system = StorageSystem::load(&manifest)?;
            build_storage_stack(Arc::new(system), &models, analytic)?
        }
    })
}

/// Hashes every `.csv` and `.toml` file next to the system manifest.
pub fn data_hashes(manifest: &Path) -> Result<Vec<FileHash>, ExperimentError> {
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| ExperimentError::Io(format!("{}: {e}", dir.display()));
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "toml")))
        .collect();
    files.sort();
    files
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(io)?;
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(FileHash { path: name, sha256: sha256_hex(&bytes) })
        })
        .collect()
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

#[derive(Serialize)]
struct FailureDump<'a> {
    experiment: &'a str,
    seed: u64,
    level: usize,
    sample_index: u64,
    message: &'a str,
    config: &'a ExperimentConfig,
}

/// Runs the controller for `config` and, if `out_dir` is set, writes
/// `results.json`, `levels.csv` and `report.txt` there. A model failure
/// writes `failure.json` with the sample's address (seed, level, index),
/// from which the offending state can be regenerated.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<ResultsRecord, ExperimentError> {
    let baseline = config.baseline.as_ref().map(ResultsRecord::load).transpose()?;
    if let Some(b) = &baseline {
        if b.measures() != config.measures() {
            return Err(ExperimentError::Config {
                field: "baseline".into(),
                message: format!("baseline measures {:?} differ from {:?}", b.measures(), config.measures()),
            });
        }
    }
    let stack = build_stack(config, &options.data_dir)?;
    let versions = VersionInfo {
        crate_version: env!("CARGO_PKG_VERSION").to_owned(),
        config_sha256: sha256_hex(config.to_toml().as_bytes()),
        data: data_hashes(&config.data_path(&options.data_dir))?,
    };
    let started_unix = unix_now();
    let started = Instant::now();
    info!("running {} ({} levels)", config.name, stack.num_levels());
    let output = match run_controller(&stack, &config.controller_settings()) {
        Ok(o) => o,
        Err(EstimatorError::ModelFailure { level, sample_index, message }) => {
            let dump = match &options.out_dir {
                Some(dir) => {
                    let path = dir.join("failure.json");
                    let body = FailureDump {
                        experiment: &config.name,
                        seed: config.controller.seed,
                        level,
                        sample_index,
                        message: &message,
                        config,
                    };
                    fs::create_dir_all(dir).map_err(|e| ExperimentError::Io(format!("{}: {e}", dir.display())))?;
                    fs::write(&path, serde_json::to_string_pretty(&body).expect("dump serialises"))
                        .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
                    Some(path)
                }
                None => None,
            };
            return Err(ExperimentError::ModelFailure { level, sample_index, message, dump });
        }
        Err(e) => return Err(e.into()),
    };
    let wall_clock = matches!(config.controller.timing, Timing::Measured).then(|| WallClock {
        started_unix,
        finished_unix: unix_now(),
        seconds: started.elapsed().as_secs_f64(),
    });
    let record = ResultsRecord::from_output(config, &output, baseline.as_ref(), versions, wall_clock);
    if let Some(dir) = &options.out_dir {
        record.write_outputs(dir)?;
    }
    Ok(record)
}
