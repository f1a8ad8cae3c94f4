use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{mean_daily_profile, peak_shave_profile, PeakShaveProfile, StorageError};
use crate::composite::read_csv;
use crate::sampling::{ConventionalUnit, TraceLibrary};

pub const STORAGE_SCHEMA_VERSION: u32 = 1;

/// One storage unit. Charging and discharging share the power rating and
/// are lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageUnit {
    /// MW.
    pub p_bar: f64,
    /// MWh.
    pub e_bar: f64,
    /// MWh at the start of each simulated year.
    pub initial_soc: f64,
}

impl StorageUnit {
    /// Unit that starts the year full.
    pub fn full(p_bar: f64, e_bar: f64) -> Self {
        Self { p_bar, e_bar, initial_soc: e_bar }
    }

    /// Hours to empty from full at rated power.
    pub fn time_to_go(&self) -> f64 {
        self.e_bar / self.p_bar
    }

    pub fn validate(&self) -> Result<(), StorageError> {
        if !(self.p_bar > 0.0) || !(self.e_bar > 0.0) || !(0.0..=self.e_bar).contains(&self.initial_soc) {
            return Err(StorageError::Invalid(format!("storage unit {self:?} is malformed")));
        }
        Ok(())
    }
}

/// Everything the storage study samples from, plus the precomputed
/// peak-shaving pattern of the aggregated fleet.
#[derive(Debug, Clone)]
pub struct StorageSystem {
    pub name: String,
    pub fleet: Vec<StorageUnit>,
    pub portfolio: Vec<ConventionalUnit>,
    pub demand: TraceLibrary,
    pub wind: TraceLibrary,
    pub profile: PeakShaveProfile,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    schema_version: u32,
    name: String,
    files: ManifestFiles,
}

#[derive(Debug, Deserialize)]
struct ManifestFiles {
    fleet: PathBuf,
    portfolio: PathBuf,
    demand: PathBuf,
    wind: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct FleetRow {
    pub p_bar_mw: f64,
    pub e_bar_mwh: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct PortfolioRow {
    pub capacity_mw: u32,
    pub mttf_h: f64,
    pub mttr_h: f64,
}

impl StorageSystem {
    pub fn new(
        name: impl Into<String>,
        fleet: Vec<StorageUnit>,
        portfolio: Vec<ConventionalUnit>,
        demand: TraceLibrary,
        wind: TraceLibrary,
    ) -> Result<Self, StorageError> {
        if fleet.is_empty() {
            return Err(StorageError::Invalid("storage fleet is empty".into()));
        }
        if portfolio.is_empty() {
            return Err(StorageError::Invalid("conventional portfolio is empty".into()));
        }
        for u in &fleet {
            u.validate()?;
        }
        for u in &portfolio {
            u.validate()?;
        }
        let p_total = fleet.iter().map(|u| u.p_bar).sum();
        let e_total = fleet.iter().map(|u| u.e_bar).sum();
        let profile = peak_shave_profile(&mean_daily_profile(&demand), p_total, e_total)?;
        Ok(Self { name: name.into(), fleet, portfolio, demand, wind, profile })
    }

    /// Loads a system from its TOML manifest. Storage units start full.
    pub fn load(manifest_path: impl AsRef<Path>) -> Result<Self, StorageError> {
        let path = manifest_path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| StorageError::Io(format!("{}: {e}", path.display())))?;
        let m: Manifest = toml::from_str(&text).map_err(|e| StorageError::Format(format!("{}: {e}", path.display())))?;
        if m.schema_version != STORAGE_SCHEMA_VERSION {
            return Err(StorageError::Format(format!(
                "unsupported storage schema version {} (expected {STORAGE_SCHEMA_VERSION})",
                m.schema_version
            )));
        }
        let dir = path.parent().unwrap_or(Path::new("."));
        let fleet: Vec<FleetRow> = read_csv(&dir.join(&m.files.fleet)).map_err(|e| StorageError::Io(e.to_string()))?;
        let portfolio: Vec<PortfolioRow> =
            read_csv(&dir.join(&m.files.portfolio)).map_err(|e| StorageError::Io(e.to_string()))?;
        let demand = TraceLibrary::from_csv(dir.join(&m.files.demand))?;
        let wind = TraceLibrary::from_csv(dir.join(&m.files.wind))?;
        Self::new(
            m.name,
            fleet.into_iter().map(|r| StorageUnit::full(r.p_bar_mw, r.e_bar_mwh)).collect(),
            portfolio
                .into_iter()
                .map(|r| ConventionalUnit { capacity: r.capacity_mw, mttf: r.mttf_h, mttr: r.mttr_h })
                .collect(),
            demand,
            wind,
        )
    }

    pub fn fleet_power(&self) -> f64 {
        self.fleet.iter().map(|u| u.p_bar).sum()
    }

    pub fn fleet_energy(&self) -> f64 {
        self.fleet.iter().map(|u| u.e_bar).sum()
    }

    pub fn installed_conventional(&self) -> f64 {
        self.portfolio.iter().map(|u| f64::from(u.capacity)).sum()
    }
}
