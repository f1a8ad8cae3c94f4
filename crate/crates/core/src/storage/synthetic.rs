//! Synthetic stand-in for a national storage-study dataset.
//!
//! Demand has a winter peak around 55 GW with weekly and diurnal shapes and
//! day-to-day weather noise; wind is a 10 GW fleet driven by a persistent
//! hourly weather process; the thermal portfolio and the 27-unit storage
//! fleet are fixed tables. Everything is a deterministic function of the seed.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::system::{FleetRow, PortfolioRow};
use super::{StorageError, StorageSystem, StorageUnit, STORAGE_SCHEMA_VERSION};
use crate::sampling::{ConventionalUnit, TraceLibrary, HOURS_PER_YEAR};

pub const WIND_CAPACITY_MW: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub demand_years: usize,
    pub wind_years: usize,
    pub peak_demand_mw: f64,
    /// Number of 420 MW combined-cycle units; the knob that sets the margin.
    pub ccgt_units: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { seed: 2018, demand_years: 10, wind_years: 10, peak_demand_mw: 55_000.0, ccgt_units: 95 }
    }
}

// Fraction of daily mean, hour 0..23. Winter has a sharp early-evening peak.
const WINTER_SHAPE: [f64; 24] = [
    0.78, 0.74, 0.71, 0.70, 0.70, 0.73, 0.82, 0.95, 1.04, 1.06, 1.06, 1.05, 1.04, 1.03, 1.02, 1.04, 1.12, 1.24,
    1.25, 1.19, 1.11, 1.03, 0.93, 0.84,
];
const SUMMER_SHAPE: [f64; 24] = [
    0.80, 0.76, 0.73, 0.72, 0.72, 0.75, 0.84, 0.96, 1.04, 1.07, 1.08, 1.09, 1.09, 1.08, 1.07, 1.06, 1.07, 1.08,
    1.08, 1.07, 1.06, 1.04, 0.96, 0.87,
];
const WEEKDAY: [f64; 7] = [1.0, 1.01, 1.01, 1.01, 0.99, 0.89, 0.85];

fn winter_weight(day: usize) -> f64 {
    0.5 * (1.0 + (2.0 * PI * (day as f64 - 15.0) / 365.0).cos())
}

fn demand_year(rng: &mut ChaCha8Rng, peak: f64) -> Vec<f64> {
    let daily_noise = Normal::new(0.0, 0.04).expect("valid sd");
    let year_factor = 1.0 + Normal::new(0.0, 0.015).expect("valid sd").sample(rng);
    let dow_offset = rng.random_range(0..7usize);
    let mut weather = 0.0;
    let mut out = Vec::with_capacity(HOURS_PER_YEAR);
    // Daily mean ranges from about 0.58 (summer) to 0.78 (winter) of peak.
    for day in 0..HOURS_PER_YEAR / 24 {
        weather = 0.8 * weather + daily_noise.sample(rng);
        let w = winter_weight(day);
        let mean = peak * (0.58 + 0.20 * w) * WEEKDAY[(day + dow_offset) % 7] * year_factor * (1.0 + weather);
        for h in 0..24 {
            let shape = w * WINTER_SHAPE[h] + (1.0 - w) * SUMMER_SHAPE[h];
            out.push(mean * shape);
        }
    }
    out
}

fn wind_year(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let phi: f64 = 0.985;
    let innovation = Normal::new(0.0, (1.0 - phi * phi).sqrt()).expect("valid sd");
    let mut z: f64 = Normal::new(0.0, 1.0).expect("valid sd").sample(rng);
    let mut out = Vec::with_capacity(HOURS_PER_YEAR);
    for t in 0..HOURS_PER_YEAR {
        z = phi * z + innovation.sample(rng);
        let seasonal = 0.5 * (2.0 * winter_weight(t / 24) - 1.0);
        let cf = 1.0 / (1.0 + (-(-1.0 + seasonal + 1.5 * z)).exp());
        out.push(WIND_CAPACITY_MW * cf);
    }
    out
}

/// Thermal portfolio: `(count, MW, MTTF h, MTTR h)`.
pub fn portfolio(ccgt_units: usize) -> Vec<ConventionalUnit> {
    let classes = [
        (8usize, 1100u32, 3000.0, 150.0),
        (12, 500, 1000.0, 60.0),
        (ccgt_units, 420, 1200.0, 40.0),
        (4, 600, 1500.0, 60.0),
        (24, 100, 500.0, 30.0),
    ];
    classes
        .iter()
        .flat_map(|&(n, capacity, mttf, mttr)| (0..n).map(move |_| ConventionalUnit { capacity, mttf, mttr }))
        .collect()
}

/// Four pumped-hydro stations and 23 batteries of 0.5 to 4 hours.
pub fn fleet() -> Vec<StorageUnit> {
    let mut units = vec![
        StorageUnit::full(600.0, 3000.0),
        StorageUnit::full(150.0, 2400.0),
        StorageUnit::full(120.0, 480.0),
        StorageUnit::full(100.0, 2000.0),
    ];
    let durations = [0.5, 1.0, 1.0, 1.5, 2.0, 0.5, 1.0, 4.0];
    let powers = [49.9, 20.0, 35.0, 10.0, 50.0, 25.0, 40.0, 15.0, 30.0, 45.0, 12.0];
    for i in 0..23 {
        let p = powers[i % powers.len()];
        units.push(StorageUnit::full(p, p * durations[i % durations.len()]));
    }
    units
}

pub struct SyntheticData {
    pub demand: TraceLibrary,
    pub wind: TraceLibrary,
    pub portfolio: Vec<ConventionalUnit>,
    pub fleet: Vec<StorageUnit>,
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData, StorageError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let demand_ids = (0..spec.demand_years).map(|i| format!("demand_{:02}", i + 1)).collect();
    let demand = (0..spec.demand_years).map(|_| demand_year(&mut rng, spec.peak_demand_mw)).collect();
    let wind_ids = (0..spec.wind_years).map(|i| format!("wind_{:02}", i + 1)).collect();
    let wind = (0..spec.wind_years).map(|_| wind_year(&mut rng)).collect();
    Ok(SyntheticData {
        demand: TraceLibrary::new(demand_ids, demand)?,
        wind: TraceLibrary::new(wind_ids, wind)?,
        portfolio: portfolio(spec.ccgt_units),
        fleet: fleet(),
    })
}

impl SyntheticData {
    pub fn into_system(self, name: &str) -> Result<StorageSystem, StorageError> {
        StorageSystem::new(name, self.fleet, self.portfolio, self.demand, self.wind)
    }

    /// Writes `system.toml` plus the four CSV tables into `dir`.
    pub fn write(&self, dir: &Path, name: &str) -> Result<(), StorageError> {
        let io = |e: std::io::Error| StorageError::Io(format!("{}: {e}", dir.display()));
        let csv_err = |e: csv::Error| StorageError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let manifest = format!(
            "schema_version = {STORAGE_SCHEMA_VERSION}\nname = \"{name}\"\n\n[files]\nfleet = \"fleet.csv\"\n\
             portfolio = \"portfolio.csv\"\ndemand = \"demand.csv\"\nwind = \"wind.csv\"\n"
        );
        fs::write(dir.join("system.toml"), manifest).map_err(io)?;
        let mut w = csv::Writer::from_path(dir.join("fleet.csv")).map_err(csv_err)?;
        for u in &self.fleet {
            w.serialize(FleetRow { p_bar_mw: u.p_bar, e_bar_mwh: u.e_bar }).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        let mut w = csv::Writer::from_path(dir.join("portfolio.csv")).map_err(csv_err)?;
        for u in &self.portfolio {
            w.serialize(PortfolioRow { capacity_mw: u.capacity, mttf_h: u.mttf, mttr_h: u.mttr }).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        for (file, lib) in [("demand.csv", &self.demand), ("wind.csv", &self.wind)] {
            let mut w = csv::Writer::from_path(dir.join(file)).map_err(csv_err)?;
            w.write_record(&lib.ids).map_err(csv_err)?;
            for t in 0..HOURS_PER_YEAR {
                w.write_record(lib.years.iter().map(|y| format!("{:.1}", y[t]))).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Ok(())
    }
}
