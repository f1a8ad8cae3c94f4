use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CompositeError;

pub const NETWORK_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: u32,
    /// Peak nodal demand, MW. Nodal demand weights are proportional to it.
    pub peak_load: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: u32,
    /// Index into [`NetworkDescription::buses`].
    pub node: usize,
    pub unit_type: String,
    /// MW.
    pub capacity: f64,
    pub availability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: u32,
    /// Indices into [`NetworkDescription::buses`].
    pub from: usize,
    pub to: usize,
    /// Per unit.
    pub reactance: f64,
    /// Nominal thermal rating, MW.
    pub rating: f64,
    pub availability: f64,
}

/// Immutable transmission system description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDescription {
    pub name: String,
    pub buses: Vec<Bus>,
    pub generators: Vec<Generator>,
    pub lines: Vec<Line>,
    /// Hourly system demand, MW.
    pub demand: Vec<f64>,
    /// Fraction of system demand at each bus; sums to one.
    pub weights: Vec<f64>,
    /// Multiplier applied to every line rating.
    pub rating_scale: f64,
}

#[derive(Debug, Deserialize)]
struct Manifest {
    schema_version: u32,
    name: String,
    #[serde(default = "one")]
    rating_scale: f64,
    files: ManifestFiles,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
struct ManifestFiles {
    buses: PathBuf,
    generators: PathBuf,
    lines: PathBuf,
    demand: PathBuf,
}

#[derive(Debug, Deserialize)]
struct BusRow {
    bus: u32,
    peak_load_mw: f64,
}

#[derive(Debug, Deserialize)]
struct GeneratorRow {
    id: u32,
    bus: u32,
    unit_type: String,
    capacity_mw: f64,
    availability: f64,
}

#[derive(Debug, Deserialize)]
struct LineRow {
    id: u32,
    from: u32,
    to: u32,
    reactance_pu: f64,
    rating_mw: f64,
    availability: f64,
}

#[derive(Debug, Deserialize)]
struct DemandRow {
    demand_mw: f64,
}

pub(crate) fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CompositeError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CompositeError::Io(path.to_path_buf(), e.to_string()))?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CompositeError::Io(path.to_path_buf(), e.to_string()))
}

impl NetworkDescription {
    /// Builds and validates a description from in-memory parts. Nodal weights
    /// are derived from the bus peak loads.
    pub fn new(
        name: impl Into<String>,
        buses: Vec<Bus>,
        generators: Vec<Generator>,
        lines: Vec<Line>,
        demand: Vec<f64>,
    ) -> Result<Self, CompositeError> {
        let total: f64 = buses.iter().map(|b| b.peak_load).sum();
        let weights = if total > 0.0 {
            buses.iter().map(|b| b.peak_load / total).collect()
        } else {
            vec![0.0; buses.len()]
        };
        let net = Self {
            name: name.into(),
            buses,
            generators,
            lines,
            demand,
            weights,
            rating_scale: 1.0,
        };
        net.validate()?;
        Ok(net)
    }

    /// Loads a network from its TOML manifest and the CSV tables it references.
    pub fn load(manifest_path: impl AsRef<Path>) -> Result<Self, CompositeError> {
        let manifest_path = manifest_path.as_ref();
        let text = fs::read_to_string(manifest_path)
            .map_err(|e| CompositeError::Io(manifest_path.to_path_buf(), e.to_string()))?;
        let manifest: Manifest =
            toml::from_str(&text).map_err(|e| CompositeError::Format(format!("{}: {e}", manifest_path.display())))?;
        if manifest.schema_version != NETWORK_SCHEMA_VERSION {
            return Err(CompositeError::Format(format!(
                "unsupported network schema version {} (expected {NETWORK_SCHEMA_VERSION})",
                manifest.schema_version
            )));
        }
        let dir = manifest_path.parent().unwrap_or(Path::new("."));
        let bus_rows: Vec<BusRow> = read_csv(&dir.join(&manifest.files.buses))?;
        let gen_rows: Vec<GeneratorRow> = read_csv(&dir.join(&manifest.files.generators))?;
        let line_rows: Vec<LineRow> = read_csv(&dir.join(&manifest.files.lines))?;
        let demand_rows: Vec<DemandRow> = read_csv(&dir.join(&manifest.files.demand))?;

        let buses: Vec<Bus> = bus_rows.iter().map(|r| Bus { id: r.bus, peak_load: r.peak_load_mw }).collect();
        let node_of = |id: u32| -> Result<usize, CompositeError> {
            buses
                .iter()
                .position(|b| b.id == id)
                .ok_or_else(|| CompositeError::Invalid(format!("unknown bus id {id}")))
        };
        let generators = gen_rows
            .into_iter()
            .map(|r| {
                Ok(Generator {
                    id: r.id,
                    node: node_of(r.bus)?,
                    unit_type: r.unit_type,
                    capacity: r.capacity_mw,
                    availability: r.availability,
                })
            })
            .collect::<Result<Vec<_>, CompositeError>>()?;
        let lines = line_rows
            .into_iter()
            .map(|r| {
                Ok(Line {
                    id: r.id,
                    from: node_of(r.from)?,
                    to: node_of(r.to)?,
                    reactance: r.reactance_pu,
                    rating: r.rating_mw,
                    availability: r.availability,
                })
            })
            .collect::<Result<Vec<_>, CompositeError>>()?;
        let demand = demand_rows.into_iter().map(|r| r.demand_mw).collect();
        let mut net = Self::new(manifest.name, buses, generators, lines, demand)?;
        net.rating_scale = manifest.rating_scale;
        net.validate()?;
        Ok(net)
    }

    pub fn with_rating_scale(mut self, scale: f64) -> Self {
        self.rating_scale = scale;
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.buses.len()
    }

    /// Scaled thermal limit of line `k`, MW.
    pub fn flow_limit(&self, k: usize) -> f64 {
        self.lines[k].rating * self.rating_scale
    }

    pub fn installed_capacity(&self) -> f64 {
        self.generators.iter().map(|g| g.capacity).sum()
    }

    pub fn validate(&self) -> Result<(), CompositeError> {
        let bad = |m: String| Err(CompositeError::Invalid(m));
        let n = self.buses.len();
        if n == 0 {
            return bad("network has no buses".into());
        }
        if self.demand.is_empty() {
            return bad("demand trace is empty".into());
        }
        if let Some(d) = self.demand.iter().find(|d| !(**d >= 0.0)) {
            return bad(format!("negative or non-finite demand value {d}"));
        }
        if self.weights.len() != n {
            return bad("one nodal weight per bus required".into());
        }
        let wsum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|w| *w < 0.0) || (wsum - 1.0).abs() > 1e-9 {
            return bad(format!("nodal weights must be non-negative and sum to 1 (sum {wsum})"));
        }
        for g in &self.generators {
            if g.node >= n || !(g.capacity >= 0.0) || !(0.0..=1.0).contains(&g.availability) {
                return bad(format!("generator {} is malformed", g.id));
            }
        }
        for l in &self.lines {
            if l.from >= n || l.to >= n || l.from == l.to {
                return bad(format!("line {} has invalid endpoints", l.id));
            }
            if !(l.reactance > 0.0) || !(l.rating > 0.0) {
                return bad(format!("line {} needs positive reactance and rating", l.id));
            }
            if !(0.0..=1.0).contains(&l.availability) {
                return bad(format!("line {} availability outside [0, 1]", l.id));
            }
        }
        if !(self.rating_scale > 0.0) {
            return bad(format!("rating scale must be positive, got {}", self.rating_scale));
        }
        let all_up = vec![true; self.lines.len()];
        if super::island_decomposition(self, &all_up).len() != 1 {
            return bad("network is not connected with all lines in service".into());
        }
        Ok(())
    }
}
