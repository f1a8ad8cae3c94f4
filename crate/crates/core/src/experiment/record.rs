use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{estimate_format, ExperimentConfig, ExperimentError};
use crate::estimator::{ControllerOutput, RiskEstimate, RunRecord};

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

/// Headline numbers for one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub estimate: RiskEstimate,
    pub std_error: Option<f64>,
    /// `q^2 / (t var)` in 1/s; absent when undefined (zero estimate or variance).
    pub speed: Option<f64>,
    /// Speed relative to the baseline record, when one was given.
    pub speedup: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelContribution {
    pub measure: String,
    /// Estimated mean of the level difference (or the exact bottom expectation).
    pub mean: f64,
    /// Standard error of `mean`; zero on the analytic row.
    pub std_error: Option<f64>,
    /// Per-sample variance of the level difference.
    pub variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub kind: LevelKind,
    pub upper_model: String,
    pub lower_model: Option<String>,
    pub samples: u64,
    /// Seconds per pair.
    pub tau: f64,
    pub contributions: Vec<LevelContribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionInfo {
    pub crate_version: String,
    pub config_sha256: String,
    pub data: Vec<FileHash>,
}

/// Wall-clock facts. Recorded only when costs are measured, so that a
/// nominal-cost record is a pure function of its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    /// Seconds since the Unix epoch.
    pub started_unix: f64,
    pub finished_unix: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRecord {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub estimates: Vec<EstimateRow>,
    pub levels: Vec<LevelRow>,
    pub runs: Vec<RunRecord>,
    /// Name of the baseline experiment the speedups refer to.
    pub baseline: Option<String>,
    pub versions: VersionInfo,
    pub wall_clock: Option<WallClock>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ResultsRecord {
    pub fn from_output(
        config: &ExperimentConfig,
        output: &ControllerOutput,
        baseline: Option<&ResultsRecord>,
        versions: VersionInfo,
        wall_clock: Option<WallClock>,
    ) -> Self {
        let estimates = output
            .estimates
            .iter()
            .map(|e| {
                let speed = e.speed().ok();
                let speedup = baseline
                    .and_then(|b| b.estimate(e.measure.as_str()))
                    .and_then(|b| b.speed)
                    .zip(speed)
                    .map(|(base, own)| own / base);
                EstimateRow { estimate: e.clone(), std_error: e.std_error(), speed, speedup }
            })
            .collect();
        let measures: Vec<String> = output.estimates.iter().map(|e| e.measure.to_string()).collect();
        let mut levels = Vec::new();
        if let Some(values) = &output.analytic_level0 {
            let bottom = output.levels.first().and_then(|l| l.lower_model.clone()).unwrap_or_default();
            levels.push(LevelRow {
                level: 0,
                kind: LevelKind::Analytic,
                upper_model: bottom,
                lower_model: None,
                samples: 0,
                tau: 0.0,
                contributions: measures
                    .iter()
                    .zip(values)
                    .map(|(m, &v)| LevelContribution {
                        measure: m.clone(),
                        mean: v,
                        std_error: Some(0.0),
                        variance: Some(0.0),
                    })
                    .collect(),
            });
        }
        for l in &output.levels {
            levels.push(LevelRow {
                level: l.level,
                kind: LevelKind::Sampled,
                upper_model: l.upper_model.clone(),
                lower_model: l.lower_model.clone(),
                samples: l.n,
                tau: l.tau,
                contributions: measures
                    .iter()
                    .zip(&l.stats)
                    .map(|(m, s)| LevelContribution {
                        measure: m.clone(),
                        mean: s.mean_y,
                        std_error: s.has_variance().then(|| (s.var_y / s.n as f64).sqrt()),
                        variance: s.has_variance().then_some(s.var_y),
                    })
                    .collect(),
            });
        }
        Self {
            schema_version: RESULTS_SCHEMA_VERSION,
            config: config.clone(),
            estimates,
            levels,
            runs: output.runs.clone(),
            baseline: baseline.map(|b| b.config.name.clone()),
            versions,
            wall_clock,
        }
    }

    pub fn estimate(&self, measure: &str) -> Option<&EstimateRow> {
        self.estimates.iter().find(|e| e.estimate.measure.as_str() == measure)
    }

    pub fn measures(&self) -> Vec<String> {
        self.estimates.iter().map(|e| e.estimate.measure.to_string()).collect()
    }

    /// Sum of the level contributions for `measure`, in level order.
    pub fn breakdown_sum(&self, measure: &str) -> Option<f64> {
        let mut sum = 0.0;
        for row in &self.levels {
            sum += row.contributions.iter().find(|c| c.measure == measure)?.mean;
        }
        Some(sum)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let record: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        if record.schema_version != RESULTS_SCHEMA_VERSION {
            return Err(ExperimentError::Parse(format!(
                "results schema version {} is not supported (expected {RESULTS_SCHEMA_VERSION})",
                record.schema_version
            )));
        }
        Ok(record)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// One row per level and measure.
    pub fn levels_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["level", "kind", "upper_model", "lower_model", "samples", "tau_s", "measure", "mean", "std_error", "variance"])
            .expect("in-memory write");
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:e}"));
        for row in &self.levels {
            for c in &row.contributions {
                w.write_record([
                    row.level.to_string(),
                    match row.kind {
                        LevelKind::Analytic => "analytic".to_owned(),
                        LevelKind::Sampled => "sampled".to_owned(),
                    },
                    row.upper_model.clone(),
                    row.lower_model.clone().unwrap_or_default(),
                    row.samples.to_string(),
                    format!("{:e}", row.tau),
                    c.measure.clone(),
                    format!("{:e}", c.mean),
                    opt(c.std_error),
                    opt(c.variance),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Human-readable summary: headline estimates, then the level breakdown.
    pub fn report(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {}", c.name);
        let _ = writeln!(out, "study: {:?}, estimator: {:?}, stack: {}", c.study, c.estimator, c.stack.join(" < "));
        if let Some(s) = c.rating_scale {
            let _ = writeln!(out, "rating scale: {s}");
        }
        let _ = writeln!(
            out,
            "seed {}, workers {}, {} runs of {} s, target {}",
            c.controller.seed, c.controller.workers, c.controller.runs, c.controller.t_star, c.target_measure
        );
        if let Some(w) = &self.wall_clock {
            let _ = writeln!(out, "wall clock: {:.1} s", w.seconds);
        }
        out.push('\n');
        let mut rows = vec![vec![
            "measure".to_owned(),
            "estimate".to_owned(),
            "samples".to_owned(),
            "time [s]".to_owned(),
            "speed [1/s]".to_owned(),
            "speedup".to_owned(),
        ]];
        for e in &self.estimates {
            rows.push(vec![
                e.estimate.measure.to_string(),
                estimate_format(e.estimate.q_hat, e.std_error.unwrap_or(f64::NAN)),
                e.estimate.n_total.to_string(),
                format!("{:.1}", e.estimate.elapsed),
                e.speed.map_or("n/a".to_owned(), |z| format!("{z:.3e}")),
                e.speedup.map_or("n/a".to_owned(), |s| format!("{s:.2}")),
            ]);
        }
        out.push_str(&render_table(&rows));
        if let Some(b) = &self.baseline {
            let _ = writeln!(out, "speedup relative to {b}");
        }
        out.push('\n');
        let mut header = vec!["level".to_owned(), "models".to_owned(), "samples".to_owned(), "tau [s]".to_owned()];
        header.extend(self.measures());
        let mut rows = vec![header];
        for row in &self.levels {
            let mut r = vec![
                row.level.to_string(),
                match &row.lower_model {
                    Some(lower) => format!("{} - {lower}", row.upper_model),
                    None => row.upper_model.clone(),
                },
                match row.kind {
                    LevelKind::Analytic => "exact".to_owned(),
                    LevelKind::Sampled => row.samples.to_string(),
                },
                format!("{:.2e}", row.tau),
            ];
            for c in &row.contributions {
                r.push(estimate_format(c.mean, c.std_error.unwrap_or(f64::NAN)));
            }
            rows.push(r);
        }
        out.push_str(&render_table(&rows));
        out
    }

    /// Writes `results.json`, `levels.csv` and `report.txt` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        let io = |p: &Path, e: std::io::Error| ExperimentError::Io(format!("{}: {e}", p.display()));
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let files = [
            ("results.json", self.to_json()),
            ("levels.csv", self.levels_csv()),
            ("report.txt", self.report()),
        ];
        let mut written = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Left-aligned first column, right-aligned others.
pub(crate) fn render_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let width: Vec<usize> =
        (0..cols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            let pad = width[j] - cell.chars().count();
            if j == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            out.push_str(&"-".repeat(width.iter().sum::<usize>() + 2 * cols.saturating_sub(1)));
            out.push('\n');
        }
    }
    out
}
