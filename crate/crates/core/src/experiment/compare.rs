use serde::{Deserialize, Serialize};

use super::record::render_table;
use super::{estimate_format, ExperimentError, ResultsRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub experiment: String,
    pub measure: String,
    pub q_hat: f64,
    pub std_error: Option<f64>,
    pub elapsed: f64,
    pub speed: Option<f64>,
    /// Relative to the first record; `None` on the baseline itself.
    pub speedup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub measures: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// Tabulates records against the first one. All records must report the
/// same measures.
pub fn compare_runs(records: &[ResultsRecord]) -> Result<Comparison, ExperimentError> {
    let base = records.first().ok_or_else(|| ExperimentError::Compare("no records to compare".into()))?;
    let measures = base.measures();
    for r in &records[1..] {
        if r.measures() != measures {
            return Err(ExperimentError::Compare(format!(
                "{} reports {:?} but {} reports {:?}",
                r.config.name,
                r.measures(),
                base.config.name,
                measures
            )));
        }
    }
    let mut rows = Vec::new();
    for m in &measures {
        let base_speed = base.estimate(m).and_then(|e| e.speed);
        for (i, r) in records.iter().enumerate() {
            let e = r.estimate(m).expect("measures checked above");
            rows.push(ComparisonRow {
                experiment: r.config.name.clone(),
                measure: m.clone(),
                q_hat: e.estimate.q_hat,
                std_error: e.std_error,
                elapsed: e.estimate.elapsed,
                speed: e.speed,
                speedup: if i == 0 { None } else { base_speed.zip(e.speed).map(|(b, z)| z / b) },
            });
        }
    }
    Ok(Comparison { baseline: base.config.name.clone(), measures, rows })
}

impl Comparison {
    pub fn render(&self) -> String {
        let mut table = vec![vec![
            "measure".to_owned(),
            "experiment".to_owned(),
            "estimate".to_owned(),
            "time [s]".to_owned(),
            "speed [1/s]".to_owned(),
            "speedup".to_owned(),
        ]];
        for r in &self.rows {
            table.push(vec![
                r.measure.clone(),
                r.experiment.clone(),
                estimate_format(r.q_hat, r.std_error.unwrap_or(f64::NAN)),
                format!("{:.1}", r.elapsed),
                r.speed.map_or("n/a".to_owned(), |z| format!("{z:.3e}")),
                r.speedup.map_or("n/a".to_owned(), |s| format!("{s:.2}")),
            ]);
        }
        format!("baseline: {}\n{}", self.baseline, render_table(&table))
    }
}
