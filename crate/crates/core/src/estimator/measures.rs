use std::fmt;

use serde::{Deserialize, Serialize};

use super::EstimatorError;

/// Name of a risk measure such as `EPNS` or `LOLE`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureId(pub String);

impl MeasureId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for MeasureId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// Ordered set of measures estimated in parallel. Every model evaluation
/// writes one value per measure, in this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSet {
    ids: Vec<MeasureId>,
}

impl MeasureSet {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[MeasureId] {
        &self.ids
    }

    pub fn index_of(&self, id: &MeasureId) -> Option<usize> {
        self.ids.iter().position(|m| m == id)
    }
}

/// Builds the measurement context; identifiers must be non-empty and unique.
pub fn register_measures<I, S>(ids: I) -> Result<MeasureSet, EstimatorError>
where
    I: IntoIterator<Item = S>,
    S: Into<MeasureId>,
{
    let mut out: Vec<MeasureId> = Vec::new();
    for id in ids {
        let id = id.into();
        if out.contains(&id) {
            return Err(EstimatorError::DuplicateMeasure(id));
        }
        out.push(id);
    }
    if out.is_empty() {
        return Err(EstimatorError::NoMeasures);
    }
    Ok(MeasureSet { ids: out })
}
