use serde::{Deserialize, Serialize};

use super::NetworkDescription;

/// Distribution of total available capacity for independent two-state units.
///
/// Unit capacities are rounded to the nearest multiple of `step`. Queries take
/// the load exactly: `P(G < r)` and `E[(r - G)+]` are evaluated on the grid
/// distribution without rounding `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityOutageTable {
    step: f64,
    /// `P(G = k * step)`.
    probs: Vec<f64>,
    /// `P(G <= k * step)`.
    cdf: Vec<f64>,
    /// `E[G ; G <= k * step]`.
    partial_mean: Vec<f64>,
}

impl CapacityOutageTable {
    /// Builds the table from `(capacity, availability)` pairs.
    pub fn new(units: impl IntoIterator<Item = (f64, f64)>, step: f64) -> Self {
        assert!(step > 0.0, "grid step must be positive");
        let mut probs = vec![1.0];
        for (capacity, availability) in units {
            let k = (capacity / step).round().max(0.0) as usize;
            if k == 0 {
                continue;
            }
            let mut next = vec![0.0; probs.len() + k];
            for (i, p) in probs.iter().enumerate() {
                next[i] += (1.0 - availability) * p;
                next[i + k] += availability * p;
            }
            probs = next;
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut partial_mean = Vec::with_capacity(probs.len());
        let (mut f, mut h) = (0.0, 0.0);
        for (k, p) in probs.iter().enumerate() {
            f += p;
            h += k as f64 * step * p;
            cdf.push(f);
            partial_mean.push(h);
        }
        Self { step, probs, cdf, partial_mean }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Largest grid index strictly below `load`, if any.
    fn index_below(&self, load: f64) -> Option<usize> {
        if load <= 0.0 {
            return None;
        }
        let k = (load / self.step).ceil() as usize - 1;
        Some(k.min(self.probs.len() - 1))
    }

    /// `(P(G < load), E[(load - G)+])`.
    pub fn shortfall(&self, load: f64) -> (f64, f64) {
        match self.index_below(load) {
            None => (0.0, 0.0),
            Some(k) => {
                let f = self.cdf[k];
                (f, (load * f - self.partial_mean[k]).max(0.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionResult {
    pub plc: f64,
    /// MW.
    pub epns: f64,
}

/// Exact single-node expectations: the generator outage table convolved with
/// the empirical distribution of hourly demand.
pub fn copt_convolve(network: &NetworkDescription, step: f64) -> ConvolutionResult {
    let table = CapacityOutageTable::new(network.generators.iter().map(|g| (g.capacity, g.availability)), step);
    let (mut plc, mut epns) = (0.0, 0.0);
    for &d in &network.demand {
        let (p, e) = table.shortfall(d);
        plc += p;
        epns += e;
    }
    let n = network.demand.len() as f64;
    ConvolutionResult { plc: plc / n, epns: epns / n }
}
