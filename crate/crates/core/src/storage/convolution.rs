use serde::{Deserialize, Serialize};

use crate::composite::CapacityOutageTable;
use crate::sampling::{ConventionalUnit, TraceLibrary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnualRisk {
    /// Hours per year.
    pub lole: f64,
    /// MWh per year.
    pub eens: f64,
}

/// Stationary outage table of the conventional portfolio at 1 MW.
pub fn portfolio_table(portfolio: &[ConventionalUnit]) -> CapacityOutageTable {
    CapacityOutageTable::new(portfolio.iter().map(|u| (f64::from(u.capacity), u.availability())), 1.0)
}

/// Exact annual expectations for a deterministic storage pattern (`None` for
/// no storage). Every hour of every (demand year, wind year) pair is
/// convolved with the stationary outage table; year pairs are weighted
/// uniformly.
pub fn convolve_level0(
    portfolio: &[ConventionalUnit],
    demand_years: &TraceLibrary,
    wind_years: &TraceLibrary,
    pattern: Option<&[f64]>,
) -> AnnualRisk {
    let table = portfolio_table(portfolio);
    let (mut lole, mut eens) = (0.0, 0.0);
    for d in &demand_years.years {
        for w in &wind_years.years {
            for t in 0..d.len() {
                let s = pattern.map_or(0.0, |p| p[t % p.len()]);
                let (p, e) = table.shortfall(d[t] - w[t] + s);
                lole += p;
                eens += e;
            }
        }
    }
    let pairs = (demand_years.len() * wind_years.len()) as f64;
    AnnualRisk { lole: lole / pairs, eens: eens / pairs }
}
