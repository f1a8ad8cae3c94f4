use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{build_injection_matrix, island_decomposition, CompositeError, InjectionMatrix, NetworkDescription};
use crate::sampling::{SystemStateHL1, SystemStateHL2};
use crate::solvers::{solve_lp, BoundedLp, LpStatus};

/// Curtailment below this many MW is reported as zero. Keeps solver
/// round-off from registering as a loss-of-load event.
pub const CURTAILMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IslandMethod {
    /// Capacity balance without network constraints.
    SingleNode,
    /// Island with no demand or no available generation.
    Trivial,
    Lp { iterations: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandCurtailment {
    pub nodes: Vec<usize>,
    /// MW.
    pub curtailment: f64,
    pub method: IslandMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurtailmentResult {
    /// MW, sum over islands.
    pub total: f64,
    pub islands: Vec<IslandCurtailment>,
}

impl CurtailmentResult {
    pub fn lp_solves(&self) -> usize {
        self.islands.iter().filter(|i| matches!(i.method, IslandMethod::Lp { .. })).count()
    }
}

fn snap(c: f64, demand: f64) -> f64 {
    if c < CURTAILMENT_TOLERANCE { 0.0 } else { c.min(demand) }
}

/// `[indicator of any curtailment, curtailed MW]`.
pub fn measure_outputs(result: &CurtailmentResult) -> [f64; 2] {
    let c = result.total.max(0.0);
    [if c > 0.0 { 1.0 } else { 0.0 }, c]
}

fn nodal_capacity(network: &NetworkDescription, gen_status: &[bool]) -> Vec<f64> {
    let mut cap = vec![0.0; network.num_nodes()];
    for (g, &up) in network.generators.iter().zip(gen_status) {
        if up {
            cap[g.node] += g.capacity;
        }
    }
    cap
}

/// Single-node curtailment: total demand minus total available capacity.
pub fn evaluate_hl1(network: &NetworkDescription, state: &SystemStateHL1) -> CurtailmentResult {
    let demand = state.total_demand();
    let capacity: f64 = network
        .generators
        .iter()
        .zip(&state.gen_status)
        .filter(|(_, up)| **up)
        .map(|(g, _)| g.capacity)
        .sum();
    let c = snap((demand - capacity).max(0.0), demand);
    CurtailmentResult {
        total: c,
        islands: vec![IslandCurtailment { nodes: (0..network.num_nodes()).collect(), curtailment: c, method: IslandMethod::SingleNode }],
    }
}

/// Network curtailment without a cached injection matrix.
pub fn evaluate_hl2(network: &NetworkDescription, state: &SystemStateHL2) -> Result<CurtailmentResult, CompositeError> {
    evaluate_network(network, state, None)
}

/// Network curtailment evaluator that keeps the injection matrix of the
/// intact network, which covers most sampled states.
#[derive(Debug, Clone)]
pub struct Hl2Evaluator {
    network: Arc<NetworkDescription>,
    intact: InjectionMatrix,
}

impl Hl2Evaluator {
    pub fn new(network: Arc<NetworkDescription>) -> Result<Self, CompositeError> {
        let nodes: Vec<usize> = (0..network.num_nodes()).collect();
        let intact = build_injection_matrix(&network, &nodes, &vec![true; network.lines.len()])?;
        Ok(Self { network, intact })
    }

    pub fn network(&self) -> &NetworkDescription {
        &self.network
    }

    pub fn evaluate(&self, state: &SystemStateHL2) -> Result<CurtailmentResult, CompositeError> {
        evaluate_network(&self.network, state, Some(&self.intact))
    }
}

fn evaluate_network(
    network: &NetworkDescription,
    state: &SystemStateHL2,
    intact: Option<&InjectionMatrix>,
) -> Result<CurtailmentResult, CompositeError> {
    let cap = nodal_capacity(network, &state.gen_status);
    let all_up = state.line_status.iter().all(|s| *s);
    let mut islands = Vec::new();
    let mut total = 0.0;
    let parts = if all_up { vec![(0..network.num_nodes()).collect()] } else { island_decomposition(network, &state.line_status) };
    for nodes in parts {
        let demand: f64 = nodes.iter().map(|&n| state.nodal_demand[n]).sum();
        let capacity: f64 = nodes.iter().map(|&n| cap[n]).sum();
        let (raw, method) = if nodes.len() == 1 {
            ((demand - capacity).max(0.0), IslandMethod::SingleNode)
        } else if demand <= 0.0 || capacity <= 0.0 {
            (demand, IslandMethod::Trivial)
        } else {
            let built;
            let m = match intact {
                Some(m) if all_up => m,
                _ => {
                    built = build_injection_matrix(network, &nodes, &state.line_status)?;
                    &built
                }
            };
            solve_island(network, state, &cap, m, demand)?
        };
        let c = snap(raw, demand);
        total += c;
        islands.push(IslandCurtailment { nodes, curtailment: c, method });
    }
    Ok(CurtailmentResult { total, islands })
}

/// Maximises served load on one island. Columns are the available
/// generation and the served demand of each bus (buses with nothing to
/// dispatch get no column); rows are the line-flow limits and the power
/// balance.
fn solve_island(
    network: &NetworkDescription,
    state: &SystemStateHL2,
    cap: &[f64],
    m: &InjectionMatrix,
    demand: f64,
) -> Result<(f64, IslandMethod), CompositeError> {
    // (column in M, sign of injection)
    let mut cols: Vec<(usize, f64)> = Vec::new();
    let mut objective = Vec::new();
    let mut upper = Vec::new();
    for (c, &n) in m.nodes.iter().enumerate() {
        if cap[n] > 0.0 {
            cols.push((c, 1.0));
            objective.push(0.0);
            upper.push(cap[n]);
        }
        if state.nodal_demand[n] > 0.0 {
            cols.push((c, -1.0));
            objective.push(-1.0);
            upper.push(state.nodal_demand[n]);
        }
    }
    let mut lp = BoundedLp::new(objective);
    lp.upper = upper;
    for (r, &k) in m.lines.iter().enumerate() {
        let coeffs: Vec<f64> = cols.iter().map(|&(c, sign)| sign * m.matrix[(r, c)]).collect();
        let limit = network.flow_limit(k);
        lp.add_inequality(coeffs, -limit, limit);
    }
    lp.add_equality(cols.iter().map(|&(_, sign)| sign).collect(), 0.0);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(CompositeError::Lp { status: format!("{:?}", sol.status), hour: state.hour });
    }
    let served = -sol.objective;
    Ok(((demand - served).max(0.0), IslandMethod::Lp { iterations: sol.iterations }))
}
