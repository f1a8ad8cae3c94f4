use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SamplingError, StreamRng};
use crate::composite::NetworkDescription;

/// Snapshot of a transmission system: one hour of demand plus the status of
/// every generator and line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemStateHL2 {
    /// MW per bus.
    pub nodal_demand: Vec<f64>,
    pub gen_status: Vec<bool>,
    pub line_status: Vec<bool>,
    /// Zero-based index into the demand trace.
    pub hour: usize,
}

/// Generation-only snapshot (no line statuses).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemStateHL1 {
    pub nodal_demand: Vec<f64>,
    pub gen_status: Vec<bool>,
    pub hour: usize,
}

impl SystemStateHL2 {
    pub fn total_demand(&self) -> f64 {
        self.nodal_demand.iter().sum()
    }
}

impl SystemStateHL1 {
    pub fn total_demand(&self) -> f64 {
        self.nodal_demand.iter().sum()
    }
}

/// In service with probability `availability`.
pub fn sample_component_state(availability: f64, rng: &mut StreamRng) -> Result<bool, SamplingError> {
    if !(0.0..=1.0).contains(&availability) {
        return Err(SamplingError::Probability(availability));
    }
    Ok(bernoulli(availability, rng))
}

#[inline]
fn bernoulli(p: f64, rng: &mut StreamRng) -> bool {
    rng.random::<f64>() < p
}

fn draw_hour_and_generators(network: &NetworkDescription, rng: &mut StreamRng) -> (usize, Vec<f64>, Vec<bool>) {
    let hour = rng.random_range(0..network.demand.len());
    let total = network.demand[hour];
    let nodal_demand = network.weights.iter().map(|w| w * total).collect();
    let gen_status = network.generators.iter().map(|g| bernoulli(g.availability, rng)).collect();
    (hour, nodal_demand, gen_status)
}

/// Uniform hour of the demand trace, split over buses by the nodal weights;
/// generators and then lines are drawn independently at their availabilities.
pub fn sample_hl2_state(network: &NetworkDescription, rng: &mut StreamRng) -> SystemStateHL2 {
    let (hour, nodal_demand, gen_status) = draw_hour_and_generators(network, rng);
    let line_status = network.lines.iter().map(|l| bernoulli(l.availability, rng)).collect();
    SystemStateHL2 { nodal_demand, gen_status, line_status, hour }
}

/// Direct generation-only draw. Consumes the same leading draws as
/// [`sample_hl2_state`], so on a given stream it equals the projection of the
/// full state.
pub fn sample_hl1_state(network: &NetworkDescription, rng: &mut StreamRng) -> SystemStateHL1 {
    let (hour, nodal_demand, gen_status) = draw_hour_and_generators(network, rng);
    SystemStateHL1 { nodal_demand, gen_status, hour }
}

/// Drops the line statuses.
pub fn project_pattern1(upper: &SystemStateHL2) -> SystemStateHL1 {
    SystemStateHL1 {
        nodal_demand: upper.nodal_demand.clone(),
        gen_status: upper.gen_status.clone(),
        hour: upper.hour,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{Bus, Generator, Line};
    use crate::sampling::RngStream;

    fn toy(avail: f64) -> NetworkDescription {
        let buses = vec![Bus { id: 1, peak_load: 30.0 }, Bus { id: 2, peak_load: 70.0 }];
        let gens = (0..3)
            .map(|i| Generator { id: i, node: 0, unit_type: "U".into(), capacity: 40.0, availability: avail })
            .collect();
        let lines = vec![Line { id: 1, from: 0, to: 1, reactance: 0.1, rating: 50.0, availability: avail }];
        NetworkDescription::new("toy", buses, gens, lines, vec![10.0, 20.0, 30.0, 40.0]).unwrap()
    }

    #[test]
    fn certain_components() {
        let mut rng = RngStream::new(3).for_sample(0, 0);
        for _ in 0..1000 {
            assert!(sample_component_state(1.0, &mut rng).unwrap());
            assert!(!sample_component_state(0.0, &mut rng).unwrap());
        }
        assert!(sample_component_state(1.5, &mut rng).is_err());
        assert!(sample_component_state(-0.1, &mut rng).is_err());
    }

    #[test]
    fn component_frequency_within_binomial_bound() {
        let mut rng = RngStream::new(11).for_sample(0, 0);
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_component_state(0.9, &mut rng).unwrap()).count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.9).abs() < 3.0 * (0.09f64 / n as f64).sqrt());
    }

    #[test]
    fn fully_available_system() {
        let net = toy(1.0);
        let streams = RngStream::new(5);
        for i in 0..200 {
            let s = sample_hl2_state(&net, &mut streams.for_sample(1, i));
            assert!(s.gen_status.iter().all(|g| *g));
            assert!(s.line_status.iter().all(|l| *l));
            assert!((s.total_demand() - net.demand[s.hour]).abs() < 1e-12);
            assert!((s.nodal_demand[1] - 0.7 * net.demand[s.hour]).abs() < 1e-12);
        }
    }

    #[test]
    fn replay_gives_identical_state() {
        let net = toy(0.8);
        let a = sample_hl2_state(&net, &mut RngStream::new(9).for_sample(1, 42));
        let b = sample_hl2_state(&net, &mut RngStream::new(9).for_sample(1, 42));
        assert_eq!(a, b);
    }

    #[test]
    fn projection_keeps_demand_and_generators() {
        let net = toy(0.5);
        let streams = RngStream::new(1);
        for i in 0..100 {
            let up = sample_hl2_state(&net, &mut streams.for_sample(1, i));
            let lo = project_pattern1(&up);
            assert_eq!(lo.nodal_demand, up.nodal_demand);
            assert_eq!(lo.gen_status, up.gen_status);
            assert_eq!(lo.hour, up.hour);
            let direct = sample_hl1_state(&net, &mut streams.for_sample(1, i));
            assert_eq!(direct, lo);
            let mut flipped = up.clone();
            flipped.line_status[0] = !flipped.line_status[0];
            assert_eq!(project_pattern1(&flipped), lo);
        }
    }
}
