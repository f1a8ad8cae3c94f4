//! Composite-study checks on the bundled RTS data and small hand-built networks.

use std::path::Path;

use adequacy_mlmc::composite::{
    evaluate_hl2, Bus, Generator, IslandMethod, Line, NetworkDescription,
};
use adequacy_mlmc::sampling::{project_pattern1, sample_hl1_state, sample_hl2_state, RngStream, SystemStateHL2};

fn rts() -> NetworkDescription {
    NetworkDescription::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/rts/network.toml")).unwrap()
}

#[test]
fn rts_tables_match_published_totals() {
    let net = rts();
    assert_eq!(net.buses.len(), 24);
    assert_eq!(net.generators.len(), 32);
    assert_eq!(net.lines.len(), 38);
    assert_eq!(net.installed_capacity(), 3405.0);
    assert_eq!(net.buses.iter().map(|b| b.peak_load).sum::<f64>(), 2850.0);
    assert_eq!(net.demand.len(), 8760);
    let peak = net.demand.iter().copied().fold(0.0, f64::max);
    assert!((peak - 2850.0).abs() < 1e-9);
    let energy_gwh: f64 = net.demand.iter().sum::<f64>() / 1e3;
    assert!((energy_gwh - 15_347.3).abs() < 0.1, "{energy_gwh}");
}

#[test]
fn rts_demand_follows_percentage_tables() {
    // Peak times weekly, daily and hourly percentages. Day 1 is a Monday.
    let d = rts().demand;
    let hour = |week: usize, day: usize, h: usize| d[(week * 7 + day) * 24 + h];
    let close = |a: f64, b: f64| (a - b).abs() < 1e-4;
    // Week 1: 86.2 %; Monday 93 %; winter weekday hours 67 %, 63 %.
    assert!(close(hour(0, 0, 0), 2850.0 * 0.862 * 0.93 * 0.67));
    assert!(close(hour(0, 0, 1), 2850.0 * 0.862 * 0.93 * 0.63));
    // Saturday 77 %, winter weekend first hour 78 %.
    assert!(close(hour(0, 5, 0), 2850.0 * 0.862 * 0.77 * 0.78));
    // Week 51 Tuesday, 17:00 to 18:00: the annual peak.
    assert!(close(hour(50, 1, 17), 2850.0));
}

fn gen(id: u32, node: usize, capacity: f64) -> Generator {
    Generator { id, node, unit_type: "G".into(), capacity, availability: 0.9 }
}

fn line(id: u32, from: usize, to: usize, rating: f64) -> Line {
    Line { id, from, to, reactance: 0.1, rating, availability: 0.99 }
}

/// Three 3-bus rings joined by two weak ties (lines 9 and 10).
fn three_islands(tie_rating: f64) -> NetworkDescription {
    let buses: Vec<Bus> = (0..9).map(|i| Bus { id: i + 1, peak_load: [30.0, 50.0, 20.0][i as usize % 3] }).collect();
    let gens = vec![gen(1, 0, 60.0), gen(2, 1, 30.0), gen(3, 3, 120.0), gen(4, 6, 20.0), gen(5, 8, 25.0)];
    let mut lines = Vec::new();
    for k in 0..3 {
        let b = 3 * k;
        lines.push(line(lines.len() as u32 + 1, b, b + 1, 25.0));
        lines.push(line(lines.len() as u32 + 1, b + 1, b + 2, 15.0));
        lines.push(line(lines.len() as u32 + 1, b, b + 2, 40.0));
    }
    lines.push(line(10, 2, 3, tie_rating));
    lines.push(line(11, 5, 6, tie_rating));
    NetworkDescription::new("three islands", buses, gens, lines, vec![300.0]).unwrap()
}

fn state(net: &NetworkDescription, ties_up: bool) -> SystemStateHL2 {
    let total = 300.0;
    let mut line_status = vec![true; net.lines.len()];
    line_status[9] = ties_up;
    line_status[10] = ties_up;
    SystemStateHL2 {
        nodal_demand: net.weights.iter().map(|w| w * total).collect(),
        gen_status: vec![true; net.generators.len()],
        line_status,
        hour: 0,
    }
}

#[test]
fn islands_solved_separately_equal_the_joint_problem() {
    // Ties in service but with negligible capacity: one joint LP.
    let weak = three_islands(1e-9);
    let joint = evaluate_hl2(&weak, &state(&weak, true)).unwrap();
    assert_eq!(joint.islands.len(), 1);
    // Ties out of service: three islands solved one by one.
    let split = evaluate_hl2(&weak, &state(&weak, false)).unwrap();
    assert_eq!(split.islands.len(), 3);
    assert!((joint.total - split.total).abs() < 1e-6, "{} vs {}", joint.total, split.total);
    assert!(split.islands.iter().all(|i| matches!(i.method, IslandMethod::Lp { .. })));
    // With strong ties, sharing reduces curtailment.
    let strong = three_islands(500.0);
    let shared = evaluate_hl2(&strong, &state(&strong, true)).unwrap();
    assert!(shared.total < split.total - 1.0);
}

#[test]
fn projection_has_the_single_node_law() {
    // Two-sample Kolmogorov-Smirnov test on available capacity at the 1 % level.
    let net = rts();
    let n = 20_000u64;
    let capacity = |gens: &[bool]| -> f64 {
        net.generators.iter().zip(gens).filter(|(_, up)| **up).map(|(g, _)| g.capacity).sum()
    };
    let a_streams = RngStream::new(31);
    let b_streams = RngStream::new(32);
    let mut a: Vec<f64> =
        (0..n).map(|i| capacity(&project_pattern1(&sample_hl2_state(&net, &mut a_streams.for_sample(1, i))).gen_status)).collect();
    let mut b: Vec<f64> = (0..n).map(|i| capacity(&sample_hl1_state(&net, &mut b_streams.for_sample(0, i)).gen_status)).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
    }
    let critical = 1.628 * (2.0 / n as f64).sqrt();
    assert!(d < critical, "KS statistic {d} vs {critical}");
}

#[test]
fn successive_samples_are_uncorrelated() {
    let net = rts();
    let streams = RngStream::new(5);
    let n = 20_000u64;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let s = sample_hl2_state(&net, &mut streams.for_sample(1, i));
            // Available capacity minus demand: continuous and never degenerate.
            let cap: f64 = net.generators.iter().zip(&s.gen_status).filter(|(_, u)| **u).map(|(g, _)| g.capacity).sum();
            cap - s.total_demand()
        })
        .collect();
    let m = x.iter().sum::<f64>() / n as f64;
    let var: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    let lag1: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    let rho = lag1 / var;
    assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "lag-1 correlation {rho}");
}
