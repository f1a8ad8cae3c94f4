//! Net margin, storage dispatch policies and annual curtailment measures.
//!
//! Dispatch is in MW with consumption (charging) positive; every step is one
//! hour, so MW and MWh per step coincide.

use super::{StorageError, StorageUnit};
use crate::sampling::YearState;

/// `g + w - d`, hour by hour.
pub fn net_margin(year: &YearState) -> Result<Vec<f64>, StorageError> {
    let n = year.demand.len();
    if year.wind.len() != n || year.conventional.len() != n {
        return Err(StorageError::Length { expected: n, got: year.wind.len().min(year.conventional.len()) });
    }
    Ok((0..n).map(|t| year.conventional[t] + year.wind[t] - year.demand[t]).collect())
}

pub fn dispatch_none(margin: &[f64]) -> Vec<f64> {
    vec![0.0; margin.len()]
}

/// Units in decreasing time-to-go order, ties by index.
pub fn time_to_go_order(fleet: &[StorageUnit]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fleet.len()).collect();
    order.sort_by(|&a, &b| fleet[b].time_to_go().total_cmp(&fleet[a].time_to_go()).then(a.cmp(&b)));
    order
}

/// Per-unit record of a dispatch: power each hour and state of charge at the
/// end of each hour.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDispatch {
    pub unit: usize,
    pub power: Vec<f64>,
    pub soc: Vec<f64>,
}

fn greedy(margin: &[f64], fleet: &[StorageUnit], mut record: Option<&mut Vec<UnitDispatch>>) -> Vec<f64> {
    let n = margin.len();
    // Only hours with a shortfall in the original margin can have one after
    // earlier units act, so a full unit can jump straight to the next of them.
    let mut next_short = vec![n; n + 1];
    for t in (0..n).rev() {
        next_short[t] = if margin[t] < 0.0 { t } else { next_short[t + 1] };
    }
    let mut residual = margin.to_vec();
    let mut total = vec![0.0; n];
    for u in time_to_go_order(fleet) {
        let unit = &fleet[u];
        let mut soc = unit.initial_soc;
        let mut trace = record.as_ref().map(|_| UnitDispatch {
            unit: u,
            power: Vec::with_capacity(n),
            soc: Vec::with_capacity(n),
        });
        let mut t = 0;
        while t < n {
            if soc >= unit.e_bar {
                let jump = next_short[t];
                if let Some(tr) = trace.as_mut() {
                    tr.power.resize(jump, 0.0);
                    tr.soc.resize(jump, soc);
                }
                t = jump;
                if t == n {
                    break;
                }
            }
            let r = residual[t];
            let s = if r < 0.0 {
                -unit.p_bar.min(soc).min(-r)
            } else if r > 0.0 {
                unit.p_bar.min(unit.e_bar - soc).min(r)
            } else {
                0.0
            };
            soc = (soc + s).clamp(0.0, unit.e_bar);
            residual[t] -= s;
            total[t] += s;
            if let Some(tr) = trace.as_mut() {
                tr.power.push(s);
                tr.soc.push(soc);
            }
            t += 1;
        }
        if let (Some(rec), Some(tr)) = (record.as_mut(), trace) {
            rec.push(tr);
        }
    }
    total
}

/// Sequential greedy dispatch: units in decreasing time-to-go order each make
/// one pass over the margin left by the units before them, charging whenever
/// there is surplus and discharging only to cover a shortfall.
pub fn dispatch_greedy(margin: &[f64], fleet: &[StorageUnit]) -> Vec<f64> {
    greedy(margin, fleet, None)
}

pub fn dispatch_greedy_detailed(margin: &[f64], fleet: &[StorageUnit]) -> (Vec<f64>, Vec<UnitDispatch>) {
    let mut rec = Vec::new();
    let total = greedy(margin, fleet, Some(&mut rec));
    (total, rec)
}

/// Splits `target` over units as `clamp(f(level), 0, cap)` with `f`
/// monotone in `level`, choosing the level so the parts sum to `target`.
/// `increasing` tells the direction of `f`; `[lo, hi]` must bracket the level.
fn water_fill(
    target: f64,
    caps: &[f64],
    part: impl Fn(usize, f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    increasing: bool,
    out: &mut [f64],
) {
    let sum_at = |level: f64| -> f64 { (0..caps.len()).map(|i| part(i, level).clamp(0.0, caps[i])).sum() };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let below = sum_at(mid) < target;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Interpolate between the bracketing levels: each part stays between two
    // feasible values and the sum hits the target.
    let (a, b) = if increasing { (lo, hi) } else { (hi, lo) };
    let (sa, sb) = (sum_at(a), sum_at(b));
    let theta = if sb > sa { ((target - sa) / (sb - sa)).clamp(0.0, 1.0) } else { 0.0 };
    for (i, o) in out.iter_mut().enumerate() {
        let pa = part(i, a).clamp(0.0, caps[i]);
        let pb = part(i, b).clamp(0.0, caps[i]);
        *o = pa + theta * (pb - pa);
    }
}

fn optimal(margin: &[f64], fleet: &[StorageUnit], mut record: Option<&mut Vec<UnitDispatch>>) -> Vec<f64> {
    let k = fleet.len();
    let mut soc: Vec<f64> = fleet.iter().map(|u| u.initial_soc).collect();
    let mut caps = vec![0.0; k];
    let mut step = vec![0.0; k];
    let mut total = vec![0.0; margin.len()];
    if let Some(rec) = record.as_mut() {
        rec.clear();
        for u in 0..k {
            rec.push(UnitDispatch { unit: u, power: Vec::with_capacity(margin.len()), soc: Vec::with_capacity(margin.len()) });
        }
    }
    for (t, &r) in margin.iter().enumerate() {
        step.fill(0.0);
        if r < 0.0 {
            for (c, (u, s)) in caps.iter_mut().zip(fleet.iter().zip(&soc)) {
                *c = u.p_bar.min(*s);
            }
            let avail: f64 = caps.iter().sum();
            let need = (-r).min(avail);
            if need >= avail {
                step.copy_from_slice(&caps);
            } else if need > 0.0 {
                // Discharge the units with the most time to go first, down to
                // a common remaining time-to-go.
                let top = fleet.iter().zip(&soc).map(|(u, s)| s / u.p_bar).fold(0.0, f64::max);
                water_fill(need, &caps, |i, level| soc[i] - level * fleet[i].p_bar, 0.0, top, false, &mut step);
            }
            for ((s, d), u) in soc.iter_mut().zip(&step).zip(fleet) {
                *s = (*s - d).clamp(0.0, u.e_bar);
            }
            total[t] = -step.iter().sum::<f64>();
            for d in step.iter_mut() {
                *d = -*d;
            }
        } else if r > 0.0 {
            for (c, (u, s)) in caps.iter_mut().zip(fleet.iter().zip(&soc)) {
                *c = u.p_bar.min(u.e_bar - s).max(0.0);
            }
            let room: f64 = caps.iter().sum();
            let take = r.min(room);
            if take >= room {
                step.copy_from_slice(&caps);
            } else if take > 0.0 {
                // Charge the units with the least time to go first.
                let top = fleet.iter().map(|u| u.e_bar / u.p_bar).fold(0.0, f64::max) + 1.0;
                water_fill(take, &caps, |i, level| level * fleet[i].p_bar - soc[i], 0.0, top, true, &mut step);
            }
            for ((s, c), u) in soc.iter_mut().zip(&step).zip(fleet) {
                *s = (*s + c).clamp(0.0, u.e_bar);
            }
            total[t] = step.iter().sum();
        }
        if let Some(rec) = record.as_mut() {
            for ((d, s), p) in rec.iter_mut().zip(&soc).zip(&step) {
                d.power.push(*p);
                d.soc.push(*s);
            }
        }
    }
    total
}

/// Fleet-coordinated dispatch. Each hour the fleet covers as much shortfall
/// as its power allows, drawing from the units with the most remaining time
/// to go so that the fleet's ability to cover long future shortfalls is kept;
/// surplus charges the units with the least time to go first. Allocation
/// levels are continuous, so equal units are treated symmetrically.
pub fn dispatch_optimal(margin: &[f64], fleet: &[StorageUnit]) -> Vec<f64> {
    optimal(margin, fleet, None)
}

pub fn dispatch_optimal_detailed(margin: &[f64], fleet: &[StorageUnit]) -> (Vec<f64>, Vec<UnitDispatch>) {
    let mut rec = Vec::new();
    let total = optimal(margin, fleet, Some(&mut rec));
    (total, rec)
}

/// Repeats the 24-hour pattern over `hours`: hour `t` (zero-based) uses
/// `pattern[t % 24]`.
pub fn dispatch_average(hours: usize, pattern: &[f64]) -> Vec<f64> {
    (0..hours).map(|t| pattern[t % pattern.len()]).collect()
}

/// `max(0, S - M)`, hour by hour.
pub fn curtail_trace(margin: &[f64], dispatch: &[f64]) -> Result<Vec<f64>, StorageError> {
    if margin.len() != dispatch.len() {
        return Err(StorageError::Length { expected: margin.len(), got: dispatch.len() });
    }
    Ok(margin.iter().zip(dispatch).map(|(m, s)| (s - m).max(0.0)).collect())
}

/// `[hours with curtailment, curtailed MWh]`.
pub fn measure_outputs_annual(curtailment: &[f64]) -> [f64; 2] {
    let mut out = [0.0, 0.0];
    for &c in curtailment {
        if c > 0.0 {
            out[0] += 1.0;
            out[1] += c;
        }
    }
    out
}
