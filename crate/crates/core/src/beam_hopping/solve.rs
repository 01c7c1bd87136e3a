//! Dwell-time design: LP relaxation, rounding, exhaustive oracle and the
//! demand-proportional baseline.

use std::cmp::Ordering;

use super::{capacities, eta_of, BhError, SnapshotSet, Window};
use crate::simplex;

pub const BRUTE_FORCE_MAX_SNAPSHOTS: usize = 5;
pub const BRUTE_FORCE_MAX_SLOTS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRelaxation {
    /// Continuous slot counts summing to the window length.
    pub t: Vec<f64>,
    pub eta: f64,
}

fn check_demands(ss: &SnapshotSet, demands: &[f64]) -> Result<(), BhError> {
    if ss.is_empty() {
        return Err(BhError::NoSnapshots);
    }
    if demands.len() != ss.num_beams() {
        return Err(BhError::Shape(format!("{} demands for {} beams", demands.len(), ss.num_beams())));
    }
    if demands.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(BhError::Shape("demands must be finite and non-negative".into()));
    }
    if !demands.iter().any(|&d| d > 0.0) {
        return Err(BhError::Shape("no beam has positive demand".into()));
    }
    Ok(())
}

/// Solves `max eta` s.t. `C_l / D_l >= eta` for every demanded beam and
/// `sum_g t_g = N_s`, `t >= 0`, with `t` continuous.
pub fn lp_relax(ss: &SnapshotSet, demands: &[f64], window: Window) -> Result<LpRelaxation, BhError> {
    check_demands(ss, demands)?;
    let g_count = ss.len();
    let slots = window.slots as f64;
    let demanded: Vec<usize> = (0..demands.len()).filter(|&l| demands[l] > 0.0).collect();
    // Work with fractions u_g = t_g / N_s and ratios scaled to at most one.
    let scale = demanded
        .iter()
        .flat_map(|&l| (0..g_count).map(move |g| (l, g)))
        .map(|(l, g)| ss.rate(l, g) / demands[l])
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(LpRelaxation { t: vec![slots / g_count as f64; g_count], eta: 0.0 });
    }
    let mut a = Vec::with_capacity(demanded.len() + 1);
    for &l in &demanded {
        let mut row: Vec<f64> = (0..g_count).map(|g| -ss.rate(l, g) / (demands[l] * scale)).collect();
        row.push(1.0);
        a.push(row);
    }
    let mut budget = vec![1.0; g_count];
    budget.push(0.0);
    a.push(budget);
    let mut b = vec![0.0; demanded.len()];
    b.push(1.0);
    let mut c = vec![0.0; g_count];
    c.push(1.0);
    let sol = simplex::maximize(&c, &a, &b)?;
    let u = &sol.x[..g_count];
    let used: f64 = u.iter().sum();
    let t = if used > 0.0 {
        u.iter().map(|v| v / used * slots).collect()
    } else {
        vec![slots / g_count as f64; g_count]
    };
    Ok(LpRelaxation { t, eta: sol.objective * scale })
}

/// Rounds non-negative `values` to integers summing to `total`: floors first,
/// then one extra unit to the largest fractional parts, lower index first on
/// ties. Values are rescaled to sum to `total` before rounding.
pub fn largest_remainder(values: &[f64], total: usize) -> Vec<usize> {
    if values.is_empty() {
        return Vec::new();
    }
    let clean: Vec<f64> = values.iter().map(|v| if v.is_finite() { v.max(0.0) } else { 0.0 }).collect();
    let sum: f64 = clean.iter().sum();
    let scaled: Vec<f64> = if sum > 0.0 {
        clean.iter().map(|v| v / sum * total as f64).collect()
    } else {
        vec![total as f64 / values.len() as f64; values.len()]
    };
    let snapped: Vec<f64> = scaled
        .iter()
        .map(|&v| if (v - v.round()).abs() < 1e-9 { v.round() } else { v })
        .collect();
    let mut out: Vec<usize> = snapped.iter().map(|v| v.floor() as usize).collect();
    let mut assigned: usize = out.iter().sum();
    while assigned > total {
        let i = (0..out.len()).rev().find(|&i| out[i] > 0).expect("positive entry");
        out[i] -= 1;
        assigned -= 1;
    }
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = snapped[a] - snapped[a].floor();
        let fb = snapped[b] - snapped[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total - assigned) {
        out[i] += 1;
    }
    out
}

/// Demand ratios of the demanded beams, ascending.
fn leximin_key(capacity: &[f64], demands: &[f64]) -> Vec<f64> {
    let mut key: Vec<f64> = capacity
        .iter()
        .zip(demands)
        .filter(|(_, &d)| d > 0.0)
        .map(|(c, d)| c / d)
        .collect();
    key.sort_by(f64::total_cmp);
    key
}

fn leximin_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let tol = 1e-12 * x.abs().max(y.abs());
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    Ordering::Equal
}

/// Integer dwell counts from a continuous solution: largest-remainder
/// rounding, then single-slot transfers between snapshots while the sorted
/// vector of demand ratios improves lexicographically (which first of all
/// raises the minimum). The best transfer is taken each step; ties go to the
/// lower source and then the lower target snapshot.
pub fn round_dwell(ss: &SnapshotSet, demands: &[f64], t: &[f64], slots: usize) -> Result<Vec<usize>, BhError> {
    check_demands(ss, demands)?;
    if t.len() != ss.len() {
        return Err(BhError::Shape(format!("{} dwell values for {} snapshots", t.len(), ss.len())));
    }
    if slots == 0 {
        return Err(BhError::InvalidWindow { field: "slots" });
    }
    let mut current = largest_remainder(t, slots);
    let mut capacity = capacities(ss, &current, slots);
    let mut key = leximin_key(&capacity, demands);
    let step = 1.0 / slots as f64;
    loop {
        let mut best: Option<(usize, usize, Vec<f64>, Vec<f64>)> = None;
        for from in 0..current.len() {
            if current[from] == 0 {
                continue;
            }
            for to in 0..current.len() {
                if to == from {
                    continue;
                }
                let moved: Vec<f64> = capacity
                    .iter()
                    .zip(ss.rates(from).iter().zip(ss.rates(to)))
                    .map(|(c, (rf, rt))| c + step * (rt - rf))
                    .collect();
                let k = leximin_key(&moved, demands);
                let reference = best.as_ref().map_or(&key, |b| &b.3);
                if leximin_cmp(&k, reference) == Ordering::Greater {
                    best = Some((from, to, moved, k));
                }
            }
        }
        let Some((from, to, moved, k)) = best else { break };
        current[from] -= 1;
        current[to] += 1;
        capacity = moved;
        key = k;
    }
    Ok(current)
}

/// Exhaustive search over all compositions of `slots` into one part per
/// snapshot. Maximizes `eta`; ties keep the lexicographically smallest `t`.
pub fn bh_brute_force(ss: &SnapshotSet, demands: &[f64], slots: usize) -> Result<Vec<usize>, BhError> {
    check_demands(ss, demands)?;
    if ss.len() > BRUTE_FORCE_MAX_SNAPSHOTS || slots > BRUTE_FORCE_MAX_SLOTS {
        return Err(BhError::TooLarge(format!(
            "brute force allows at most {BRUTE_FORCE_MAX_SNAPSHOTS} snapshots and {BRUTE_FORCE_MAX_SLOTS} slots, got {} and {slots}",
            ss.len()
        )));
    }
    if slots == 0 {
        return Err(BhError::InvalidWindow { field: "slots" });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut t = vec![0; ss.len()];
    compositions(&mut t, 0, slots, &mut |t| {
        let eta = eta_of(&capacities(ss, t, slots), demands);
        let better = match &best {
            None => true,
            Some((b, _)) => eta > b + 1e-12 * b.abs(),
        };
        if better {
            best = Some((eta, t.to_vec()));
        }
    });
    Ok(best.expect("at least one composition").1)
}

/// Calls `visit` on every composition of `left` into `t[index..]`, in
/// lexicographic order.
fn compositions(t: &mut [usize], index: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
    if index + 1 == t.len() {
        t[index] = left;
        visit(t);
        return;
    }
    for v in 0..=left {
        t[index] = v;
        compositions(t, index + 1, left - v, visit);
    }
    t[index] = 0;
}

/// Single-beam snapshots lit for a share of the window proportional to
/// demand, rounded by largest remainder.
pub fn proportional_baseline(ss: &SnapshotSet, demands: &[f64], slots: usize) -> Result<Vec<usize>, BhError> {
    check_demands(ss, demands)?;
    if slots == 0 {
        return Err(BhError::InvalidWindow { field: "slots" });
    }
    let mut owners = Vec::new();
    let mut weights = Vec::new();
    for (beam, &d) in demands.iter().enumerate() {
        if d > 0.0 {
            owners.push(ss.single_beam(beam).ok_or(BhError::MissingSingleBeamSnapshot { beam })?);
            weights.push(d);
        }
    }
    let shares = largest_remainder(&weights, slots);
    let mut t = vec![0; ss.len()];
    for (g, share) in owners.into_iter().zip(shares) {
        t[g] += share;
    }
    Ok(t)
}
