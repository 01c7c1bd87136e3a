//! Frequency-reuse coloring and uniform power: the classical baseline.

use super::feasibility::{project_onto_feasible, trim_to_carrier_caps};
use super::SolverError;
use crate::metrics::{plan_usc, AllocationPlan};
use crate::scenario::Scenario;

/// Greedy coloring: beams in index order take the color whose closest
/// same-colored beam is farthest away (an unused color counts as infinitely
/// far). Ties go to the lowest color.
pub fn greedy_coloring(s: &Scenario, n_colors: usize) -> Vec<usize> {
    let mut colors: Vec<usize> = Vec::with_capacity(s.num_beams());
    for l in 0..s.num_beams() {
        let mut best = (0, f64::NEG_INFINITY);
        for c in 0..n_colors {
            let nearest = colors
                .iter()
                .enumerate()
                .filter(|&(_, &cc)| cc == c)
                .map(|(m, _)| s.center_distance(l, m))
                .fold(f64::INFINITY, f64::min);
            if nearest > best.1 {
                best = (c, nearest);
            }
        }
        colors.push(best.0);
    }
    colors
}

/// Each beam gets the `K / n_colors` contiguous carriers of its color and
/// the power budget is split evenly over all used slots.
pub fn coloring_baseline(s: &Scenario, n_colors: usize) -> Result<AllocationPlan, SolverError> {
    let k = s.num_carriers();
    if n_colors == 0 || n_colors > k || k % n_colors != 0 {
        return Err(SolverError::InvalidColors {
            n_colors,
            carriers: k,
        });
    }
    let width = k / n_colors;
    let colors = greedy_coloring(s, n_colors);
    let mut plan = AllocationPlan::for_scenario(s);
    for (l, &c) in colors.iter().enumerate() {
        for carrier in c * width..(c + 1) * width {
            plan.set_assigned(carrier, l, true);
        }
    }
    trim_to_carrier_caps(s, &mut plan);
    let plan = uniform_power(&plan, s.total_power())?;
    if s.transponders().is_empty() {
        return Ok(plan);
    }
    let mut capped = plan.clone();
    project_onto_feasible(s, &mut capped, plan.powers());
    Ok(capped)
}

/// Equal power on every assigned slot, summing to `p_total`.
pub fn uniform_power(plan: &AllocationPlan, p_total: f64) -> Result<AllocationPlan, SolverError> {
    let slots = plan.assigned_count();
    if slots == 0 {
        return Err(SolverError::NoAssignedCarrier);
    }
    let share = p_total / slots as f64;
    let mut out = plan.clone();
    for k in 0..plan.num_carriers() {
        for l in 0..plan.num_beams() {
            out.set_power(k, l, if plan.assigned(k, l) { share } else { 0.0 });
        }
    }
    Ok(out)
}

/// Best coloring baseline over every color count that divides `K`.
pub fn best_coloring(s: &Scenario) -> AllocationPlan {
    let mut best: Option<(f64, AllocationPlan)> = None;
    for n in (1..=s.num_carriers()).filter(|n| s.num_carriers() % n == 0) {
        let Ok(plan) = coloring_baseline(s, n) else { continue };
        let v = plan_usc(s, &plan);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, plan));
        }
    }
    best.expect("a single color always divides K").1
}
