//! Projection of power matrices onto the feasible set.
//!
//! The set is `{p >= 0, p = 0 off-assignment, sum p <= P_total,
//! per-transponder sum <= P_t}`. Transponders partition the beams, so the
//! Euclidean projection is `p_i = (v_i - max(lambda, tau_t))^+` with `tau_t`
//! the group's own simplex threshold and `lambda` the global one.

use crate::metrics::AllocationPlan;
use crate::scenario::Scenario;

/// Threshold `tau >= 0` such that `sum (v - tau)^+ <= budget`, tight when
/// the unthresholded sum exceeds the budget.
fn simplex_threshold(values: &[f64], budget: f64) -> f64 {
    let total: f64 = values.iter().map(|v| v.max(0.0)).sum();
    if total <= budget {
        return 0.0;
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - budget) / (i + 1) as f64;
        if t < v {
            tau = t;
        } else {
            break;
        }
    }
    tau.max(0.0)
}

/// Projects `values` (carrier-major, one per slot) onto the feasible set for
/// the assignment of `plan`, writing the result into the plan's powers.
pub(crate) fn project_onto_feasible(s: &Scenario, plan: &mut AllocationPlan, values: &[f64]) {
    let beams = s.num_beams();
    let carriers = s.num_carriers();
    let groups = s.transponders().len();
    let v: Vec<f64> = (0..carriers * beams)
        .map(|i| if plan.assignment()[i] { values[i].max(0.0) } else { 0.0 })
        .collect();
    let group_of = |i: usize| s.transponder_of(i % beams);

    let mut tau = vec![0.0; groups];
    for (t, tr) in s.transponders().iter().enumerate() {
        let members: Vec<f64> = (0..v.len()).filter(|&i| group_of(i) == Some(t)).map(|i| v[i]).collect();
        tau[t] = simplex_threshold(&members, tr.p_cap_w);
    }
    let shifted = |lambda: f64, i: usize| -> f64 {
        let floor = group_of(i).map_or(lambda, |t| lambda.max(tau[t]));
        (v[i] - floor).max(0.0)
    };
    let total_at = |lambda: f64| -> f64 { (0..v.len()).map(|i| shifted(lambda, i)).sum() };

    let budget = s.total_power();
    let mut lambda = 0.0;
    if total_at(0.0) > budget {
        let (mut lo, mut hi) = (0.0, v.iter().copied().fold(0.0, f64::max));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total_at(mid) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lambda = hi;
    }
    let p = plan.powers_mut();
    for (i, out) in p.iter_mut().enumerate() {
        *out = shifted(lambda, i);
    }
    clamp_budgets(s, plan);
}

/// Scales groups (then the whole plan) down to absorb rounding overshoot.
pub(crate) fn clamp_budgets(s: &Scenario, plan: &mut AllocationPlan) {
    let beams = s.num_beams();
    for (t, tr) in s.transponders().iter().enumerate() {
        let in_group = |i: usize| s.transponder_of(i % beams) == Some(t);
        let sum: f64 = plan.powers().iter().enumerate().filter(|(i, _)| in_group(*i)).map(|(_, p)| p).sum();
        if sum > tr.p_cap_w {
            let f = tr.p_cap_w / sum;
            for (i, p) in plan.powers_mut().iter_mut().enumerate() {
                if in_group(i) {
                    *p *= f;
                }
            }
        }
    }
    let sum = plan.total_power();
    if sum > s.total_power() {
        let f = s.total_power() / sum;
        plan.powers_mut().iter_mut().for_each(|p| *p *= f);
    }
}

/// Drops assignments so every transponder respects its carrier-slot cap,
/// removing the highest carrier of the highest beam first.
pub(crate) fn trim_to_carrier_caps(s: &Scenario, plan: &mut AllocationPlan) {
    for (t, tr) in s.transponders().iter().enumerate() {
        let members: Vec<usize> = (0..s.num_beams()).filter(|&l| s.transponder_of(l) == Some(t)).collect();
        let mut used: usize = members
            .iter()
            .map(|&l| (0..s.num_carriers()).filter(|&k| plan.assigned(k, l)).count())
            .sum();
        'trim: while used > tr.k_cap {
            for k in (0..s.num_carriers()).rev() {
                for &l in members.iter().rev() {
                    if plan.assigned(k, l) {
                        plan.set_assigned(k, l, false);
                        plan.set_power(k, l, 0.0);
                        used -= 1;
                        continue 'trim;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ScenarioDoc, TransponderDoc};

    #[test]
    fn simplex_threshold_projects() {
        assert_eq!(simplex_threshold(&[1.0, 1.0], 3.0), 0.0);
        let tau = simplex_threshold(&[3.0, 1.0], 2.0);
        assert!((tau - 1.0).abs() < 1e-12);
        let tau = simplex_threshold(&[3.0, 2.0, 1.0], 3.0);
        assert!((tau - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_respects_transponder_caps() {
        let mut doc = ScenarioDoc::from_gains(
            vec![vec![1.0, 0.1, 0.1], vec![0.1, 1.0, 0.1], vec![0.1, 0.1, 1.0]],
            vec![1.0; 3],
            1.0,
            2.0,
            2,
            6.0,
        );
        doc.power.transponders = vec![
            TransponderDoc {
                id: 0,
                p_cap_w: 1.0,
                k_cap: 4,
            },
            TransponderDoc {
                id: 1,
                p_cap_w: 6.0,
                k_cap: 2,
            },
        ];
        doc.beams[0].transponder = Some(0);
        doc.beams[1].transponder = Some(0);
        doc.beams[2].transponder = Some(1);
        let s = Scenario::from_doc(&doc).unwrap();
        let mut plan = AllocationPlan::for_scenario(&s);
        for k in 0..2 {
            for l in 0..3 {
                plan.set_assigned(k, l, true);
            }
        }
        project_onto_feasible(&s, &mut plan, &[4.0; 6]);
        plan.validate(&s).unwrap();
        let group0: f64 = (0..2).flat_map(|k| (0..2).map(move |l| (k, l))).map(|(k, l)| plan.power(k, l)).sum();
        assert!((group0 - 1.0).abs() < 1e-9);
        assert!((plan.total_power() - 6.0).abs() < 1e-9);
        // beam 2 takes the remaining 5 W split evenly
        assert!((plan.power(0, 2) - 2.5).abs() < 1e-9);
    }
}
