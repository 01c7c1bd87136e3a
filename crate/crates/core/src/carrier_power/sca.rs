//! Successive convex approximation of the power allocation at fixed carriers.
//!
//! Each step freezes every SINR denominator at the current iterate. The
//! surrogate `sum_l min(sum_k B_c log2(1 + a_lk p_lk), D_l)` is concave and
//! separable, and its exact maximizer is a capped water-filling: one water
//! level shared by all beams, each beam capped at the level that meets its
//! demand, each transponder capped at the level that spends its budget. The
//! move toward that maximizer is halved until the true USC does not drop, so
//! the objective sequence is non-decreasing.

use super::feasibility::clamp_budgets;
use super::waterfill::{demand_level, level_for_budget, Channel};
use super::{SolverError, SolverOptions};
use crate::metrics::{plan_usc, AllocationPlan};
use crate::scenario::Scenario;

#[derive(Debug, Clone)]
pub struct ScaOutcome {
    pub plan: AllocationPlan,
    /// True USC of every accepted iterate, starting with the initial point.
    pub history: Vec<f64>,
}

const MAX_STEP_HALVINGS: usize = 40;

pub fn sca_power(
    s: &Scenario,
    init: &AllocationPlan,
    opts: &SolverOptions,
) -> Result<ScaOutcome, SolverError> {
    opts.validate()?;
    init.validate(s)?;
    let mut current = init.clone();
    let mut value = plan_usc(s, &current);
    let mut history = vec![value];
    for _ in 0..opts.sca_max_iters {
        if value >= 0.0 {
            break;
        }
        let target = surrogate_maximizer(s, &current);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_STEP_HALVINGS {
            let mut cand = current.clone();
            for (p, (&from, &to)) in cand
                .powers_mut()
                .iter_mut()
                .zip(current.powers().iter().zip(&target))
            {
                *p = (from + step * (to - from)).max(0.0);
            }
            clamp_budgets(s, &mut cand);
            let v = plan_usc(s, &cand);
            if v >= value {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, v)) = accepted else { break };
        let gain = v - value;
        if gain > 0.0 {
            current = cand;
            value = v;
            history.push(v);
        }
        if gain <= opts.sca_tolerance * value.abs() {
            break;
        }
    }
    Ok(ScaOutcome {
        plan: current,
        history,
    })
}

/// Maximizer of the interference-frozen surrogate around `plan`.
pub(crate) fn surrogate_maximizer(s: &Scenario, plan: &AllocationPlan) -> Vec<f64> {
    let beams = s.num_beams();
    let carriers = s.num_carriers();
    let bc = s.carrier_width();

    // per-slot SNR-per-watt with interference frozen at the current powers
    let mut slope = vec![0.0; carriers * beams];
    for k in 0..carriers {
        for l in 0..beams {
            if !plan.assigned(k, l) {
                continue;
            }
            let interference: f64 = (0..beams)
                .filter(|&m| m != l)
                .map(|m| s.gain(l, m) * plan.tx_power(k, m))
                .sum();
            slope[k * beams + l] = s.gain(l, l) / (interference + s.noise(l));
        }
    }

    let mut channels = vec![
        Channel {
            floor: f64::INFINITY,
            ceiling: 0.0,
        };
        carriers * beams
    ];
    for l in 0..beams {
        let gains: Vec<f64> = (0..carriers).map(|k| slope[k * beams + l]).collect();
        let ceiling = demand_level(&gains, s.demand(l) / bc);
        for k in 0..carriers {
            let a = slope[k * beams + l];
            if a > 0.0 {
                channels[k * beams + l] = Channel {
                    floor: 1.0 / a,
                    ceiling,
                };
            }
        }
    }

    for (t, tr) in s.transponders().iter().enumerate() {
        let members: Vec<usize> = (0..channels.len())
            .filter(|&i| s.transponder_of(i % beams) == Some(t))
            .collect();
        let group: Vec<Channel> = members.iter().map(|&i| channels[i]).collect();
        let cap = level_for_budget(&group, tr.p_cap_w);
        for &i in &members {
            channels[i].ceiling = channels[i].ceiling.min(cap);
        }
    }

    let level = level_for_budget(&channels, s.total_power());
    channels.iter().map(|c| c.power_at(level)).collect()
}
