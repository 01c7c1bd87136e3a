//! Carrier assignment at fixed (probe) powers.
//!
//! Slots that already carry power keep it as their probe; a new slot is
//! probed at its beam's mean power, or the plan-wide mean when the beam has
//! none. The returned plan holds the new assignment and those probes
//! projected onto the feasible set, ready for `sca_power`.

use super::feasibility::project_onto_feasible;
use super::hungarian::max_weight_assignment;
use super::RelaxationMode;
use crate::metrics::{plan_usc, AllocationPlan};
use crate::scenario::Scenario;

pub fn assign_carriers(s: &Scenario, current: &AllocationPlan, mode: RelaxationMode) -> AllocationPlan {
    let probe = probe_powers(s, current);
    let assignment = match mode {
        RelaxationMode::BinaryHungarian => hungarian_rounds(s, &probe),
        RelaxationMode::ContinuousRelaxRound => relax_and_round(s, &probe),
    };
    let mut plan = AllocationPlan::from_parts(
        s.num_carriers(),
        s.num_beams(),
        assignment,
        vec![0.0; s.num_carriers() * s.num_beams()],
    );
    project_onto_feasible(s, &mut plan, &probe);
    plan
}

fn probe_powers(s: &Scenario, plan: &AllocationPlan) -> Vec<f64> {
    let (carriers, beams) = (s.num_carriers(), s.num_beams());
    let positive: Vec<f64> = plan.powers().iter().copied().filter(|&p| p > 0.0).collect();
    let global = if positive.is_empty() {
        s.total_power() / (carriers * beams) as f64
    } else {
        positive.iter().sum::<f64>() / positive.len() as f64
    };
    let beam_mean: Vec<f64> = (0..beams)
        .map(|l| {
            let ps: Vec<f64> = (0..carriers).map(|k| plan.power(k, l)).filter(|&p| p > 0.0).collect();
            if ps.is_empty() {
                global
            } else {
                ps.iter().sum::<f64>() / ps.len() as f64
            }
        })
        .collect();
    (0..carriers * beams)
        .map(|i| {
            let p = plan.powers()[i];
            if p > 0.0 {
                p
            } else {
                beam_mean[i % beams]
            }
        })
        .collect()
}

/// Incremental USC bookkeeping for an assignment grown one slot at a time.
struct Growth<'a> {
    s: &'a Scenario,
    probe: &'a [f64],
    tx: Vec<f64>,
    capacity: Vec<f64>,
    transponder_slots: Vec<usize>,
}

impl<'a> Growth<'a> {
    fn new(s: &'a Scenario, probe: &'a [f64]) -> Self {
        Growth {
            s,
            probe,
            tx: vec![0.0; probe.len()],
            capacity: vec![0.0; s.num_beams()],
            transponder_slots: vec![0; s.transponders().len()],
        }
    }

    fn beams(&self) -> usize {
        self.s.num_beams()
    }

    fn assigned(&self, k: usize, l: usize) -> bool {
        self.tx[k * self.beams() + l] > 0.0
    }

    fn allowed(&self, k: usize, l: usize) -> bool {
        if self.assigned(k, l) || self.s.demand(l) <= 0.0 || self.s.gain(l, l) <= 0.0 {
            return false;
        }
        match self.s.transponder_of(l) {
            Some(t) => self.transponder_slots[t] < self.s.transponders()[t].k_cap,
            None => true,
        }
    }

    fn rate(&self, k: usize, m: usize, extra: Option<(usize, f64)>) -> f64 {
        let beams = self.beams();
        let own = match extra {
            Some((l, p)) if l == m => p,
            _ => self.tx[k * beams + m],
        };
        if own <= 0.0 {
            return 0.0;
        }
        let mut interference = self.s.noise(m);
        for j in (0..beams).filter(|&j| j != m) {
            let p = match extra {
                Some((l, p)) if l == j => p,
                _ => self.tx[k * beams + j],
            };
            interference += self.s.gain(m, j) * p;
        }
        self.s.carrier_width() * (self.s.gain(m, m) * own / interference).log2_1p()
    }

    /// USC change caused by switching on slot `(k, l)` at its probe power.
    fn gain(&self, k: usize, l: usize) -> f64 {
        let p = self.probe[k * self.beams() + l];
        let mut delta = 0.0;
        for m in 0..self.beams() {
            if m != l && !self.assigned(k, m) {
                continue;
            }
            let change = self.rate(k, m, Some((l, p))) - self.rate(k, m, None);
            let d = self.s.demand(m);
            delta += (self.capacity[m] + change - d).min(0.0) - (self.capacity[m] - d).min(0.0);
        }
        delta
    }

    fn add(&mut self, k: usize, l: usize) {
        let beams = self.beams();
        let before: Vec<f64> = (0..beams).map(|m| self.rate(k, m, None)).collect();
        self.tx[k * beams + l] = self.probe[k * beams + l];
        for (m, b) in before.iter().enumerate() {
            self.capacity[m] += self.rate(k, m, None) - b;
        }
        if let Some(t) = self.s.transponder_of(l) {
            self.transponder_slots[t] += 1;
        }
    }

    fn assignment(&self) -> Vec<bool> {
        self.tx.iter().map(|&p| p > 0.0).collect()
    }
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

fn significance(s: &Scenario) -> f64 {
    1e-12 * s.demands().iter().sum::<f64>().max(1.0)
}

/// Rounds of rectangular assignment: each round matches carriers to beams on
/// marginal USC gain and keeps the matched pairs that still pay off once
/// applied in descending order.
fn hungarian_rounds(s: &Scenario, probe: &[f64]) -> Vec<bool> {
    let (carriers, beams) = (s.num_carriers(), s.num_beams());
    let eps = significance(s);
    let mut state = Growth::new(s, probe);
    loop {
        let mut utility = vec![vec![0.0; beams]; carriers];
        let mut allowed = vec![vec![false; beams]; carriers];
        let mut positive_sum = 0.0;
        for k in 0..carriers {
            for l in 0..beams {
                if state.allowed(k, l) {
                    allowed[k][l] = true;
                    let g = state.gain(k, l).max(0.0);
                    utility[k][l] = g;
                    positive_sum += g;
                }
            }
        }
        if positive_sum <= eps {
            break;
        }
        let forbidden = -(1.0 + positive_sum);
        for k in 0..carriers {
            for l in 0..beams {
                if !allowed[k][l] {
                    utility[k][l] = forbidden;
                }
            }
        }
        let mut picks: Vec<(f64, usize, usize)> = max_weight_assignment(&utility)
            .into_iter()
            .enumerate()
            .filter_map(|(k, l)| l.map(|l| (utility[k][l], k, l)))
            .filter(|&(u, k, l)| allowed[k][l] && u > eps)
            .collect();
        picks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)).then(a.1.cmp(&b.1)));
        let mut applied = 0;
        for (_, k, l) in picks {
            if state.allowed(k, l) && state.gain(k, l) > eps {
                state.add(k, l);
                applied += 1;
            }
        }
        if applied == 0 {
            break;
        }
    }
    state.assignment()
}

const RELAX_ITERS: usize = 200;

/// Projected-gradient ascent on the box relaxation `0 <= x <= 1` (transmit
/// power `probe * x`), then rounding by descending fractional value.
fn relax_and_round(s: &Scenario, probe: &[f64]) -> Vec<bool> {
    let (carriers, beams) = (s.num_carriers(), s.num_beams());
    let eligible: Vec<bool> = (0..carriers * beams)
        .map(|i| s.demand(i % beams) > 0.0 && s.gain(i % beams, i % beams) > 0.0)
        .collect();
    let mut x: Vec<f64> = eligible.iter().map(|&e| if e { 1.0 } else { 0.0 }).collect();
    let objective = |x: &[f64]| -> f64 {
        let assigned = x.iter().map(|&v| v > 0.0).collect();
        let p = x.iter().zip(probe).map(|(v, q)| v * q).collect();
        plan_usc(s, &AllocationPlan::from_parts(carriers, beams, assigned, p))
    };
    let mut value = objective(&x);
    for _ in 0..RELAX_ITERS {
        let grad = relaxed_gradient(s, probe, &x, &eligible);
        let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if scale == 0.0 {
            break;
        }
        let mut step = 1.0 / scale;
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = x
                .iter()
                .zip(&grad)
                .zip(&eligible)
                .map(|((v, g), &e)| if e { (v + step * g).clamp(0.0, 1.0) } else { 0.0 })
                .collect();
            let ascent: f64 = cand.iter().zip(&x).zip(&grad).map(|((c, v), g)| (c - v) * g).sum();
            let v = objective(&cand);
            if ascent > 0.0 && v >= value + 1e-4 * ascent {
                x = cand;
                value = v;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }

    let mut order: Vec<usize> = (0..x.len()).filter(|&i| eligible[i] && x[i] >= 0.5).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then((a % beams).cmp(&(b % beams))).then(a.cmp(&b)));
    let mut slots = vec![0usize; s.transponders().len()];
    let mut out = vec![false; x.len()];
    for i in order {
        if let Some(t) = s.transponder_of(i % beams) {
            if slots[t] >= s.transponders()[t].k_cap {
                continue;
            }
            slots[t] += 1;
        }
        out[i] = true;
    }
    out
}

/// Supergradient of the relaxed USC with respect to `x`.
fn relaxed_gradient(s: &Scenario, probe: &[f64], x: &[f64], eligible: &[bool]) -> Vec<f64> {
    let (carriers, beams) = (s.num_carriers(), s.num_beams());
    let bc = s.carrier_width() / std::f64::consts::LN_2;
    let tx: Vec<f64> = x.iter().zip(probe).map(|(v, q)| v * q).collect();
    let interference = |k: usize, m: usize| -> f64 {
        s.noise(m)
            + (0..beams)
                .filter(|&j| j != m)
                .map(|j| s.gain(m, j) * tx[k * beams + j])
                .sum::<f64>()
    };
    let mut capacity = vec![0.0; beams];
    for k in 0..carriers {
        for m in 0..beams {
            let own = s.gain(m, m) * tx[k * beams + m];
            if own > 0.0 {
                capacity[m] += bc * (own / interference(k, m)).ln_1p();
            }
        }
    }
    let unmet: Vec<bool> = (0..beams).map(|m| capacity[m] < s.demand(m)).collect();
    let mut grad = vec![0.0; x.len()];
    for k in 0..carriers {
        let noise_plus: Vec<f64> = (0..beams).map(|m| interference(k, m)).collect();
        for l in 0..beams {
            let i = k * beams + l;
            if !eligible[i] {
                continue;
            }
            let mut d = 0.0;
            if unmet[l] {
                d += bc * s.gain(l, l) / (noise_plus[l] + s.gain(l, l) * tx[i]);
            }
            for m in (0..beams).filter(|&m| m != l && unmet[m]) {
                let signal = s.gain(m, m) * tx[k * beams + m];
                if signal > 0.0 {
                    let base = noise_plus[m];
                    d -= bc * signal * s.gain(m, l) / (base * (base + signal));
                }
            }
            grad[i] = d * probe[i];
        }
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioDoc;

    fn scenario(gain: Vec<Vec<f64>>, demands: Vec<f64>, k: usize) -> Scenario {
        Scenario::from_doc(&ScenarioDoc::from_gains(gain, demands, 1.0, k as f64, k, 4.0)).unwrap()
    }

    fn full(s: &Scenario) -> AllocationPlan {
        let mut plan = AllocationPlan::for_scenario(s);
        for k in 0..s.num_carriers() {
            for l in 0..s.num_beams() {
                plan.set_assigned(k, l, true);
                plan.set_power(k, l, s.total_power() / (s.num_carriers() * s.num_beams()) as f64);
            }
        }
        plan
    }

    #[test]
    fn zero_demand_beam_gets_nothing() {
        let s = scenario(vec![vec![1.0, 0.1], vec![0.1, 1.0]], vec![5.0, 0.0], 2);
        for mode in [RelaxationMode::BinaryHungarian, RelaxationMode::ContinuousRelaxRound] {
            let plan = assign_carriers(&s, &full(&s), mode);
            assert!((0..2).all(|k| !plan.assigned(k, 1)), "{mode:?}");
            assert!((0..2).any(|k| plan.assigned(k, 0)));
            plan.validate(&s).unwrap();
        }
    }

    #[test]
    fn strong_cross_gain_separates_carriers() {
        let s = scenario(vec![vec![1.0, 0.95], vec![0.95, 1.0]], vec![10.0, 10.0], 2);
        let start = crate::carrier_power::coloring_baseline(&s, 2).unwrap();
        let plan = assign_carriers(&s, &start, RelaxationMode::BinaryHungarian);
        for k in 0..2 {
            assert!(!(plan.assigned(k, 0) && plan.assigned(k, 1)), "carrier {k} shared");
        }
        assert_eq!(plan.assigned_count(), 2);
    }

    #[test]
    fn weak_cross_gain_reuses_carriers() {
        let s = scenario(vec![vec![1.0, 0.001], vec![0.001, 1.0]], vec![10.0, 10.0], 2);
        let plan = assign_carriers(&s, &full(&s), RelaxationMode::BinaryHungarian);
        assert_eq!(plan.assigned_count(), 4);
    }

    #[test]
    fn relaxed_gradient_matches_finite_differences() {
        let s = scenario(
            vec![vec![1.0, 0.4, 0.2], vec![0.3, 1.0, 0.5], vec![0.1, 0.6, 1.0]],
            vec![50.0, 50.0, 50.0],
            2,
        );
        let probe = vec![0.7; 6];
        let eligible = vec![true; 6];
        let x = vec![0.9, 0.4, 0.6, 0.3, 0.8, 0.5];
        let g = relaxed_gradient(&s, &probe, &x, &eligible);
        let f = |x: &[f64]| {
            let p: Vec<f64> = x.iter().zip(&probe).map(|(v, q)| v * q).collect();
            plan_usc(&s, &AllocationPlan::from_parts(2, 3, vec![true; 6], p))
        };
        for i in 0..6 {
            let h = 1e-6;
            let mut up = x.clone();
            up[i] += h;
            let mut dn = x.clone();
            dn[i] -= h;
            let fd = (f(&up) - f(&dn)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-5 * fd.abs().max(1.0), "slot {i}: {fd} vs {}", g[i]);
        }
    }
}
