//! Exhaustive reference solver on a discrete power grid.

use super::SolverError;
use crate::metrics::{plan_usc, AllocationPlan, POWER_TOLERANCE};
use crate::scenario::Scenario;

pub const BRUTE_FORCE_MAX_SLOTS: usize = 9;
pub const BRUTE_FORCE_MAX_LEVELS: usize = 5;

/// Searches every per-slot power on the grid `{0, P/(n-1), ..., P}` whose
/// total stays within budget. A slot carries its carrier exactly when its
/// power is positive: an assigned slot at zero power changes no SINR, and
/// the tie-break prefers the smaller assignment anyway.
///
/// Ties on USC go to lower total power, then the lexicographically smaller
/// assignment, then the smaller grid vector.
pub fn brute_force_plan(s: &Scenario, levels: usize) -> Result<AllocationPlan, SolverError> {
    let slots = s.num_carriers() * s.num_beams();
    if slots > BRUTE_FORCE_MAX_SLOTS {
        return Err(SolverError::TooLarge(format!(
            "K*L = {slots} exceeds {BRUTE_FORCE_MAX_SLOTS}"
        )));
    }
    if !(2..=BRUTE_FORCE_MAX_LEVELS).contains(&levels) {
        return Err(SolverError::TooLarge(format!(
            "power grid needs 2..={BRUTE_FORCE_MAX_LEVELS} levels, got {levels}"
        )));
    }
    let steps = levels - 1;
    let unit = s.total_power() / steps as f64;
    let mut search = Search {
        s,
        unit,
        grid: vec![0; slots],
        best: None,
    };
    search.descend(0, steps);
    let (_, grid) = search.best.expect("the all-zero vector is always feasible");
    Ok(plan_from_grid(s, &grid, unit))
}

fn plan_from_grid(s: &Scenario, grid: &[usize], unit: f64) -> AllocationPlan {
    let x = grid.iter().map(|&j| j > 0).collect();
    let p = grid.iter().map(|&j| j as f64 * unit).collect();
    AllocationPlan::from_parts(s.num_carriers(), s.num_beams(), x, p)
}

struct Search<'a> {
    s: &'a Scenario,
    unit: f64,
    grid: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn descend(&mut self, slot: usize, remaining: usize) {
        if slot == self.grid.len() {
            self.consider();
            return;
        }
        for j in 0..=remaining {
            self.grid[slot] = j;
            self.descend(slot + 1, remaining - j);
        }
        self.grid[slot] = 0;
    }

    fn within_transponder_caps(&self) -> bool {
        let beams = self.s.num_beams();
        self.s.transponders().iter().enumerate().all(|(t, tr)| {
            let mut power = 0.0;
            let mut used = 0;
            for (i, &j) in self.grid.iter().enumerate() {
                if self.s.transponder_of(i % beams) == Some(t) {
                    power += j as f64 * self.unit;
                    used += usize::from(j > 0);
                }
            }
            power <= tr.p_cap_w * (1.0 + POWER_TOLERANCE) && used <= tr.k_cap
        })
    }

    fn consider(&mut self) {
        if !self.within_transponder_caps() {
            return;
        }
        let plan = plan_from_grid(self.s, &self.grid, self.unit);
        let value = plan_usc(self.s, &plan);
        let better = match &self.best {
            None => true,
            Some((best, grid)) => {
                let tol = 1e-12 * best.abs().max(value.abs());
                if value > best + tol {
                    true
                } else if value < best - tol {
                    false
                } else {
                    tie_key(&self.grid) < tie_key(grid)
                }
            }
        };
        if better {
            self.best = Some((value, self.grid.clone()));
        }
    }
}

fn tie_key(grid: &[usize]) -> (usize, Vec<bool>, Vec<usize>) {
    (grid.iter().sum(), grid.iter().map(|&j| j > 0).collect(), grid.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioDoc;

    fn scenario(gain: Vec<Vec<f64>>, demands: Vec<f64>, k: usize) -> Scenario {
        Scenario::from_doc(&ScenarioDoc::from_gains(gain, demands, 1.0, k as f64, k, 3.0)).unwrap()
    }

    #[test]
    fn single_slot_takes_full_power() {
        let s = scenario(vec![vec![1.0]], vec![10.0], 1);
        let plan = brute_force_plan(&s, 4).unwrap();
        assert!(plan.assigned(0, 0));
        assert_eq!(plan.power(0, 0), 3.0);
    }

    #[test]
    fn zero_demand_prefers_zero_power() {
        let s = scenario(vec![vec![1.0, 0.2], vec![0.2, 1.0]], vec![0.0, 0.0], 2);
        let plan = brute_force_plan(&s, 4).unwrap();
        assert_eq!(plan.total_power(), 0.0);
        assert_eq!(plan.assigned_count(), 0);
        assert_eq!(plan_usc(&s, &plan), 0.0);
        let s1 = scenario(vec![vec![1.0]], vec![0.0], 1);
        assert_eq!(brute_force_plan(&s1, 4).unwrap().power(0, 0), 0.0);
    }

    #[test]
    fn symmetric_instance_has_swap_symmetric_optimum() {
        let s = scenario(vec![vec![1.0, 0.6], vec![0.6, 1.0]], vec![2.0, 2.0], 2);
        let plan = brute_force_plan(&s, 4).unwrap();
        let mut swapped = AllocationPlan::for_scenario(&s);
        for k in 0..2 {
            for l in 0..2 {
                swapped.set_assigned(k, 1 - l, plan.assigned(k, l));
                swapped.set_power(k, 1 - l, plan.power(k, l));
            }
        }
        let a = plan_usc(&s, &plan);
        let b = plan_usc(&s, &swapped);
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn guard_rails() {
        let gain: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.1 }).collect())
            .collect();
        let s = scenario(gain, vec![1.0; 4], 3);
        assert!(matches!(brute_force_plan(&s, 4), Err(SolverError::TooLarge(_))));
        let s = scenario(vec![vec![1.0]], vec![1.0], 1);
        assert!(matches!(brute_force_plan(&s, 6), Err(SolverError::TooLarge(_))));
        assert!(matches!(brute_force_plan(&s, 1), Err(SolverError::TooLarge(_))));
    }
}
