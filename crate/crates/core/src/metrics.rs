//! SINR, offered capacity and the demand-matching objectives.
//!
//! Per carrier `k`, beam `l` sees
//!
//! ```text
//! gamma_{l,k} = g_l[l] p_k[l] x_k[l] / (sum_{m != l} g_l[m] p_k[m] x_k[m] + sigma_l^2)
//! ```
//!
//! and the offered capacity is `C_l = sum_k B_c log2(1 + gamma_{l,k})`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{fmt12, round_sig12};
use crate::scenario::Scenario;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("index out of range: beam {beam} of {beams}, carrier {carrier} of {carriers}")]
    IndexOutOfRange {
        beam: usize,
        beams: usize,
        carrier: usize,
        carriers: usize,
    },
    #[error("length mismatch: {capacity} capacities vs {demand} demands")]
    LengthMismatch { capacity: usize, demand: usize },
    #[error("beam {beam} has zero demand; its satisfaction ratio is undefined")]
    ZeroDemand { beam: usize },
}

/// A broken allocation constraint.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PlanViolation {
    #[error("plan is {carriers}x{beams}, scenario needs {want_carriers}x{want_beams}")]
    Shape {
        carriers: usize,
        beams: usize,
        want_carriers: usize,
        want_beams: usize,
    },
    #[error("power on carrier {carrier}, beam {beam} is negative or not finite")]
    BadPower { carrier: usize, beam: usize },
    #[error("power on carrier {carrier}, beam {beam} without the carrier being assigned")]
    PowerWithoutCarrier { carrier: usize, beam: usize },
    #[error("total power {total} W exceeds budget {cap} W")]
    TotalPower { total: f64, cap: f64 },
    #[error("transponder {id} power {total} W exceeds cap {cap} W")]
    TransponderPower { id: u32, total: f64, cap: f64 },
    #[error("transponder {id} uses {used} carrier slots, cap is {cap}")]
    TransponderCarriers { id: u32, used: usize, cap: usize },
}

/// Relative slack granted to power-budget checks.
pub const POWER_TOLERANCE: f64 = 1e-9;

/// Carrier assignment `x_k[l]` and powers `p_k[l]`, both stored carrier-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan {
    carriers: usize,
    beams: usize,
    x: Vec<bool>,
    p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDoc {
    pub x: Vec<Vec<u8>>,
    pub p_w: Vec<Vec<f64>>,
}

impl AllocationPlan {
    pub fn empty(carriers: usize, beams: usize) -> Self {
        AllocationPlan {
            carriers,
            beams,
            x: vec![false; carriers * beams],
            p: vec![0.0; carriers * beams],
        }
    }

    pub fn for_scenario(s: &Scenario) -> Self {
        Self::empty(s.num_carriers(), s.num_beams())
    }

    /// Builds a plan from flat carrier-major slices.
    pub fn from_parts(carriers: usize, beams: usize, x: Vec<bool>, p: Vec<f64>) -> Self {
        assert_eq!(x.len(), carriers * beams);
        assert_eq!(p.len(), carriers * beams);
        AllocationPlan { carriers, beams, x, p }
    }

    pub fn num_carriers(&self) -> usize {
        self.carriers
    }

    pub fn num_beams(&self) -> usize {
        self.beams
    }

    fn idx(&self, k: usize, l: usize) -> usize {
        k * self.beams + l
    }

    pub fn assigned(&self, k: usize, l: usize) -> bool {
        self.x[self.idx(k, l)]
    }

    pub fn power(&self, k: usize, l: usize) -> f64 {
        self.p[self.idx(k, l)]
    }

    pub fn set_assigned(&mut self, k: usize, l: usize, on: bool) {
        let i = self.idx(k, l);
        self.x[i] = on;
    }

    pub fn set_power(&mut self, k: usize, l: usize, watts: f64) {
        let i = self.idx(k, l);
        self.p[i] = watts;
    }

    pub fn assignment(&self) -> &[bool] {
        &self.x
    }

    pub fn powers(&self) -> &[f64] {
        &self.p
    }

    pub fn powers_mut(&mut self) -> &mut [f64] {
        &mut self.p
    }

    pub fn total_power(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn assigned_count(&self) -> usize {
        self.x.iter().filter(|&&b| b).count()
    }

    /// Effective transmit power `p_k[l] x_k[l]`.
    pub fn tx_power(&self, k: usize, l: usize) -> f64 {
        let i = self.idx(k, l);
        if self.x[i] {
            self.p[i]
        } else {
            0.0
        }
    }

    /// Checks C1-C3, the `p > 0 => x = 1` coupling and transponder caps.
    pub fn validate(&self, s: &Scenario) -> Result<(), PlanViolation> {
        if self.carriers != s.num_carriers() || self.beams != s.num_beams() {
            return Err(PlanViolation::Shape {
                carriers: self.carriers,
                beams: self.beams,
                want_carriers: s.num_carriers(),
                want_beams: s.num_beams(),
            });
        }
        for k in 0..self.carriers {
            for l in 0..self.beams {
                let p = self.power(k, l);
                if !(p.is_finite() && p >= 0.0) {
                    return Err(PlanViolation::BadPower { carrier: k, beam: l });
                }
                if p > 0.0 && !self.assigned(k, l) {
                    return Err(PlanViolation::PowerWithoutCarrier { carrier: k, beam: l });
                }
            }
        }
        let total = self.total_power();
        let cap = s.total_power();
        if total > cap * (1.0 + POWER_TOLERANCE) {
            return Err(PlanViolation::TotalPower { total, cap });
        }
        for (t, tr) in s.transponders().iter().enumerate() {
            let mut power = 0.0;
            let mut used = 0;
            for l in (0..self.beams).filter(|&l| s.transponder_of(l) == Some(t)) {
                for k in 0..self.carriers {
                    power += self.power(k, l);
                    used += usize::from(self.assigned(k, l));
                }
            }
            if power > tr.p_cap_w * (1.0 + POWER_TOLERANCE) {
                return Err(PlanViolation::TransponderPower {
                    id: tr.id,
                    total: power,
                    cap: tr.p_cap_w,
                });
            }
            if used > tr.k_cap {
                return Err(PlanViolation::TransponderCarriers {
                    id: tr.id,
                    used,
                    cap: tr.k_cap,
                });
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> PlanDoc {
        PlanDoc {
            x: (0..self.carriers)
                .map(|k| (0..self.beams).map(|l| u8::from(self.assigned(k, l))).collect())
                .collect(),
            p_w: (0..self.carriers)
                .map(|k| (0..self.beams).map(|l| round_sig12(self.power(k, l))).collect())
                .collect(),
        }
    }

    /// Rejects ragged matrices and non-binary assignment entries.
    pub fn from_doc(doc: &PlanDoc) -> Result<Self, String> {
        let carriers = doc.x.len();
        if doc.p_w.len() != carriers {
            return Err("`x` and `p_w` must have the same number of rows".into());
        }
        let beams = doc.x.first().map_or(0, Vec::len);
        let mut plan = AllocationPlan::empty(carriers, beams);
        for k in 0..carriers {
            if doc.x[k].len() != beams || doc.p_w[k].len() != beams {
                return Err(format!("row {k} of the plan has the wrong length"));
            }
            for l in 0..beams {
                match doc.x[k][l] {
                    0 => {}
                    1 => plan.set_assigned(k, l, true),
                    v => return Err(format!("x[{k}][{l}] = {v} is not binary")),
                }
                plan.set_power(k, l, doc.p_w[k][l]);
            }
        }
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_doc()).expect("plans serialize");
        text.push('\n');
        text
    }
}

/// SINR of beam `l` on one shared channel given every beam's transmit power
/// on that channel.
pub fn co_channel_sinr(s: &Scenario, l: usize, tx: &[f64]) -> f64 {
    if tx[l] <= 0.0 {
        return 0.0;
    }
    let interference: f64 = tx
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != l)
        .map(|(m, &p)| s.gain(l, m) * p)
        .sum();
    s.gain(l, l) * tx[l] / (interference + s.noise(l))
}

pub fn sinr(s: &Scenario, plan: &AllocationPlan, l: usize, k: usize) -> Result<f64, MetricsError> {
    if l >= plan.num_beams() || k >= plan.num_carriers() || l >= s.num_beams() {
        return Err(MetricsError::IndexOutOfRange {
            beam: l,
            beams: plan.num_beams(),
            carrier: k,
            carriers: plan.num_carriers(),
        });
    }
    let tx: Vec<f64> = (0..plan.num_beams()).map(|m| plan.tx_power(k, m)).collect();
    Ok(co_channel_sinr(s, l, &tx))
}

/// `C_l = sum_k B_c log2(1 + gamma_{l,k})` for every beam, in bit/s.
pub fn offered_capacity(s: &Scenario, plan: &AllocationPlan) -> Vec<f64> {
    let bc = s.carrier_width();
    let beams = s.num_beams();
    let mut capacity = vec![0.0; beams];
    let mut tx = vec![0.0; beams];
    for k in 0..plan.num_carriers() {
        for (m, t) in tx.iter_mut().enumerate() {
            *t = plan.tx_power(k, m);
        }
        for (l, c) in capacity.iter_mut().enumerate() {
            if tx[l] > 0.0 {
                *c += bc * co_channel_sinr(s, l, &tx).ln_1p() / std::f64::consts::LN_2;
            }
        }
    }
    capacity
}

fn check_lengths(c: &[f64], d: &[f64]) -> Result<(), MetricsError> {
    if c.len() != d.len() {
        return Err(MetricsError::LengthMismatch {
            capacity: c.len(),
            demand: d.len(),
        });
    }
    Ok(())
}

/// Unmet system capacity, `sum_l min(C_l - D_l, 0)`.
pub fn usc(c: &[f64], d: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(c, d)?;
    Ok(c.iter().zip(d).map(|(c, d)| (c - d).min(0.0)).sum())
}

/// `(1/L) sum_l (C_l - D_l)^2`.
pub fn mmse(c: &[f64], d: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(c, d)?;
    if c.is_empty() {
        return Ok(0.0);
    }
    Ok(c.iter().zip(d).map(|(c, d)| (c - d) * (c - d)).sum::<f64>() / c.len() as f64)
}

/// `min_l C_l / D_l`; every demand must be positive.
pub fn min_ratio(c: &[f64], d: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(c, d)?;
    let mut best = f64::INFINITY;
    for (beam, (c, d)) in c.iter().zip(d).enumerate() {
        if *d <= 0.0 {
            return Err(MetricsError::ZeroDemand { beam });
        }
        best = best.min(c / d);
    }
    Ok(best)
}

/// Shorthand for the USC of a plan.
pub fn plan_usc(s: &Scenario, plan: &AllocationPlan) -> f64 {
    let c = offered_capacity(s, plan);
    c.iter()
        .zip(s.beams())
        .map(|(c, b)| (c - b.demand_bps).min(0.0))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub capacity_bps: Vec<f64>,
    pub demand_bps: Vec<f64>,
    /// `C_l / D_l`, absent for zero-demand beams.
    pub satisfaction: Vec<Option<f64>>,
    pub usc: f64,
    pub mmse: f64,
    /// Absent when some beam has zero demand.
    pub min_ratio: Option<f64>,
}

impl MetricsReport {
    pub fn from_rates(capacity: Vec<f64>, demand: Vec<f64>) -> Result<Self, MetricsError> {
        let usc = usc(&capacity, &demand)?;
        let mmse = mmse(&capacity, &demand)?;
        let min_ratio = match min_ratio(&capacity, &demand) {
            Ok(r) => Some(r),
            Err(MetricsError::ZeroDemand { .. }) => None,
            Err(e) => return Err(e),
        };
        let satisfaction = capacity
            .iter()
            .zip(&demand)
            .map(|(c, d)| (*d > 0.0).then(|| c / d))
            .collect();
        Ok(MetricsReport {
            capacity_bps: capacity,
            demand_bps: demand,
            satisfaction,
            usc,
            mmse,
            min_ratio,
        })
    }

    pub fn evaluate(s: &Scenario, plan: &AllocationPlan) -> Self {
        Self::from_rates(offered_capacity(s, plan), s.demands())
            .expect("capacity and demand vectors have one entry per beam")
    }

    pub fn to_json(&self) -> String {
        let r = MetricsReport {
            capacity_bps: self.capacity_bps.iter().copied().map(round_sig12).collect(),
            demand_bps: self.demand_bps.iter().copied().map(round_sig12).collect(),
            satisfaction: self.satisfaction.iter().map(|v| v.map(round_sig12)).collect(),
            usc: round_sig12(self.usc),
            mmse: round_sig12(self.mmse),
            min_ratio: self.min_ratio.map(round_sig12),
        };
        let mut text = serde_json::to_string_pretty(&r).expect("reports serialize");
        text.push('\n');
        text
    }

    /// One row per beam, then a `total` row carrying the objectives.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
        w.write_record(["beam", "capacity_bps", "demand_bps", "satisfaction", "usc", "mmse", "min_ratio"])
            .expect("in-memory csv");
        for (l, (c, d)) in self.capacity_bps.iter().zip(&self.demand_bps).enumerate() {
            w.write_record([
                l.to_string(),
                fmt12(*c),
                fmt12(*d),
                opt(self.satisfaction[l]),
                String::new(),
                String::new(),
                String::new(),
            ])
            .expect("in-memory csv");
        }
        w.write_record([
            "total".to_string(),
            fmt12(self.capacity_bps.iter().sum()),
            fmt12(self.demand_bps.iter().sum()),
            String::new(),
            fmt12(self.usc),
            fmt12(self.mmse),
            opt(self.min_ratio),
        ])
        .expect("in-memory csv");
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioDoc;

    fn scenario(gain: Vec<Vec<f64>>, noise: f64, b_total: f64, k: usize, p: f64) -> Scenario {
        let d = vec![1.0; gain.len()];
        Scenario::from_doc(&ScenarioDoc::from_gains(gain, d, noise, b_total, k, p)).unwrap()
    }

    #[test]
    fn single_beam_sinr_is_snr() {
        let s = scenario(vec![vec![1.0]], 1.0, 1.0, 1, 10.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        plan.set_assigned(0, 0, true);
        plan.set_power(0, 0, 4.0);
        assert_eq!(sinr(&s, &plan, 0, 0).unwrap(), 4.0);
        assert_eq!(offered_capacity(&s, &plan), vec![(5f64).log2()]);
    }

    #[test]
    fn unassigned_carrier_has_zero_sinr() {
        let s = scenario(vec![vec![1.0]], 1.0, 1.0, 1, 10.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        plan.set_power(0, 0, 4.0);
        assert_eq!(sinr(&s, &plan, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn two_beam_interference() {
        let s = scenario(vec![vec![1.0, 0.5], vec![0.5, 1.0]], 1.0, 1.0, 1, 10.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        for l in 0..2 {
            plan.set_assigned(0, l, true);
            plan.set_power(0, l, 2.0);
        }
        assert_eq!(sinr(&s, &plan, 0, 0).unwrap(), 1.0);
    }

    #[test]
    fn index_out_of_range() {
        let s = scenario(vec![vec![1.0]], 1.0, 1.0, 1, 10.0);
        let plan = AllocationPlan::for_scenario(&s);
        assert!(matches!(sinr(&s, &plan, 1, 0), Err(MetricsError::IndexOutOfRange { .. })));
        assert!(matches!(sinr(&s, &plan, 0, 3), Err(MetricsError::IndexOutOfRange { .. })));
    }

    #[test]
    fn capacity_is_log2_of_one_plus_sinr() {
        let s = scenario(vec![vec![1.0]], 1.0, 1.0, 1, 10.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        plan.set_assigned(0, 0, true);
        plan.set_power(0, 0, 3.0);
        assert!((offered_capacity(&s, &plan)[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_power_gives_zero_capacity() {
        let s = scenario(vec![vec![1.0, 0.2], vec![0.3, 1.0]], 1.0, 2.0, 2, 10.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        plan.set_assigned(0, 0, true);
        plan.set_assigned(1, 1, true);
        assert_eq!(offered_capacity(&s, &plan), vec![0.0, 0.0]);
    }

    #[test]
    fn orthogonal_split_is_interference_free() {
        let s = scenario(vec![vec![1.0, 0.9], vec![0.9, 1.0]], 1.0, 2.0, 2, 10.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        plan.set_assigned(0, 0, true);
        plan.set_power(0, 0, 1.0);
        plan.set_assigned(1, 1, true);
        plan.set_power(1, 1, 1.0);
        assert_eq!(offered_capacity(&s, &plan), vec![1.0, 1.0]);
    }

    #[test]
    fn objectives_direct_arithmetic() {
        let (c, d) = ([5.0, 3.0], [4.0, 4.0]);
        assert_eq!(usc(&c, &d).unwrap(), -1.0);
        assert_eq!(mmse(&c, &d).unwrap(), 1.0);
        assert_eq!(min_ratio(&c, &d).unwrap(), 0.75);
        let c = [2.0, 7.0];
        assert_eq!(usc(&c, &c).unwrap(), 0.0);
        assert_eq!(mmse(&c, &c).unwrap(), 0.0);
        assert_eq!(min_ratio(&c, &c).unwrap(), 1.0);
    }

    #[test]
    fn objective_errors() {
        assert_eq!(
            min_ratio(&[1.0, 0.0], &[1.0, 0.0]),
            Err(MetricsError::ZeroDemand { beam: 1 })
        );
        assert!(matches!(usc(&[1.0], &[1.0, 2.0]), Err(MetricsError::LengthMismatch { .. })));
    }

    #[test]
    fn plan_validation_catches_each_constraint() {
        let s = scenario(vec![vec![1.0]], 1.0, 2.0, 2, 1.0);
        let mut plan = AllocationPlan::for_scenario(&s);
        plan.set_power(0, 0, 0.5);
        assert!(matches!(plan.validate(&s), Err(PlanViolation::PowerWithoutCarrier { .. })));
        plan.set_assigned(0, 0, true);
        assert!(plan.validate(&s).is_ok());
        plan.set_assigned(1, 0, true);
        plan.set_power(1, 0, 0.6);
        assert!(matches!(plan.validate(&s), Err(PlanViolation::TotalPower { .. })));
        plan.set_power(1, 0, -0.1);
        assert!(matches!(plan.validate(&s), Err(PlanViolation::BadPower { .. })));
        assert!(matches!(
            AllocationPlan::empty(1, 1).validate(&s),
            Err(PlanViolation::Shape { .. })
        ));
    }

    #[test]
    fn report_csv_has_summary_row() {
        let r = MetricsReport::from_rates(vec![5.0, 3.0], vec![4.0, 4.0]).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "total,8,8,,-1,1,0.75");
        let z = MetricsReport::from_rates(vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(z.min_ratio, None);
        assert_eq!(z.satisfaction[1], None);
    }

    #[test]
    fn plan_doc_round_trip() {
        let mut plan = AllocationPlan::empty(2, 3);
        plan.set_assigned(1, 2, true);
        plan.set_power(1, 2, 0.25);
        let back = AllocationPlan::from_doc(&plan.to_doc()).unwrap();
        assert_eq!(plan, back);
        let bad = PlanDoc {
            x: vec![vec![2]],
            p_w: vec![vec![0.0]],
        };
        assert!(AllocationPlan::from_doc(&bad).is_err());
    }
}
