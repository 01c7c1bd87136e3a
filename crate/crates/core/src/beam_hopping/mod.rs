//! Beam hopping: which beams to illuminate in each time slot.
//!
//! A snapshot is a set of beams lit together, each using the whole band.
//! A pattern gives every snapshot an integer number of slots in a periodic
//! window of `N_s` slots. A beam's offered capacity is its rate averaged over
//! the window, and a pattern is scored by `eta = min_l C_l / D_l` over beams
//! with positive demand.

mod audit;
mod snapshots;
mod solve;

pub use audit::{audit_pattern, sequence, AuditLimits, AuditReport, Sequencing};
pub use snapshots::{enumerate_snapshots, SnapshotSet, DEFAULT_SNAPSHOT_CAP};
pub use solve::{
    bh_brute_force, largest_remainder, lp_relax, proportional_baseline, round_dwell, LpRelaxation,
    BRUTE_FORCE_MAX_SLOTS, BRUTE_FORCE_MAX_SNAPSHOTS,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::round_sig12;
use crate::simplex::LpError;

#[derive(Debug, Error, PartialEq)]
pub enum BhError {
    #[error("no snapshots")]
    NoSnapshots,
    #[error("{field} must be positive")]
    InvalidWindow { field: &'static str },
    #[error("max_active must be at least 1")]
    InvalidMaxActive,
    #[error("more than {cap} snapshots; provide a snapshot file instead")]
    CapExceeded { cap: usize },
    #[error("{0}")]
    TooLarge(String),
    #[error("beam {beam} has no single-beam snapshot")]
    MissingSingleBeamSnapshot { beam: usize },
    #[error("snapshot {index}: {reason}")]
    InvalidSnapshot { index: usize, reason: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("linear program: {0}")]
    Lp(#[from] LpError),
}

impl BhError {
    /// Rejections caused by problem size rather than bad input.
    pub fn is_guard_rail(&self) -> bool {
        matches!(self, Self::CapExceeded { .. } | Self::TooLarge(_))
    }
}

/// A window of `slots` slots lasting `slot_duration` seconds each, so
/// `T_H = slots * slot_duration` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub slots: usize,
    pub slot_duration: f64,
}

impl Window {
    pub fn new(slots: usize, slot_duration: f64) -> Result<Self, BhError> {
        if slots == 0 {
            return Err(BhError::InvalidWindow { field: "slots" });
        }
        if !(slot_duration.is_finite() && slot_duration > 0.0) {
            return Err(BhError::InvalidWindow { field: "slot_duration" });
        }
        Ok(Self { slots, slot_duration })
    }

    pub fn duration(&self) -> f64 {
        self.slots as f64 * self.slot_duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IlluminationPattern {
    /// Slots per snapshot; sums to `window.slots`.
    pub t: Vec<usize>,
    pub window: Window,
}

impl IlluminationPattern {
    pub fn new(t: Vec<usize>, window: Window) -> Result<Self, BhError> {
        let total: usize = t.iter().sum();
        if total != window.slots {
            return Err(BhError::Shape(format!("dwell counts sum to {total}, window has {} slots", window.slots)));
        }
        Ok(Self { t, window })
    }

    /// `C_l = (1 / T_H) sum_g t_g T_s R_{l,g}`.
    pub fn capacities(&self, ss: &SnapshotSet) -> Vec<f64> {
        capacities(ss, &self.t, self.window.slots)
    }

    pub fn eta(&self, ss: &SnapshotSet, demands: &[f64]) -> f64 {
        eta_of(&self.capacities(ss), demands)
    }
}

pub(crate) fn capacities(ss: &SnapshotSet, t: &[usize], slots: usize) -> Vec<f64> {
    let mut c = vec![0.0; ss.num_beams()];
    for (g, &tg) in t.iter().enumerate() {
        if tg > 0 {
            for (cl, r) in c.iter_mut().zip(ss.rates(g)) {
                *cl += tg as f64 * r;
            }
        }
    }
    for v in &mut c {
        *v /= slots as f64;
    }
    c
}

/// `min_l C_l / D_l` over beams with positive demand; infinite when no beam
/// has demand.
pub fn eta_of(capacity: &[f64], demands: &[f64]) -> f64 {
    capacity
        .iter()
        .zip(demands)
        .filter(|(_, &d)| d > 0.0)
        .map(|(c, d)| c / d)
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Serialize)]
struct PatternDoc<'a> {
    t: &'a [usize],
    eta: f64,
    sequence: &'a [usize],
    audit: AuditDoc<'a>,
}

#[derive(Debug, Serialize)]
struct AuditDoc<'a> {
    switches: &'a [usize],
    max_gap: &'a [usize],
    violations: &'a [String],
}

/// `{t, eta, sequence, audit: {switches, max_gap, violations}}`.
pub fn pattern_json(pattern: &IlluminationPattern, eta: f64, audit: &AuditReport) -> String {
    let doc = PatternDoc {
        t: &pattern.t,
        eta: round_sig12(eta),
        sequence: &audit.sequence,
        audit: AuditDoc {
            switches: &audit.switches,
            max_gap: &audit.max_gap,
            violations: &audit.violations,
        },
    };
    serde_json::to_string_pretty(&doc).expect("pattern serializes")
}
