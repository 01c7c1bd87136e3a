//! Demand-matched carrier assignment and power allocation.
//!
//! The target is the unmet system capacity `sum_l min(C_l - D_l, 0)`,
//! maximized over binary carrier assignments and non-negative powers under
//! the total (and per-transponder) budgets. The solver alternates between a
//! Hungarian-style carrier assignment at fixed power and successive convex
//! approximation of the power at fixed assignment. Frequency-reuse coloring
//! and uniform power provide the baseline; an exhaustive grid search
//! provides the reference optimum on toy instances.

mod alternating;
mod assign;
mod brute;
mod coloring;
mod feasibility;
pub mod hungarian;
mod sca;
mod waterfill;

pub use alternating::{alternating_solve, SolveOutcome, TraceRow};
pub use assign::assign_carriers;
pub use brute::{brute_force_plan, BRUTE_FORCE_MAX_LEVELS, BRUTE_FORCE_MAX_SLOTS};
pub use coloring::{best_coloring, coloring_baseline, greedy_coloring, uniform_power};
pub use sca::{sca_power, ScaOutcome};

use thiserror::Error;

use crate::metrics::PlanViolation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelaxationMode {
    /// Rounds of rectangular assignment on marginal USC gains.
    #[default]
    BinaryHungarian,
    /// Box relaxation `0 <= x <= 1`, then rounding by descending value.
    ContinuousRelaxRound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_outer_iters: usize,
    pub sca_max_iters: usize,
    /// Relative USC change below which an iteration counts as converged.
    pub sca_tolerance: f64,
    /// Distinct per-slot power values of the exhaustive oracle, zero included.
    pub power_grid_levels: usize,
    pub relaxation_mode: RelaxationMode,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_outer_iters: 10,
            sca_max_iters: 50,
            sca_tolerance: 1e-6,
            power_grid_levels: 4,
            relaxation_mode: RelaxationMode::BinaryHungarian,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.max_outer_iters == 0 || self.sca_max_iters == 0 {
            return Err(SolverError::InvalidOptions("iteration limits must be at least 1".into()));
        }
        if !(self.sca_tolerance > 0.0 && self.sca_tolerance.is_finite()) {
            return Err(SolverError::InvalidOptions("sca_tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("{n_colors} colors cannot split {carriers} carriers evenly")]
    InvalidColors { n_colors: usize, carriers: usize },
    #[error("no carrier is assigned to any beam")]
    NoAssignedCarrier,
    #[error("infeasible plan: {0}")]
    Infeasible(#[from] PlanViolation),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
}

impl SolverError {
    /// Rejections caused by problem size rather than bad input.
    pub fn is_guard_rail(&self) -> bool {
        matches!(self, Self::TooLarge(_))
    }
}
