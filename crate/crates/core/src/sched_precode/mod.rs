//! User-level downlink design: precoding, user selection and framing.
//!
//! A DVB-S2(X) style frame carries one ModCod chosen for its weakest member,
//! so users with similar SINR are framed together. With precoding, which
//! users share a slot changes the SINR they end up with; the joint loop
//! schedules, precodes, re-measures, and schedules again.

mod frames;
mod joint;
mod modcod;
mod rzf;
mod sus;

pub use frames::{group_frames, similarity_schedule, Frame, FramePlan, UserId};
pub use joint::{joint_schedule_precode, JointOptions, JointOutcome, SlotAssignment};
pub use modcod::{ModCodRow, ModCodTable};
pub use rzf::{default_regularization, precoded_sinr, rzf, PrecodingMatrix};
pub use sus::{channel_correlation, sus_select, DEFAULT_SUS_EPSILON};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrecodeError {
    #[error("H H^H is singular; use a positive regularization")]
    Singular,
    #[error("regularization must be finite and non-negative, got {0}")]
    InvalidRegularization(f64),
    #[error("total power must be positive, got {0}")]
    InvalidPower(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("frame size must be at least 1")]
    InvalidFrameSize,
    #[error("rounds must be at least 1")]
    InvalidRounds,
    #[error("invalid ModCod table: {0}")]
    ModCodTable(String),
}

/// `10 log10(x)`; zero maps to negative infinity.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
