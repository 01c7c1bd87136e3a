//! Radio resource management for multibeam satellite downlinks.
//!
//! - [`scenario`]: the system model and reproducible scenario generation.
//! - [`metrics`]: SINR, offered capacity and the demand-matching objectives.
//! - [`carrier_power`]: carrier assignment and power allocation.
//! - [`sched_precode`]: regularized zero-forcing, user selection and
//!   ModCod-aware frame scheduling.
//! - [`beam_hopping`]: illumination pattern design.
//! - [`simplex`]: the dense LP solver behind the beam-hopping relaxation.
//!
//! The `book/` directory at the repository root explains each layer with
//! runnable examples; they are compiled as doc-tests of this crate.

pub mod beam_hopping;
pub mod carrier_power;
pub mod format;
pub mod metrics;
pub mod rng;
pub mod scenario;
pub mod sched_precode;
pub mod simplex;

pub use metrics::{AllocationPlan, MetricsReport};
pub use scenario::{load_scenario, Scenario};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/scenario.md")]
    mod scenario {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/carrier_power.md")]
    mod carrier_power {}
    #[doc = include_str!("../../../book/src/scheduling.md")]
    mod scheduling {}
    #[doc = include_str!("../../../book/src/beam_hopping.md")]
    mod beam_hopping {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
