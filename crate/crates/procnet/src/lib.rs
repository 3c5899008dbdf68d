//! Steady-state estimation accuracy of smart-sensor processing networks.
//!
//! A processing network is a set of smart sensors that observe a scalar
//! diffusion, spend `tau` seconds refining each raw measurement on board
//! (which lowers the measurement noise), and ship the result to a fusion
//! center over a channel with its own latency. The fused estimate is then
//! propagated open loop to the current time, so every second of latency is
//! paid for in accumulated process noise.
//!
//! The crate computes the resulting steady-state prediction-error variance
//! in closed form, optimizes the preprocessing delay (and, for homogeneous
//! networks, the number of sensors), and cross-checks the closed forms with
//! a seeded Monte Carlo simulator of the discretized filter:
//!
//! * [`model`] — validated domain types and the on-disk config format;
//! * [`analytic`] — closed-form variance, its limits, and delay bookkeeping;
//! * [`optimize`] — cubic/quintic root solvers, golden-section fallback,
//!   sensitivities, and sensor-count selection;
//! * [`simulate`] — reproducible Monte Carlo validation of the closed forms;
//! * [`figures`] — parameter sets for the bundled reference figures.

pub mod analytic;
mod error;
pub mod figures;
pub mod model;
pub mod optimize;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod simulate;

pub use error::Error;
pub use model::{
    CommDelay, DelayBreakdown, DelayModel, FusionDelay, NetworkConfig, PreprocessingModel,
    ScalarSystem, VarianceBreakdown,
};
