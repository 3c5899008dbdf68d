//! Domain types shared by every other module.
//!
//! All types are immutable value objects: cheap to copy, safe to share
//! across threads, and validated as a whole through
//! [`NetworkConfig::validate`].

mod config;

pub use config::{parse_config, ConfigError};

use serde::{Deserialize, Serialize};

use crate::Error;

/// The scalar LTI plant `dx = a x dt + dw` with process noise intensity
/// `sigma2_w` and initial condition `(mu0, p0)`.
///
/// `mu0` and `p0` only matter to the simulator; every closed-form result in
/// this crate is a steady-state quantity independent of the initial
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarSystem {
    /// System pole (1/time). Negative is asymptotically stable.
    pub a: f64,
    /// Process-noise intensity (state^2/time), strictly positive.
    pub sigma2_w: f64,
    /// Initial state mean.
    pub mu0: f64,
    /// Initial state variance, nonnegative.
    pub p0: f64,
}

impl ScalarSystem {
    pub fn new(a: f64, sigma2_w: f64) -> Self {
        Self { a, sigma2_w, mu0: 0.0, p0: 1.0 }
    }
}

/// How the measurement-noise variance decays with the preprocessing delay.
///
/// More time spent refining a measurement on the sensor yields a less noisy
/// measurement; each variant is one decay law `sigma2_v(tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PreprocessingModel {
    /// `sigma2_v = b / tau`: each unit of preprocessing contributes an
    /// independent sample, as in least-squares refinement.
    InverseLinear { b: f64 },
    /// `sigma2_v = b / tau^gamma`: non-ideal refinement with dependent
    /// samples (`gamma < 1`) or superlinear gains (`gamma > 1`).
    InversePower { b: f64, gamma: f64 },
    /// `sigma2_v = b * exp(-gamma * tau)`: anytime algorithms with
    /// exponential convergence. Finite noise `b` at `tau = 0`.
    Exponential { b: f64, gamma: f64 },
}

impl PreprocessingModel {
    /// Noise coefficient `b` (the variance scale).
    pub fn b(&self) -> f64 {
        match *self {
            Self::InverseLinear { b }
            | Self::InversePower { b, .. }
            | Self::Exponential { b, .. } => b,
        }
    }

    /// Returns a copy with the noise coefficient replaced. Used to fold a
    /// homogeneous `S`-sensor network into one virtual sensor with `b / S`.
    pub fn with_b(&self, b: f64) -> Self {
        match *self {
            Self::InverseLinear { .. } => Self::InverseLinear { b },
            Self::InversePower { gamma, .. } => Self::InversePower { b, gamma },
            Self::Exponential { gamma, .. } => Self::Exponential { b, gamma },
        }
    }
}

/// Communication-delay law for the sensor-to-fusion-center link.
///
/// `None` means the channel is not modeled at all, which reports differently
/// from an instantaneous channel `Constant { tau_c: 0.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "comm_kind", rename_all = "snake_case")]
pub enum CommDelay {
    None,
    /// Fixed packet size: latency independent of preprocessing.
    Constant { tau_c: f64 },
    /// Preprocessing compresses the payload: latency `c / tau`.
    Compressing { c: f64 },
}

/// Per-sensor fusion-delay law at the central station. The total fusion
/// latency scales with the number of active sensors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fusion_kind", rename_all = "snake_case")]
pub enum FusionDelay {
    None,
    Constant { tau_f: f64 },
    Compressing { f: f64 },
}

/// Communication and fusion delay laws for one (homogeneous) sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    pub comm: CommDelay,
    pub fusion: FusionDelay,
}

impl DelayModel {
    /// No communication or fusion latency modeled.
    pub fn none() -> Self {
        Self { comm: CommDelay::None, fusion: FusionDelay::None }
    }
}

/// A full problem instance: plant, per-sensor preprocessing and delay
/// models, and the number of available homogeneous sensors.
///
/// The implied measurement matrix is the all-ones column of length
/// `sensors`; every sensor shares the same models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub system: ScalarSystem,
    pub preprocessing: PreprocessingModel,
    pub delays: DelayModel,
    pub sensors: u32,
}

impl NetworkConfig {
    /// Single sensor, no communication or fusion delay.
    pub fn single_sensor(system: ScalarSystem, preprocessing: PreprocessingModel) -> Self {
        Self { system, preprocessing, delays: DelayModel::none(), sensors: 1 }
    }

    /// Checks every type invariant and returns the violations, if any.
    ///
    /// Pure and idempotent; a valid config passes through untouched.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut violations = Vec::new();

        if !(self.system.sigma2_w > 0.0) {
            violations.push(Error::NonPositiveNoise {
                field: "system.sigma2_w",
                value: self.system.sigma2_w,
            });
        }
        if !(self.system.p0 >= 0.0) {
            violations.push(Error::NegativeInitialVariance { value: self.system.p0 });
        }
        if !self.system.a.is_finite() {
            violations.push(Error::NonPositiveRate { field: "system.a", value: self.system.a });
        }

        let b = self.preprocessing.b();
        if !(b > 0.0) {
            violations.push(Error::NonPositiveNoise { field: "preprocessing.b", value: b });
        }
        match self.preprocessing {
            PreprocessingModel::InversePower { gamma, .. }
            | PreprocessingModel::Exponential { gamma, .. } => {
                if !(gamma > 0.0) {
                    violations.push(Error::NonPositiveRate {
                        field: "preprocessing.gamma",
                        value: gamma,
                    });
                }
            }
            PreprocessingModel::InverseLinear { .. } => {}
        }

        match self.delays.comm {
            CommDelay::Constant { tau_c } if !(tau_c >= 0.0) => {
                violations.push(Error::NegativeDelayParam { field: "delays.tau_c", value: tau_c });
            }
            CommDelay::Compressing { c } if !(c > 0.0) => {
                violations.push(Error::NegativeDelayParam { field: "delays.c", value: c });
            }
            _ => {}
        }
        match self.delays.fusion {
            FusionDelay::Constant { tau_f } if !(tau_f >= 0.0) => {
                violations.push(Error::NegativeDelayParam { field: "delays.tau_f", value: tau_f });
            }
            FusionDelay::Compressing { f } if !(f > 0.0) => {
                violations.push(Error::NegativeDelayParam { field: "delays.f", value: f });
            }
            _ => {}
        }

        if self.sensors == 0 {
            violations.push(Error::ZeroSensors);
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }

    /// Serializes to the sectioned key/value config format; inverse of
    /// [`parse_config`].
    pub fn to_config_string(&self) -> String {
        config::write_config(self)
    }
}

/// Every invariant a config violates, with the offending field names.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Error>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(fmt, "invalid configuration:")?;
        for v in &self.violations {
            writeln!(fmt, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Latency ledger for one evaluation: preprocessing, communication, their
/// sum (the sensor delay), total fusion, and the grand total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    pub tau_p: f64,
    pub tau_c: f64,
    /// `tau_p + tau_c`: age of a measurement when it reaches the fusion center.
    pub tau_s: f64,
    /// Fusion latency summed over the active sensors.
    pub tau_f_tot: f64,
    /// `tau_s + tau_f_tot`: age of the freshest fused information.
    pub tau_tot: f64,
}

/// Steady-state prediction-error variance split into the projected filter
/// uncertainty and the process noise accumulated over the delay window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    /// Filter variance propagated open loop over `tau_tot`.
    pub estimation_part: f64,
    /// Process noise accumulated while the estimate ages.
    pub noise_part: f64,
    /// `estimation_part + noise_part`.
    pub total: f64,
    pub delays: DelayBreakdown,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid() -> NetworkConfig {
        NetworkConfig::single_sensor(
            ScalarSystem::new(-1.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        )
    }

    #[test]
    fn valid_config_passes() {
        assert!(valid().validate().is_ok());
    }

    #[test]
    fn zero_process_noise_is_rejected() {
        let mut cfg = valid();
        cfg.system.a = 0.0;
        cfg.system.sigma2_w = 0.0;
        let report = cfg.validate().unwrap_err();
        assert!(matches!(
            report.violations[0],
            Error::NonPositiveNoise { field: "system.sigma2_w", .. }
        ));
    }

    #[test]
    fn zero_sensors_is_rejected() {
        let mut cfg = valid();
        cfg.sensors = 0;
        let report = cfg.validate().unwrap_err();
        assert!(report.violations.contains(&Error::ZeroSensors));
    }

    #[test]
    fn all_violations_are_reported_together() {
        let cfg = NetworkConfig {
            system: ScalarSystem { a: 1.0, sigma2_w: -1.0, mu0: 0.0, p0: -2.0 },
            preprocessing: PreprocessingModel::InversePower { b: 0.0, gamma: 0.0 },
            delays: DelayModel {
                comm: CommDelay::Constant { tau_c: -0.5 },
                fusion: FusionDelay::Compressing { f: 0.0 },
            },
            sensors: 0,
        };
        let report = cfg.validate().unwrap_err();
        assert_eq!(report.violations.len(), 7);
    }

    #[test]
    fn validate_is_idempotent() {
        let cfg = valid();
        assert_eq!(cfg.validate(), cfg.validate());
    }

    #[test]
    fn none_delay_is_distinct_from_zero_constant() {
        assert_ne!(CommDelay::None, CommDelay::Constant { tau_c: 0.0 });
    }
}
