//! Parameter sets behind the bundled reference figures.
//!
//! The CLI `reproduce` command and the validation suite both read from
//! here, so the emitted datasets and the assertions can never drift apart.
//! Figures are numbered 2 through 6, matching the dataset names the CLI
//! emits.

use crate::model::{
    CommDelay, DelayModel, FusionDelay, NetworkConfig, PreprocessingModel, ScalarSystem,
};

/// Figure 2: the variance against preprocessing delay, split into the
/// estimation and process-noise contributions.
#[derive(Debug, Clone, Copy)]
pub struct DecompositionFigure {
    pub config: NetworkConfig,
    pub tau_range: (f64, f64),
    pub points: usize,
}

pub fn variance_decomposition() -> DecompositionFigure {
    DecompositionFigure {
        config: NetworkConfig::single_sensor(
            ScalarSystem::new(1.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        ),
        tau_range: (0.02, 2.0),
        points: 400,
    }
}

/// Figure 3: optimal delay and its upper bound as functions of the noise
/// ratio `s = sigma2_w / b` at fixed `a = 1`.
#[derive(Debug, Clone, Copy)]
pub struct DelaySweepFigure {
    pub a: f64,
    /// Log-spaced range of `s`.
    pub s_range: (f64, f64),
    pub points: usize,
}

pub fn delay_vs_noise_sweep() -> DelaySweepFigure {
    DelaySweepFigure { a: 1.0, s_range: (0.1, 100.0), points: 200 }
}

/// One panel of figure 4: the variance under no communication delay, a
/// constant delay, and a compressing delay, on a common `tau` grid.
#[derive(Debug, Clone, Copy)]
pub struct DelayModelPanel {
    pub base: NetworkConfig,
    pub tau_c: f64,
    pub c: f64,
    pub tau_range: (f64, f64),
    pub points: usize,
}

impl DelayModelPanel {
    pub fn without_comm(&self) -> NetworkConfig {
        self.base
    }

    pub fn with_constant_comm(&self) -> NetworkConfig {
        let mut cfg = self.base;
        cfg.delays.comm = CommDelay::Constant { tau_c: self.tau_c };
        cfg
    }

    pub fn with_compressing_comm(&self) -> NetworkConfig {
        let mut cfg = self.base;
        cfg.delays.comm = CommDelay::Compressing { c: self.c };
        cfg
    }
}

/// The unstable (`a = 0.1`) and stable (`a = -0.1`) panels of figure 4.
pub fn delay_model_panels() -> [DelayModelPanel; 2] {
    let panel = |a: f64| DelayModelPanel {
        base: NetworkConfig::single_sensor(
            ScalarSystem::new(a, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        ),
        tau_c: 1.0,
        c: 1.0,
        tau_range: (0.05, 10.0),
        points: 240,
    };
    [panel(0.1), panel(-0.1)]
}

/// Figure 5: the variance against the active sensor count at fixed
/// `tau = 0.1`, with and without the per-sensor fusion delay.
#[derive(Debug, Clone, Copy)]
pub struct SensorCountFigure {
    pub config: NetworkConfig,
    pub tau: f64,
}

impl SensorCountFigure {
    /// The same network with the fusion delay struck out.
    pub fn without_fusion(&self) -> NetworkConfig {
        let mut cfg = self.config;
        cfg.delays.fusion = FusionDelay::None;
        cfg
    }
}

pub fn sensor_count_curves() -> SensorCountFigure {
    SensorCountFigure { config: ten_sensor_network(), tau: 0.1 }
}

/// Figure 6: the sensor-count curve of figure 5 swept over four fixed
/// preprocessing delays.
#[derive(Debug, Clone, Copy)]
pub struct SensorCountByTauFigure {
    pub config: NetworkConfig,
    pub taus: [f64; 4],
}

pub fn sensor_count_by_tau() -> SensorCountByTauFigure {
    SensorCountByTauFigure { config: ten_sensor_network(), taus: [0.05, 0.1, 0.15, 0.2] }
}

fn ten_sensor_network() -> NetworkConfig {
    NetworkConfig {
        system: ScalarSystem { a: -1.0, sigma2_w: 10.0, mu0: 0.0, p0: 1.0 },
        preprocessing: PreprocessingModel::InverseLinear { b: 0.1 },
        delays: DelayModel {
            comm: CommDelay::Constant { tau_c: 0.1 },
            fusion: FusionDelay::Constant { tau_f: 0.02 },
        },
        sensors: 10,
    }
}
