//! Closed-form steady-state error variance and its building blocks.
//!
//! The chain is: the preprocessing delay `tau` fixes the measurement-noise
//! variance, which fixes the steady-state Kalman variance of the (outdated)
//! filtered estimate; projecting that estimate open loop over the total
//! delay multiplies it by `exp(2 a tau_tot)` and adds the process noise
//! accumulated over the window. Everything here is a pure function.

use crate::model::{
    CommDelay, DelayBreakdown, FusionDelay, NetworkConfig, PreprocessingModel, ScalarSystem,
    VarianceBreakdown,
};
use crate::Error;

/// Below this, a delay fed to an inverse law counts as nonpositive rather
/// than producing a huge-but-finite variance.
const TAU_GUARD: f64 = 1e-300;

/// Variance limits of `P(tau)` at `tau -> 0+` and `tau -> inf`.
///
/// Both ends coincide: `sigma2_w / (2|a|)` for stable systems, infinite
/// otherwise. The whole communication-computation trade-off lives between
/// them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitPair {
    pub at_zero: f64,
    pub at_infinity: f64,
}

/// Measurement-noise variance `sigma2_v(tau)` under the given decay law.
///
/// Inverse laws require `tau > 0`; the exponential law admits `tau = 0`
/// (raw transmission) with variance `b`.
pub fn measurement_noise_variance(model: &PreprocessingModel, tau: f64) -> Result<f64, Error> {
    match *model {
        PreprocessingModel::InverseLinear { b } => {
            if !(tau > TAU_GUARD) {
                return Err(Error::NonPositiveTau { tau });
            }
            Ok(b / tau)
        }
        PreprocessingModel::InversePower { b, gamma } => {
            if !(tau > TAU_GUARD) {
                return Err(Error::NonPositiveTau { tau });
            }
            Ok(b / tau.powf(gamma))
        }
        PreprocessingModel::Exponential { b, gamma } => {
            if !(tau >= 0.0) {
                return Err(Error::NonPositiveTau { tau });
            }
            Ok(b * (-gamma * tau).exp())
        }
    }
}

/// Steady-state Kalman error variance for measurement-noise variance `r`:
/// `p = r (a + sqrt(a^2 + sigma2_w / r))`, the positive solution of the
/// scalar continuous Riccati balance `2 a p + sigma2_w - p^2 / r = 0`.
pub fn filter_steady_state_variance(system: &ScalarSystem, r: f64) -> Result<f64, Error> {
    if !(system.sigma2_w > 0.0) {
        return Err(Error::NonPositiveNoise { field: "sigma2_w", value: system.sigma2_w });
    }
    if !(r > 0.0) {
        return Err(Error::NonPositiveNoise { field: "r", value: r });
    }
    let a = system.a;
    let disc = (a * a + system.sigma2_w / r).sqrt();
    // For a < 0 the direct form a + disc cancels as r grows; the
    // rationalized form sigma2_w / (disc - a) stays exact there.
    if a < 0.0 {
        Ok(system.sigma2_w / (disc - a))
    } else {
        Ok(r * (a + disc))
    }
}

/// Process noise accumulated over an open-loop window of length `d`:
/// `sigma2_w (e^{2ad} - 1) / (2a)`, with the exact `a -> 0` limit
/// `sigma2_w d`. Nonnegative for every sign of `a`.
fn accumulated_process_noise(system: &ScalarSystem, d: f64) -> f64 {
    let x = 2.0 * system.a * d;
    if x.abs() < 1e-12 {
        system.sigma2_w * d
    } else {
        system.sigma2_w * x.exp_m1() / (2.0 * system.a)
    }
}

/// Propagates a variance `p` open loop for `d` time units:
/// `p e^{2ad} + sigma2_w (e^{2ad} - 1) / (2a)`.
pub fn open_loop_projection(p: f64, system: &ScalarSystem, d: f64) -> f64 {
    p * (2.0 * system.a * d).exp() + accumulated_process_noise(system, d)
}

/// Resolves the delay laws at preprocessing delay `tau` with `sensors_used`
/// active sensors. Fusion latency scales with the sensor count.
pub fn total_delay(
    config: &NetworkConfig,
    tau: f64,
    sensors_used: u32,
) -> Result<DelayBreakdown, Error> {
    if sensors_used < 1 || sensors_used > config.sensors {
        return Err(Error::SensorCountOutOfRange {
            used: sensors_used,
            available: config.sensors,
        });
    }
    let tau_c = match config.delays.comm {
        CommDelay::None => 0.0,
        CommDelay::Constant { tau_c } => tau_c,
        CommDelay::Compressing { c } => {
            if !(tau > TAU_GUARD) {
                return Err(Error::NonPositiveTau { tau });
            }
            c / tau
        }
    };
    let tau_f = match config.delays.fusion {
        FusionDelay::None => 0.0,
        FusionDelay::Constant { tau_f } => tau_f,
        FusionDelay::Compressing { f } => {
            if !(tau > TAU_GUARD) {
                return Err(Error::NonPositiveTau { tau });
            }
            f / tau
        }
    };
    let tau_s = tau + tau_c;
    let tau_f_tot = f64::from(sensors_used) * tau_f;
    Ok(DelayBreakdown { tau_p: tau, tau_c, tau_s, tau_f_tot, tau_tot: tau_s + tau_f_tot })
}

/// Steady-state prediction-error variance at preprocessing delay `tau` with
/// `sensors_used` active sensors, split into its two contributions.
///
/// The homogeneous network is folded into one virtual sensor whose
/// measurement-noise variance is divided by the sensor count; the fusion
/// delay still scales with the full count.
pub fn steady_state_error_variance(
    config: &NetworkConfig,
    tau: f64,
    sensors_used: u32,
) -> Result<VarianceBreakdown, Error> {
    let delays = total_delay(config, tau, sensors_used)?;
    let r = measurement_noise_variance(&config.preprocessing, tau)? / f64::from(sensors_used);
    let p_filter = filter_steady_state_variance(&config.system, r)?;
    let estimation_part = p_filter * (2.0 * config.system.a * delays.tau_tot).exp();
    let noise_part = accumulated_process_noise(&config.system, delays.tau_tot);
    Ok(VarianceBreakdown {
        estimation_part,
        noise_part,
        total: estimation_part + noise_part,
        delays,
    })
}

/// Limits of the variance at the extremes of the preprocessing delay.
/// They depend only on the plant, not on the sensor count or delay laws.
pub fn variance_limits(config: &NetworkConfig, sensors_used: u32) -> LimitPair {
    debug_assert!(sensors_used >= 1 && sensors_used <= config.sensors);
    let _ = sensors_used;
    let sys = &config.system;
    if sys.a < 0.0 {
        let lim = sys.sigma2_w / (2.0 * sys.a.abs());
        LimitPair { at_zero: lim, at_infinity: lim }
    } else {
        LimitPair { at_zero: f64::INFINITY, at_infinity: f64::INFINITY }
    }
}

/// Upper bound on the optimal preprocessing delay for the inverse-linear
/// law, `s = sigma2_w / b`:
/// `1/(2|a|)` for fast dynamics, `(1/(4s))^(1/3)` otherwise.
pub fn tau_upper_bound(a: f64, s: f64) -> f64 {
    let abs_a = a.abs();
    if abs_a > (s / 2.0).cbrt() {
        1.0 / (2.0 * abs_a)
    } else {
        (1.0 / (4.0 * s)).cbrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DelayModel;

    fn system(a: f64, sigma2_w: f64) -> ScalarSystem {
        ScalarSystem::new(a, sigma2_w)
    }

    #[test]
    fn noise_variance_by_kind() {
        let inv = PreprocessingModel::InverseLinear { b: 1.0 };
        assert_eq!(measurement_noise_variance(&inv, 1.0).unwrap(), 1.0);

        let pow = PreprocessingModel::InversePower { b: 2.0, gamma: 2.0 };
        assert_eq!(measurement_noise_variance(&pow, 2.0).unwrap(), 0.5);

        let exp = PreprocessingModel::Exponential { b: 1.0, gamma: 0.5 };
        assert_eq!(measurement_noise_variance(&exp, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn inverse_laws_reject_nonpositive_tau() {
        let inv = PreprocessingModel::InverseLinear { b: 1.0 };
        assert!(matches!(
            measurement_noise_variance(&inv, 0.0),
            Err(Error::NonPositiveTau { .. })
        ));
        assert!(matches!(
            measurement_noise_variance(&inv, 1e-301),
            Err(Error::NonPositiveTau { .. })
        ));
        let exp = PreprocessingModel::Exponential { b: 1.0, gamma: 1.0 };
        assert!(measurement_noise_variance(&exp, 0.0).is_ok());
        assert!(measurement_noise_variance(&exp, -1.0).is_err());
    }

    #[test]
    fn riccati_fixed_points() {
        assert_eq!(filter_steady_state_variance(&system(0.0, 1.0), 1.0).unwrap(), 1.0);
        // 2ap + sigma2_w - p^2/r = 0 at p = 1 for a=-1, sigma2_w=3, r=1
        let p = filter_steady_state_variance(&system(-1.0, 3.0), 1.0).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        let p = filter_steady_state_variance(&system(1.0, 1.0), 1.0).unwrap();
        assert!((p - (1.0 + 2.0_f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn riccati_rejects_bad_noise() {
        assert!(filter_steady_state_variance(&system(0.0, 0.0), 1.0).is_err());
        assert!(filter_steady_state_variance(&system(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn projection_examples() {
        assert_eq!(open_loop_projection(5.0, &system(-2.0, 1.0), 0.0), 5.0);
        assert_eq!(open_loop_projection(1.0, &system(0.0, 2.0), 3.0), 7.0);
        // e^{2ad} = 1/2 at a=-1, d=ln2/2: 1*0.5 + 2*(0.5-1)/(-2) = 1
        let p = open_loop_projection(1.0, &system(-1.0, 2.0), 0.5 * 2.0_f64.ln());
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn delay_ledger() {
        let mut cfg = NetworkConfig::single_sensor(
            system(-1.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        cfg.sensors = 10;

        let d = total_delay(&cfg, 0.3, 4).unwrap();
        assert_eq!((d.tau_p, d.tau_c, d.tau_s, d.tau_f_tot, d.tau_tot), (0.3, 0.0, 0.3, 0.0, 0.3));

        cfg.delays = DelayModel {
            comm: CommDelay::Constant { tau_c: 0.1 },
            fusion: FusionDelay::Constant { tau_f: 0.02 },
        };
        let d = total_delay(&cfg, 0.1, 10).unwrap();
        assert!((d.tau_tot - 0.4).abs() < 1e-15);

        cfg.delays = DelayModel { comm: CommDelay::Compressing { c: 1.0 }, fusion: FusionDelay::None };
        let d = total_delay(&cfg, 0.5, 1).unwrap();
        assert!((d.tau_s - 2.5).abs() < 1e-15);
        assert!(matches!(total_delay(&cfg, 0.0, 1), Err(Error::NonPositiveTau { .. })));
    }

    #[test]
    fn sensor_count_bounds_are_enforced() {
        let cfg = NetworkConfig::single_sensor(
            system(-1.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        assert!(matches!(
            total_delay(&cfg, 0.1, 2),
            Err(Error::SensorCountOutOfRange { used: 2, available: 1 })
        ));
        assert!(total_delay(&cfg, 0.1, 1).is_ok());
    }

    #[test]
    fn variance_at_zero_pole_splits_cleanly() {
        // a=0: p_inf = sqrt(sigma2_w b / tau) projected as p + sigma2_w tau
        let cfg = NetworkConfig::single_sensor(
            system(0.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        let v = steady_state_error_variance(&cfg, 1.0, 1).unwrap();
        assert!((v.estimation_part - 1.0).abs() < 1e-14);
        assert!((v.noise_part - 1.0).abs() < 1e-14);
        assert!((v.total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn limits_by_stability() {
        let mk = |a: f64| {
            NetworkConfig::single_sensor(
                system(a, 1.0),
                PreprocessingModel::InverseLinear { b: 1.0 },
            )
        };
        let l = variance_limits(&mk(-0.1), 1);
        assert_eq!((l.at_zero, l.at_infinity), (5.0, 5.0));
        assert_eq!(variance_limits(&mk(0.0), 1).at_zero, f64::INFINITY);
        assert_eq!(variance_limits(&mk(0.1), 1).at_infinity, f64::INFINITY);
    }

    #[test]
    fn upper_bound_branches() {
        assert_eq!(tau_upper_bound(1.0, 1.0), 0.5);
        assert!((tau_upper_bound(0.0, 1.0) - 0.25_f64.cbrt()).abs() < 1e-15);
        assert!((tau_upper_bound(0.5, 2.0) - 0.5).abs() < 1e-15);
    }
}
