//! Property tests for the closed-form layer.

use procnet::analytic::{
    filter_steady_state_variance, open_loop_projection, steady_state_error_variance,
    variance_limits,
};
use procnet::model::{CommDelay, NetworkConfig, PreprocessingModel, ScalarSystem};
use procnet::optimize::optimal_tau;
use proptest::prelude::*;

fn base_config(a: f64, sigma2_w: f64, b: f64) -> NetworkConfig {
    NetworkConfig::single_sensor(
        ScalarSystem::new(a, sigma2_w),
        PreprocessingModel::InverseLinear { b },
    )
}

proptest! {
    /// The returned variance satisfies the continuous Riccati balance
    /// 2 a p + sigma2_w - p^2 / r = 0.
    #[test]
    fn riccati_residual_vanishes(
        a in -3.0..3.0f64,
        sigma2_w in 1e-3..10.0f64,
        r in 1e-3..10.0f64,
    ) {
        let p = filter_steady_state_variance(&ScalarSystem::new(a, sigma2_w), r).unwrap();
        let residual = 2.0 * a * p + sigma2_w - p * p / r;
        prop_assert!(residual.abs() <= 1e-9 * (p * p / r).max(1.0));
    }

    /// total = estimation + noise by construction, and the accumulated
    /// process noise is nonnegative for either sign of the pole.
    #[test]
    fn decomposition_holds(
        a in -3.0..3.0f64,
        sigma2_w in 1e-3..10.0f64,
        b in 1e-3..10.0f64,
        tau in 1e-4..10.0f64,
    ) {
        let v = steady_state_error_variance(&base_config(a, sigma2_w, b), tau, 1).unwrap();
        prop_assert_eq!(v.total, v.estimation_part + v.noise_part);
        prop_assert!(v.noise_part >= 0.0);
        prop_assert!(v.estimation_part >= 0.0);
        prop_assert!(v.total >= 0.0);
    }

    /// A constant communication delay acts affinely on the whole curve:
    /// P(tau; tau_c) = e^{2 a tau_c} P(tau; 0) + sigma2_w (e^{2 a tau_c}-1)/(2a).
    #[test]
    fn constant_delay_is_affine(
        a in -3.0..3.0f64,
        sigma2_w in 1e-3..10.0f64,
        b in 1e-3..10.0f64,
        tau in 1e-3..5.0f64,
        tau_c in 0.0..5.0f64,
    ) {
        let plain = base_config(a, sigma2_w, b);
        let mut delayed = plain;
        delayed.delays.comm = CommDelay::Constant { tau_c };

        let lhs = steady_state_error_variance(&delayed, tau, 1).unwrap().total;
        let p0 = steady_state_error_variance(&plain, tau, 1).unwrap().total;
        let scale = (2.0 * a * tau_c).exp();
        let shift = if a == 0.0 {
            sigma2_w * tau_c
        } else {
            sigma2_w * (scale - 1.0) / (2.0 * a)
        };
        let rhs = scale * p0 + shift;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300),
            "lhs={lhs} rhs={rhs}");
    }

    /// The open-loop projection is monotone nondecreasing in the delay for
    /// unstable poles and the identity at d = 0.
    #[test]
    fn projection_monotone_when_unstable(
        a in 0.0..3.0f64,
        sigma2_w in 1e-3..10.0f64,
        p in 0.0..10.0f64,
        d1 in 0.0..5.0f64,
        d2 in 0.0..5.0f64,
    ) {
        let sys = ScalarSystem::new(a, sigma2_w);
        prop_assert_eq!(open_loop_projection(p, &sys, 0.0), p);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(open_loop_projection(p, &sys, lo) <= open_loop_projection(p, &sys, hi));
    }
}

#[test]
fn pole_to_zero_is_continuous() {
    // |result(a = 1e-9) - result(a = 0)| <= 1e-6 * result(a = 0) on a fixed
    // parameter grid, for both the projection and the full variance.
    for &(sigma2_w, b, tau, p) in &[
        (1.0, 1.0, 0.5, 2.0),
        (5.0, 0.2, 1.5, 0.4),
        (0.1, 7.0, 3.0, 9.0),
        (2.5, 2.5, 0.05, 0.0),
    ] {
        let near = ScalarSystem::new(1e-9, sigma2_w);
        let zero = ScalarSystem::new(0.0, sigma2_w);
        let proj_near = open_loop_projection(p, &near, tau);
        let proj_zero = open_loop_projection(p, &zero, tau);
        assert!(
            (proj_near - proj_zero).abs() <= 1e-6 * proj_zero,
            "projection jump at a->0: {proj_near} vs {proj_zero}"
        );

        let v_near = steady_state_error_variance(&base_config(1e-9, sigma2_w, b), tau, 1)
            .unwrap()
            .total;
        let v_zero = steady_state_error_variance(&base_config(0.0, sigma2_w, b), tau, 1)
            .unwrap()
            .total;
        assert!(
            (v_near - v_zero).abs() <= 1e-6 * v_zero,
            "variance jump at a->0: {v_near} vs {v_zero}"
        );
    }
}

#[test]
fn variance_approaches_the_limits() {
    // Spot check of the limit behavior; the validation suite sweeps this
    // over random configurations.
    for &(a, sigma2_w, b) in &[(-1.0, 3.0, 0.5), (-0.3, 1.0, 2.0)] {
        let cfg = base_config(a, sigma2_w, b);
        let lim = variance_limits(&cfg, 1).at_zero;
        let near_zero = steady_state_error_variance(&cfg, 1e-7, 1).unwrap().total;
        let near_inf =
            steady_state_error_variance(&cfg, 1e4 * (1.0f64).max(1.0 / a.abs()), 1)
                .unwrap()
                .total;
        assert!((near_zero - lim).abs() <= 0.01 * lim);
        assert!((near_inf - lim).abs() <= 0.01 * lim);
    }

    // Unstable: both extremes dwarf the optimum.
    for &a in &[0.0, 0.5] {
        let cfg = base_config(a, 1.0, 1.0);
        let best = optimal_tau(&cfg, 1).unwrap().value;
        let tau_hi = if a > 0.0 { 1e4 / a } else { 1e4 };
        for tau in [1e-7, tau_hi] {
            let v = steady_state_error_variance(&cfg, tau, 1).unwrap().total;
            assert!(v > 1e3 * best, "a={a} tau={tau}: {v} not >> {best}");
        }
    }
}
