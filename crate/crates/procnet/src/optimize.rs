//! Optimal preprocessing delays and sensor counts.
//!
//! Wherever the stationarity condition is polynomial (inverse-linear noise,
//! optionally with compressing delays) the optimum is pinned down by
//! bracketed bisection on a guaranteed sign change. The remaining
//! quasi-convex cases fall back to golden-section search. Constant delays
//! never move the minimizer (they act affinely on the variance), so the
//! dispatcher absorbs them and routes to the matching solver.

use crate::analytic::{steady_state_error_variance, tau_upper_bound};
use crate::model::{CommDelay, FusionDelay, NetworkConfig, PreprocessingModel, ScalarSystem};
use crate::Error;

/// How an optimum was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Unique positive root of the cubic stationarity condition.
    CubicRoot,
    /// Largest positive root of the quintic stationarity condition.
    QuinticRoot,
    /// Closed-form optimum of the exponential-decay model.
    ClosedFormExp,
    /// Golden-section search on a quasi-convex objective.
    GoldenSection,
    /// Zero preprocessing: the decay rate is too slow to pay for itself.
    RawTransmission,
}

impl std::fmt::Display for Method {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::CubicRoot => "cubic_root",
            Method::QuinticRoot => "quintic_root",
            Method::ClosedFormExp => "closed_form_exp",
            Method::GoldenSection => "golden_section",
            Method::RawTransmission => "raw_transmission",
        };
        fmt.write_str(name)
    }
}

/// An optimal preprocessing delay together with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub tau_opt: f64,
    /// Steady-state variance at `tau_opt` (all configured delays included).
    pub value: f64,
    pub method: Method,
    /// Search bracket that contained the optimum. `(0, 0)` for raw
    /// transmission.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

impl Optimum {
    /// `tau_opt` rounded *up* to a multiple of `quantum`.
    ///
    /// The variance climbs much faster left of the optimum than right of
    /// it, so when the delay must be quantized, rounding in excess is the
    /// safe direction. Never applied silently.
    pub fn tau_opt_ceil(&self, quantum: f64) -> f64 {
        assert!(quantum > 0.0, "quantum must be > 0");
        (self.tau_opt / quantum).ceil() * quantum
    }
}

/// First derivatives of the optimal delay with respect to the noise ratio
/// `s = sigma2_w / b` and to `a^2`. Both are negative everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub dtau_ds: f64,
    pub dtau_da2: f64,
}

/// Result of the exhaustive sensor-count scan at fixed `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorCountResult {
    pub s_opt: u32,
    pub value: f64,
    /// A second sensor count whose variance matches `value` to within the
    /// tie tolerance, if one exists.
    pub tie_with: Option<u32>,
    /// `(S, P(S))` for every S from 1 to the network size.
    pub table: Vec<(u32, f64)>,
}

/// Joint optimum over sensor count and preprocessing delay, with the full
/// per-count table (uniqueness over the discrete count is not assumed).
#[derive(Debug, Clone, PartialEq)]
pub struct JointOptimum {
    pub sensors_used: u32,
    pub optimum: Optimum,
    /// Best delay for every candidate count, ordered by S = 1, 2, ...
    pub per_count: Vec<Optimum>,
}

const TAU_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: u32 = 60;

/// Optimal delay under the inverse-linear law with no communication or
/// fusion latency: the unique positive root of
/// `(sigma2_w/b) tau^3 + a^2 tau^2 - 1/4 = 0`,
/// bracketed by `[0, tau_upper_bound]` and bisected to machine precision.
pub fn optimal_tau_inverse_linear(system: &ScalarSystem, b: f64) -> Result<Optimum, Error> {
    let (tau, bracket, iterations) = cubic_root(system, b)?;
    let cfg = NetworkConfig::single_sensor(*system, PreprocessingModel::InverseLinear { b });
    let value = steady_state_error_variance(&cfg, tau, 1)?.total;
    Ok(Optimum { tau_opt: tau, value, method: Method::CubicRoot, bracket, iterations })
}

fn cubic_root(system: &ScalarSystem, b: f64) -> Result<(f64, (f64, f64), u32), Error> {
    if !(system.sigma2_w > 0.0) {
        return Err(Error::NonPositiveNoise { field: "sigma2_w", value: system.sigma2_w });
    }
    if !(b > 0.0) {
        return Err(Error::NonPositiveNoise { field: "b", value: b });
    }
    let s = system.sigma2_w / b;
    let a2 = system.a * system.a;
    let f = |t: f64| (s * t + a2) * t * t - 0.25;

    // F(0) = -1/4 and F(tau_u) >= 0 analytically; nudge the top of the
    // bracket if rounding in tau_u left it a hair below zero.
    let mut hi = tau_upper_bound(system.a, s);
    while f(hi) < 0.0 {
        hi *= 1.0 + 1e-12;
    }
    let (root, iterations) = bisect(f, 0.0, hi);
    Ok((root, (0.0, hi), iterations))
}

/// Optimal delay under the inverse-power law `b / tau^gamma`, located by
/// golden-section search (the objective is strictly quasi-convex; there is
/// no polynomial stationarity condition for general `gamma`).
pub fn optimal_tau_power(system: &ScalarSystem, b: f64, gamma: f64) -> Result<Optimum, Error> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveRate { field: "gamma", value: gamma });
    }
    let cfg = NetworkConfig::single_sensor(*system, PreprocessingModel::InversePower { b, gamma });
    cfg.validate().map_err(|r| r.violations[0].clone())?;
    let p = |t: f64| total_or_inf(&cfg, t, 1);
    golden_optimum(p, 4.0 * tau_upper_bound(system.a, system.sigma2_w / b))
}

/// Optimal delay under the exponential law `b e^{-gamma tau}`.
///
/// Preprocessing only pays off when the decay rate beats the phase
/// threshold `2 sqrt(sigma2_w/b + a^2)`; below it, zero preprocessing (raw
/// transmission) is optimal and the returned value is the variance at
/// `tau = 0`, which is finite since the exponential law has noise `b` there.
pub fn optimal_tau_exponential(system: &ScalarSystem, b: f64, gamma: f64) -> Result<Optimum, Error> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveRate { field: "gamma", value: gamma });
    }
    let cfg = NetworkConfig::single_sensor(*system, PreprocessingModel::Exponential { b, gamma });
    cfg.validate().map_err(|r| r.violations[0].clone())?;
    if gamma <= raw_transmission_threshold(system.a, system.sigma2_w / b) {
        let value = steady_state_error_variance(&cfg, 0.0, 1)?.total;
        return Ok(Optimum {
            tau_opt: 0.0,
            value,
            method: Method::RawTransmission,
            bracket: (0.0, 0.0),
            iterations: 0,
        });
    }
    let p = |t: f64| total_or_inf(&cfg, t, 1);
    let opt = golden_optimum(p, 4.0 * tau_upper_bound(system.a, system.sigma2_w / b))?;
    debug_assert!(opt.tau_opt > 0.0, "interior optimum expected above the phase threshold");
    Ok(opt)
}

/// Decay rates at or below this threshold make zero preprocessing optimal
/// for the exponential law. `s = sigma2_w / b`.
pub fn raw_transmission_threshold(a: f64, s: f64) -> f64 {
    2.0 * (s + a * a).sqrt()
}

/// Optimal delay under the inverse-linear law with a compressing
/// communication delay `c / tau`.
///
/// Stationary points are the positive roots of a quintic with exactly two
/// positive solutions (an interior maximum and the global minimum, in that
/// order); the optimum is the largest root, located by a log-spaced
/// sign-change scan plus bisection.
pub fn optimal_tau_with_compression(
    system: &ScalarSystem,
    b: f64,
    c: f64,
) -> Result<Optimum, Error> {
    if !(c > 0.0) {
        return Err(Error::NegativeDelayParam { field: "c", value: c });
    }
    let mut cfg =
        NetworkConfig::single_sensor(*system, PreprocessingModel::InverseLinear { b });
    cfg.delays.comm = CommDelay::Compressing { c };
    cfg.validate().map_err(|r| r.violations[0].clone())?;
    let (tau, bracket, iterations) = quintic_largest_root(system, b, c)?;
    let value = steady_state_error_variance(&cfg, tau, 1)?.total;

    // The largest root is the unique global minimum; every scanned point
    // must sit at or above it.
    let (lo, hi) = bracket;
    for t in log_grid(lo, hi, SCAN_POINTS) {
        let p = total_or_inf(&cfg, t, 1);
        assert!(
            value <= p * (1.0 + 1e-9) + 1e-300,
            "scan point tau={t} has P={p} below the claimed minimum {value}"
        );
    }

    Ok(Optimum { tau_opt: tau, value, method: Method::QuinticRoot, bracket, iterations })
}

const SCAN_POINTS: usize = 4000;

/// Evenly log-spaced grid from `lo` to `hi`, inclusive.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// All positive roots of the quintic stationarity condition (ascending),
/// with the total bisection iteration count.
fn quintic_positive_roots(
    system: &ScalarSystem,
    b: f64,
    c: f64,
) -> Result<(Vec<f64>, u32), Error> {
    if !(system.sigma2_w > 0.0) {
        return Err(Error::NonPositiveNoise { field: "sigma2_w", value: system.sigma2_w });
    }
    if !(b > 0.0) {
        return Err(Error::NonPositiveNoise { field: "b", value: b });
    }
    let s = system.sigma2_w / b;
    let a2 = system.a * system.a;
    let g = |t: f64| {
        ((((s * t + a2) * t - 2.0 * c * s) * t - (2.0 * a2 * c + 0.25)) * t + c * c * s) * t
            + a2 * c * c
    };

    let tau_scale = c.sqrt().max(tau_upper_bound(system.a, s));
    let lo = 1e-6;
    let hi = 1e3 * tau_scale;
    let grid = log_grid(lo, hi, SCAN_POINTS);

    let mut roots: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut prev_t = grid[0];
    let mut prev_g = g(prev_t);
    for &t in &grid[1..] {
        let cur_g = g(t);
        if prev_g == 0.0 {
            push_root(&mut roots, prev_t);
        } else if prev_g * cur_g < 0.0 {
            // Bisection wants the negative side on the left.
            let (root, it) = if prev_g < 0.0 {
                bisect(g, prev_t, t)
            } else {
                bisect(|x| -g(x), prev_t, t)
            };
            iterations += it;
            push_root(&mut roots, root);
        }
        prev_t = t;
        prev_g = cur_g;
    }
    if prev_g == 0.0 {
        push_root(&mut roots, prev_t);
    }
    if roots.is_empty() {
        return Err(Error::RootScanFailure { lo, hi });
    }
    Ok((roots, iterations))
}

fn quintic_largest_root(
    system: &ScalarSystem,
    b: f64,
    c: f64,
) -> Result<(f64, (f64, f64), u32), Error> {
    let s = system.sigma2_w / b;
    let tau_scale = c.sqrt().max(tau_upper_bound(system.a, s));
    let (roots, iterations) = quintic_positive_roots(system, b, c)?;
    let tau = *roots.last().expect("non-empty by construction");
    Ok((tau, (1e-6, 1e3 * tau_scale), iterations))
}

fn push_root(roots: &mut Vec<f64>, root: f64) {
    // Collapse near-identical roots from adjacent grid cells.
    if roots.iter().all(|&r| (r - root).abs() > 1e-9 * root.max(1.0)) {
        roots.push(root);
    }
}

/// Positive roots of the quintic stationarity condition for the compressing
/// communication model, ascending. Exposed for structural checks.
pub fn compression_critical_points(
    system: &ScalarSystem,
    b: f64,
    c: f64,
) -> Result<Vec<f64>, Error> {
    quintic_positive_roots(system, b, c).map(|(roots, _)| roots)
}

/// Optimal preprocessing delay for a full network configuration with
/// `sensors_used` active sensors.
///
/// The homogeneous network folds into one virtual sensor (`b / S`), constant
/// delays are absorbed (they rescale the variance affinely and never move
/// the minimizer), and compressing communication/fusion coefficients combine
/// into a single `c + S f`. The result routes to the cubic or quintic
/// solver when the combination has a polynomial stationarity condition, to
/// the phase-transition check for the exponential law, and to golden-section
/// search otherwise. The reported value always includes every configured
/// delay.
pub fn optimal_tau(config: &NetworkConfig, sensors_used: u32) -> Result<Optimum, Error> {
    config.validate().map_err(|r| r.violations[0].clone())?;
    if sensors_used < 1 || sensors_used > config.sensors {
        return Err(Error::SensorCountOutOfRange { used: sensors_used, available: config.sensors });
    }

    let system = &config.system;
    let b_eff = config.preprocessing.b() / f64::from(sensors_used);
    let comm_c = match config.delays.comm {
        CommDelay::Compressing { c } => c,
        _ => 0.0,
    };
    let fusion_f = match config.delays.fusion {
        FusionDelay::Compressing { f } => f,
        _ => 0.0,
    };
    let c_eff = comm_c + f64::from(sensors_used) * fusion_f;

    let with_value = |mut opt: Optimum| -> Result<Optimum, Error> {
        opt.value = steady_state_error_variance(config, opt.tau_opt, sensors_used)?.total;
        Ok(opt)
    };

    match config.preprocessing {
        PreprocessingModel::InverseLinear { .. } => {
            if c_eff > 0.0 {
                let (tau, bracket, iterations) = quintic_largest_root(system, b_eff, c_eff)?;
                with_value(Optimum {
                    tau_opt: tau,
                    value: 0.0,
                    method: Method::QuinticRoot,
                    bracket,
                    iterations,
                })
            } else {
                let (tau, bracket, iterations) = cubic_root(system, b_eff)?;
                with_value(Optimum {
                    tau_opt: tau,
                    value: 0.0,
                    method: Method::CubicRoot,
                    bracket,
                    iterations,
                })
            }
        }
        PreprocessingModel::Exponential { gamma, .. } if c_eff == 0.0 => {
            if gamma <= raw_transmission_threshold(system.a, system.sigma2_w / b_eff) {
                // Raw transmission: tau = 0 is in the exponential law's
                // domain, and constant delays still apply to the value.
                with_value(Optimum {
                    tau_opt: 0.0,
                    value: 0.0,
                    method: Method::RawTransmission,
                    bracket: (0.0, 0.0),
                    iterations: 0,
                })
            } else {
                let p = |t: f64| total_or_inf(config, t, sensors_used);
                golden_optimum(p, 4.0 * tau_upper_bound(system.a, system.sigma2_w / b_eff))
            }
        }
        _ => {
            // Inverse-power generally, or exponential with a compressing
            // delay (where raw transmission would mean infinite latency).
            let hi0 = 4.0 * tau_upper_bound(system.a, system.sigma2_w / b_eff).max(c_eff.sqrt());
            let p = |t: f64| total_or_inf(config, t, sensors_used);
            golden_optimum(p, hi0)
        }
    }
}

/// Closed-form sensitivities of the inverse-linear optimal delay, evaluated
/// at the optimum: `dtau/ds = -tau^2 / (3 s tau + 2 a^2)` and
/// `dtau/da^2 = -tau / (3 s tau + 2 a^2)`.
pub fn tau_opt_sensitivity(system: &ScalarSystem, b: f64) -> Result<Sensitivity, Error> {
    let (tau, _, _) = cubic_root(system, b)?;
    let s = system.sigma2_w / b;
    let den = 3.0 * s * tau + 2.0 * system.a * system.a;
    Ok(Sensitivity { dtau_ds: -tau * tau / den, dtau_da2: -tau / den })
}

/// Exhaustively evaluates the variance for every sensor count from 1 to the
/// network size at fixed `tau`, returning the minimizer (smallest count on
/// exact ties) and the full table.
pub fn optimal_sensor_count(config: &NetworkConfig, tau: f64) -> Result<SensorCountResult, Error> {
    config.validate().map_err(|r| r.violations[0].clone())?;
    let mut table = Vec::with_capacity(config.sensors as usize);
    for s in 1..=config.sensors {
        table.push((s, steady_state_error_variance(config, tau, s)?.total));
    }
    let (s_opt, value) = table
        .iter()
        .copied()
        .min_by(|x, y| x.1.partial_cmp(&y.1).expect("variance is never NaN").then(x.0.cmp(&y.0)))
        .expect("table is non-empty: sensors >= 1");
    let tie_with = table
        .iter()
        .filter(|&&(s, _)| s != s_opt)
        .filter(|&&(_, p)| (p - value).abs() <= TIE_TOL * value.abs().max(1e-300))
        .map(|&(s, _)| s)
        .min();
    Ok(SensorCountResult { s_opt, value, tie_with, table })
}

/// Jointly optimizes the sensor count and the preprocessing delay by
/// solving the delay problem for every count and keeping the best pair
/// (smallest count on ties). The per-count table is reported in full.
pub fn joint_optimize(config: &NetworkConfig) -> Result<JointOptimum, Error> {
    config.validate().map_err(|r| r.violations[0].clone())?;
    let mut per_count = Vec::with_capacity(config.sensors as usize);
    for s in 1..=config.sensors {
        per_count.push(optimal_tau(config, s)?);
    }
    let best = per_count
        .iter()
        .enumerate()
        .min_by(|(i, x), (j, y)| {
            x.value.partial_cmp(&y.value).expect("variance is never NaN").then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .expect("per_count is non-empty: sensors >= 1");
    Ok(JointOptimum {
        sensors_used: best as u32 + 1,
        optimum: per_count[best],
        per_count,
    })
}

// ---------------------------------------------------------------------------
// search primitives

/// Bisection on a sign change `f(lo) <= 0 <= f(hi)`, run until the bracket
/// collapses at floating-point resolution.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, u32) {
    let mut iterations = 0;
    // f(lo) <= 0 is an entry invariant; keep lo on the negative side.
    while iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), iterations)
}

/// Grows `[lo, hi]` by doubling `hi` until the objective has started to
/// rise, then golden-sections the bracket down to the delay tolerance.
fn golden_optimum(f: impl Fn(f64) -> f64, hi0: f64) -> Result<Optimum, Error> {
    let lo = 1e-9;
    let mut hi = hi0.max(2.0 * lo);
    let mut prev = f(0.5 * hi);
    let mut doublings = 0;
    loop {
        let cur = f(hi);
        if cur > prev {
            break;
        }
        if doublings >= MAX_DOUBLINGS {
            return Err(Error::BracketFailure { doublings });
        }
        prev = cur;
        hi *= 2.0;
        doublings += 1;
    }

    let (tau, _, iterations) = golden_section(&f, lo, hi, TAU_TOL);
    let (tau, polish_iterations) = polish_minimum(&f, tau, lo, hi);
    Ok(Optimum {
        tau_opt: tau,
        value: f(tau),
        method: Method::GoldenSection,
        bracket: (lo, hi),
        iterations: iterations + doublings + polish_iterations,
    })
}

/// Value-based search cannot resolve a flat minimum below `sqrt(eps)`;
/// bisecting the sign of a symmetric difference around the candidate
/// recovers the remaining digits. Falls back to the unpolished point when
/// the difference signs fail to bracket (minimum hugging a domain edge).
fn polish_minimum(f: &impl Fn(f64) -> f64, x0: f64, lo_cap: f64, hi_cap: f64) -> (f64, u32) {
    let scale = x0.abs().max(1.0);
    let h = 1e-6 * scale;
    let slope = |x: f64| f(x + h) - f(x - h);
    let mut lo = (x0 - 1e-4 * scale).max(lo_cap);
    let mut hi = (x0 + 1e-4 * scale).min(hi_cap);
    if !(slope(lo) < 0.0 && slope(hi) > 0.0) {
        return (x0, 0);
    }
    let mut iterations = 0;
    while iterations < 100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), iterations)
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
fn golden_section(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64, u32) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 2;
    while hi - lo > tol && iterations < 400 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        iterations += 1;
    }
    if f1 < f2 {
        (x1, f1, iterations)
    } else {
        (x2, f2, iterations)
    }
}

fn total_or_inf(config: &NetworkConfig, tau: f64, sensors_used: u32) -> f64 {
    steady_state_error_variance(config, tau, sensors_used)
        .map(|v| v.total)
        .unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DelayModel;

    fn system(a: f64, sigma2_w: f64) -> ScalarSystem {
        ScalarSystem::new(a, sigma2_w)
    }

    #[test]
    fn cubic_collapses_at_zero_pole() {
        // a = 0 reduces the stationarity cubic to tau^3 = b / (4 sigma2_w)
        let opt = optimal_tau_inverse_linear(&system(0.0, 1.0), 1.0).unwrap();
        assert!((opt.tau_opt - 0.25_f64.cbrt()).abs() < 1e-12);
        assert_eq!(opt.method, Method::CubicRoot);
        assert!(opt.bracket.0 <= opt.tau_opt && opt.tau_opt <= opt.bracket.1);
    }

    #[test]
    fn cubic_matches_frozen_root() {
        let opt = optimal_tau_inverse_linear(&system(1.0, 1.0), 1.0).unwrap();
        assert!((opt.tau_opt - 0.419_643_377_607).abs() < 1e-9);
        assert!(opt.tau_opt <= 0.5); // tau_u(1, 1)
    }

    #[test]
    fn cubic_residual_is_tiny() {
        for &(a, sw, b) in
            &[(0.0, 1.0, 1.0), (1.0, 1.0, 1.0), (-2.5, 9.0, 0.3), (3.0, 0.01, 10.0)]
        {
            let opt = optimal_tau_inverse_linear(&system(a, sw), b).unwrap();
            let s = sw / b;
            let t = opt.tau_opt;
            let residual = (s * t.powi(3) + a * a * t * t - 0.25) * 4.0;
            assert!(residual.abs() <= 1e-12, "residual {residual} at a={a} s={s}");
        }
    }

    #[test]
    fn power_law_with_unit_exponent_matches_cubic() {
        for &(a, sw, b) in &[(0.0, 1.0, 1.0), (1.0, 2.0, 0.5), (-0.7, 0.3, 3.0)] {
            let cubic = optimal_tau_inverse_linear(&system(a, sw), b).unwrap();
            let power = optimal_tau_power(&system(a, sw), b, 1.0).unwrap();
            assert!(
                (cubic.tau_opt - power.tau_opt).abs() < 1e-8,
                "a={a}: {} vs {}",
                cubic.tau_opt,
                power.tau_opt
            );
        }
    }

    #[test]
    fn power_law_frozen_case() {
        // a=0, gamma=2: P(tau) = 1/tau + tau, minimized at tau=1 with P=2
        let opt = optimal_tau_power(&system(0.0, 1.0), 1.0, 2.0).unwrap();
        assert!((opt.tau_opt - 1.0).abs() < 1e-8);
        assert!((opt.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_beats_the_open_loop_limit() {
        let opt = optimal_tau_power(&system(-0.5, 1.0), 1.0, 0.5).unwrap();
        assert!(opt.tau_opt > 0.0);
        assert!(opt.value < 1.0); // sigma2_w / (2|a|) = 1
    }

    #[test]
    fn exponential_phase_transition() {
        let sys = system(0.0, 1.0);
        let raw = optimal_tau_exponential(&sys, 1.0, 1.0).unwrap();
        assert_eq!(raw.method, Method::RawTransmission);
        assert_eq!(raw.tau_opt, 0.0);
        // At tau = 0 the exponential law still delivers variance b, so the
        // raw-transmission value is the finite filter variance there.
        assert!((raw.value - 1.0).abs() < 1e-14);

        let interior = optimal_tau_exponential(&sys, 1.0, 3.0).unwrap();
        assert_eq!(interior.method, Method::GoldenSection);
        assert!(interior.tau_opt > 0.0);
        assert!(interior.value < raw.value);
    }

    #[test]
    fn exponential_near_the_threshold() {
        let sys = system(0.0, 1.0);
        let above = optimal_tau_exponential(&sys, 1.0, 2.001).unwrap();
        assert!(above.tau_opt > 0.0, "gamma just above threshold has interior optimum");
        let below = optimal_tau_exponential(&sys, 1.0, 1.999).unwrap();
        assert_eq!(below.method, Method::RawTransmission);
    }

    #[test]
    fn quintic_frozen_roots() {
        // sigma2_w = b = c = 1, a = +-0.1: roots at 0.754094 and 1.247490,
        // identical across the sign of a (only a^2 enters).
        for a in [0.1, -0.1] {
            let roots = compression_critical_points(&system(a, 1.0), 1.0, 1.0).unwrap();
            assert_eq!(roots.len(), 2, "a={a}");
            assert!((roots[0] - 0.754_093_941_2).abs() < 1e-8);
            assert!((roots[1] - 1.247_489_652_2).abs() < 1e-8);
            let opt = optimal_tau_with_compression(&system(a, 1.0), 1.0, 1.0).unwrap();
            assert!((opt.tau_opt - 1.247_489_652_2).abs() < 1e-8);
            assert_eq!(opt.method, Method::QuinticRoot);
        }
    }

    #[test]
    fn vanishing_compression_recovers_the_cubic() {
        let opt = optimal_tau_with_compression(&system(0.0, 1.0), 1.0, 1e-12).unwrap();
        assert!((opt.tau_opt - 0.25_f64.cbrt()).abs() < 1e-3);
    }

    #[test]
    fn dispatcher_absorbs_constant_delays() {
        let sys = system(0.1, 1.0);
        let mut cfg =
            NetworkConfig::single_sensor(sys, PreprocessingModel::InverseLinear { b: 1.0 });
        let base = optimal_tau(&cfg, 1).unwrap();
        cfg.delays.comm = CommDelay::Constant { tau_c: 1.0 };
        let delayed = optimal_tau(&cfg, 1).unwrap();
        assert!((base.tau_opt - delayed.tau_opt).abs() <= 1e-9);
        assert!(delayed.value > base.value); // the delay itself still costs
    }

    #[test]
    fn dispatcher_folds_sensors_into_the_cubic() {
        let mut cfg = NetworkConfig::single_sensor(
            system(0.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        cfg.sensors = 4;
        let opt = optimal_tau(&cfg, 4).unwrap();
        assert!((opt.tau_opt - (1.0 / 16.0_f64).cbrt()).abs() < 1e-12);
    }

    #[test]
    fn dispatcher_routes_exponential_to_raw() {
        let cfg = NetworkConfig::single_sensor(
            system(0.0, 1.0),
            PreprocessingModel::Exponential { b: 1.0, gamma: 1.0 },
        );
        let opt = optimal_tau(&cfg, 1).unwrap();
        assert_eq!(opt.method, Method::RawTransmission);
        assert_eq!(opt.tau_opt, 0.0);
    }

    #[test]
    fn dispatcher_combines_compressing_delays() {
        // comm c and fusion f at S sensors act as one coefficient c + S f.
        let sys = system(0.2, 1.0);
        let mut combined =
            NetworkConfig::single_sensor(sys, PreprocessingModel::InverseLinear { b: 1.0 });
        combined.sensors = 3;
        combined.delays = DelayModel {
            comm: CommDelay::Compressing { c: 0.4 },
            fusion: FusionDelay::Compressing { f: 0.2 },
        };
        let opt = optimal_tau(&combined, 3).unwrap();
        assert_eq!(opt.method, Method::QuinticRoot);

        let folded = optimal_tau_with_compression(&system(0.2, 1.0), 1.0 / 3.0, 1.0).unwrap();
        assert!((opt.tau_opt - folded.tau_opt).abs() < 1e-9);
    }

    #[test]
    fn sensitivities_at_zero_pole() {
        let s = tau_opt_sensitivity(&system(0.0, 1.0), 1.0).unwrap();
        assert!((s.dtau_ds + 0.25_f64.cbrt() / 3.0).abs() < 1e-12);
        assert!(s.dtau_ds < 0.0 && s.dtau_da2 < 0.0);
    }

    #[test]
    fn sensitivity_ratio_is_inverse_tau() {
        for &(a, sw, b) in &[(1.0, 1.0, 1.0), (-0.4, 2.0, 0.7), (2.0, 0.1, 5.0)] {
            let opt = optimal_tau_inverse_linear(&system(a, sw), b).unwrap();
            let sens = tau_opt_sensitivity(&system(a, sw), b).unwrap();
            assert!(sens.dtau_ds < 0.0 && sens.dtau_da2 < 0.0);
            assert!((sens.dtau_da2 / sens.dtau_ds - 1.0 / opt.tau_opt).abs() < 1e-9);
        }
    }

    #[test]
    fn sensor_count_single_sensor_is_trivial() {
        let cfg = NetworkConfig::single_sensor(
            system(-1.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        let r = optimal_sensor_count(&cfg, 0.5).unwrap();
        assert_eq!(r.s_opt, 1);
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.tie_with, None);
    }

    #[test]
    fn joint_reduces_to_optimal_tau_for_one_sensor() {
        let cfg = NetworkConfig::single_sensor(
            system(-0.5, 2.0),
            PreprocessingModel::InverseLinear { b: 0.5 },
        );
        let joint = joint_optimize(&cfg).unwrap();
        let single = optimal_tau(&cfg, 1).unwrap();
        assert_eq!(joint.sensors_used, 1);
        assert_eq!(joint.optimum, single);
    }

    #[test]
    fn joint_without_fusion_uses_every_sensor() {
        let mut cfg = NetworkConfig::single_sensor(
            system(0.0, 1.0),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        cfg.sensors = 6;
        let joint = joint_optimize(&cfg).unwrap();
        assert_eq!(joint.sensors_used, 6);
        assert!((joint.optimum.tau_opt - (1.0 / 24.0_f64).cbrt()).abs() < 1e-12);
    }

    #[test]
    fn rounding_guidance_rounds_up() {
        let opt = optimal_tau_inverse_linear(&system(1.0, 1.0), 1.0).unwrap();
        let rounded = opt.tau_opt_ceil(0.05);
        assert!((rounded - 0.45).abs() < 1e-15);
        assert!(rounded >= opt.tau_opt);
    }
}
