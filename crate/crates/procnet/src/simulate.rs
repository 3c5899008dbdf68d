//! Seeded Monte Carlo validation of the closed-form variance.
//!
//! The continuous model is discretized exactly at step `h` and the filter
//! error dynamics are simulated directly (the raw state of an unstable
//! plant diverges, but its prediction error is stationary). At each step the
//! steady-state filter error is propagated open loop over the rounded total
//! delay and the squared prediction error is recorded.
//!
//! Trials draw from independent ChaCha streams keyed by `(seed,
//! trial_index)`, so results are bitwise reproducible no matter how the
//! trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::analytic::{measurement_noise_variance, steady_state_error_variance, total_delay};
use crate::model::{NetworkConfig, ScalarSystem};
use crate::Error;

/// Discretization and sampling plan for one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimPlan {
    /// Discretization step `h`.
    pub step: f64,
    /// Simulated time span per trial.
    pub horizon: f64,
    /// Fraction of each trial discarded before recording.
    pub burn_in_fraction: f64,
    /// Number of independent trials.
    pub trials: u32,
    /// Root seed; trial `i` uses stream `i` of this seed.
    pub seed: u64,
}

impl SimPlan {
    pub fn new(step: f64, horizon: f64, trials: u32, seed: u64) -> Self {
        Self { step, horizon, burn_in_fraction: 0.2, trials, seed }
    }

    fn check(&self) -> Result<(), Error> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidPlan { reason: "step must be > 0" });
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidPlan { reason: "horizon must be > 0" });
        }
        if !(self.burn_in_fraction > 0.0 && self.burn_in_fraction < 1.0) {
            return Err(Error::InvalidPlan { reason: "burn_in_fraction must be in (0, 1)" });
        }
        if self.trials < 1 {
            return Err(Error::InvalidPlan { reason: "trials must be >= 1" });
        }
        Ok(())
    }
}

/// Exact discretization of the plant at step `h`, plus the sampled
/// measurement variance under the intensity convention `r_d = meas_var / h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteModel {
    /// State transition `e^{a h}`.
    pub a_d: f64,
    /// Per-step process-noise variance `sigma2_w (e^{2ah} - 1) / (2a)`.
    pub q_d: f64,
    /// Per-step measurement-noise variance.
    pub r_d: f64,
}

/// Discretizes the continuous model exactly over one step.
pub fn discretize(system: &ScalarSystem, meas_var: f64, h: f64) -> Result<DiscreteModel, Error> {
    if !(h > 0.0) {
        return Err(Error::InvalidPlan { reason: "step must be > 0" });
    }
    if !(meas_var > 0.0) {
        return Err(Error::NonPositiveNoise { field: "meas_var", value: meas_var });
    }
    if !(system.sigma2_w > 0.0) {
        return Err(Error::NonPositiveNoise { field: "sigma2_w", value: system.sigma2_w });
    }
    let x = 2.0 * system.a * h;
    let q_d = if x.abs() < 1e-12 {
        system.sigma2_w * h
    } else {
        system.sigma2_w * x.exp_m1() / (2.0 * system.a)
    };
    Ok(DiscreteModel { a_d: (system.a * h).exp(), q_d, r_d: meas_var / h })
}

/// Rounds a delay to simulation steps: `(round(tau_tot / h), residual)`.
/// The residual is bounded by `h / 2`; validation configs pick delays
/// commensurate with `h` so it vanishes.
pub fn delay_steps(tau_tot: f64, h: f64) -> (u64, f64) {
    let d = (tau_tot / h).round();
    (d as u64, tau_tot - d * h)
}

/// Aggregated outcome of a Monte Carlo run against the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    /// Mean squared prediction error across all recorded samples.
    pub empirical_variance: f64,
    /// Standard error of `empirical_variance` via batch means.
    pub stderr: f64,
    /// Total recorded samples across trials.
    pub samples: u64,
    /// Closed-form steady-state variance for the same inputs.
    pub analytic_variance: f64,
    /// `(empirical - analytic) / stderr`.
    pub z_score: f64,
}

/// Minimum recorded samples per trial after burn-in and delay warm-up.
const MIN_SAMPLES: u64 = 100;

struct TrialSetup {
    a_d: f64,
    q_d: f64,
    r_eff: f64,
    /// Steady-state filter gain at the discrete Riccati fixed point.
    gain: f64,
    /// Delay in whole steps.
    d: usize,
    steps: usize,
    /// Recording starts after this step index.
    skip: usize,
    p0: f64,
}

fn trial_setup(
    config: &NetworkConfig,
    tau: f64,
    sensors_used: u32,
    plan: &SimPlan,
) -> Result<TrialSetup, Error> {
    plan.check()?;
    config.validate().map_err(|r| r.violations[0].clone())?;
    let breakdown = total_delay(config, tau, sensors_used)?;
    let meas_var = measurement_noise_variance(&config.preprocessing, tau)?;
    let disc = discretize(&config.system, meas_var, plan.step)?;
    let r_eff = disc.r_d / f64::from(sensors_used);

    // Steady-state estimates need the horizon to dominate both the mixing
    // time of the error process and the delay window itself.
    let mixing = if config.system.a < 0.0 { 1.0 / config.system.a.abs() } else { 1.0 };
    let needed = 20.0 * mixing.max(breakdown.tau_tot);
    if plan.horizon < needed {
        return Err(Error::HorizonTooShort { samples: 0, needed: needed.ceil() as u64 });
    }

    let (d, _residual) = delay_steps(breakdown.tau_tot, plan.step);
    let d = d as usize;
    let steps = (plan.horizon / plan.step).floor() as usize;
    let burn = (plan.burn_in_fraction * steps as f64).ceil() as usize;
    let skip = burn.max(d);
    if steps.saturating_sub(skip) < MIN_SAMPLES as usize {
        return Err(Error::HorizonTooShort {
            samples: steps.saturating_sub(skip) as u64,
            needed: MIN_SAMPLES,
        });
    }

    // Discrete Riccati fixed point for the steady-state gain.
    let mut p = disc.q_d;
    for _ in 0..1_000_000 {
        let predicted = disc.a_d * disc.a_d * p + disc.q_d;
        let gain = predicted / (predicted + r_eff);
        let next = (1.0 - gain) * predicted;
        if (next - p).abs() <= 1e-14 * p.max(1.0) {
            p = next;
            break;
        }
        p = next;
    }
    let predicted = disc.a_d * disc.a_d * p + disc.q_d;
    let gain = predicted / (predicted + r_eff);

    Ok(TrialSetup {
        a_d: disc.a_d,
        q_d: disc.q_d,
        r_eff,
        gain,
        d,
        steps,
        skip,
        p0: config.system.p0,
    })
}

/// Runs one trial and returns the squared prediction errors recorded after
/// burn-in. Deterministic in `(plan.seed, trial_index)`.
pub fn run_trial(
    config: &NetworkConfig,
    tau: f64,
    sensors_used: u32,
    plan: &SimPlan,
    trial_index: u32,
) -> Result<Vec<f64>, Error> {
    let setup = trial_setup(config, tau, sensors_used, plan)?;
    let mut out = Vec::with_capacity(setup.steps - setup.skip);
    simulate_trial(&setup, plan.seed, trial_index, |sq| out.push(sq));
    Ok(out)
}

/// Simulates the delayed-filter error process.
///
/// Per step: the steady-state filter error advances as
/// `e <- (1 - K)(a_d e + w) - K v`, and the prediction error at lag `d`
/// is `a_d^d e_{k-d} + m_k` with `m_k` the open-loop accumulation of the
/// last `d` process noises. Ring buffers carry `e` and `w` across the lag.
fn simulate_trial(setup: &TrialSetup, seed: u64, trial_index: u32, mut record: impl FnMut(f64)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(trial_index));
    let normal = StandardNormal;

    let w_sd = setup.q_d.sqrt();
    let v_sd = setup.r_eff.sqrt();
    let a_d = setup.a_d;
    let a_d_pow_d = a_d.powi(setup.d as i32);
    let one_minus_k = 1.0 - setup.gain;

    // Initial filter error: x0 - mu0 ~ (0, p0).
    let draw = |rng: &mut ChaCha8Rng| -> f64 { normal.sample(rng) };
    let mut e = setup.p0.sqrt() * draw(&mut rng);

    let d = setup.d;
    let mut e_buf = vec![e; d.max(1)];
    let mut w_buf = vec![0.0; d.max(1)];
    let mut m = 0.0;
    let mut head = 0usize;

    for k in 1..=setup.steps {
        let w = w_sd * draw(&mut rng);
        let v = v_sd * draw(&mut rng);
        e = one_minus_k * (a_d * e + w) - setup.gain * v;

        let pred_err = if d > 0 {
            let w_old = w_buf[head];
            w_buf[head] = w;
            m = a_d * m + w - a_d_pow_d * w_old;
            let e_lag = e_buf[head];
            e_buf[head] = e;
            head += 1;
            if head == d {
                head = 0;
            }
            a_d_pow_d * e_lag + m
        } else {
            e
        };

        if k > setup.skip {
            record(pred_err * pred_err);
        }
    }
}

/// Runs all trials of the plan, estimates the empirical steady-state
/// prediction-error variance, and compares it to the closed form.
///
/// Trials execute in parallel; aggregation is ordered and compensated, so
/// identical inputs give bitwise identical results.
pub fn monte_carlo_variance(
    config: &NetworkConfig,
    tau: f64,
    sensors_used: u32,
    plan: &SimPlan,
) -> Result<SimResult, Error> {
    let setup = trial_setup(config, tau, sensors_used, plan)?;
    let analytic = steady_state_error_variance(config, tau, sensors_used)?.total;

    let per_trial: Vec<(f64, u64)> = (0..plan.trials)
        .into_par_iter()
        .map(|trial| {
            let mut sum = KahanSum::default();
            let mut count = 0u64;
            simulate_trial(&setup, plan.seed, trial, |sq| {
                sum.add(sq);
                count += 1;
            });
            (sum.value() / count as f64, count)
        })
        .collect();

    let trial_count = per_trial.len() as f64;
    let mut mean_acc = KahanSum::default();
    let mut samples = 0u64;
    for &(mean, count) in &per_trial {
        mean_acc.add(mean);
        samples += count;
    }
    // Trials share one length, so the grand mean is the mean of trial means.
    let empirical = mean_acc.value() / trial_count;

    let stderr = if per_trial.len() > 1 {
        let mut var_acc = KahanSum::default();
        for &(mean, _) in &per_trial {
            let dev = mean - empirical;
            var_acc.add(dev * dev);
        }
        (var_acc.value() / (trial_count * (trial_count - 1.0))).sqrt()
    } else {
        // Single trial: batch means over 16 contiguous chunks.
        single_trial_stderr(&setup, plan)
    };

    Ok(SimResult {
        empirical_variance: empirical,
        stderr,
        samples,
        analytic_variance: analytic,
        z_score: (empirical - analytic) / stderr,
    })
}

fn single_trial_stderr(setup: &TrialSetup, plan: &SimPlan) -> f64 {
    const BATCHES: usize = 16;
    let total = setup.steps - setup.skip;
    let batch_len = (total / BATCHES).max(1);
    let mut sums = vec![KahanSum::default(); BATCHES];
    let mut counts = vec![0u64; BATCHES];
    let mut i = 0usize;
    simulate_trial(setup, plan.seed, 0, |sq| {
        let b = (i / batch_len).min(BATCHES - 1);
        sums[b].add(sq);
        counts[b] += 1;
        i += 1;
    });
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| s.value() / c as f64)
        .collect();
    let n = means.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let grand = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (n * (n - 1.0));
    var.sqrt()
}

/// Compensated (Kahan) accumulator; keeps long sums order-stable.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Convenience: the discrete steady-state prediction variance implied by
/// the exact discretization, used by consistency tests.
pub fn discrete_prediction_variance(
    config: &NetworkConfig,
    tau: f64,
    sensors_used: u32,
    h: f64,
) -> Result<f64, Error> {
    let breakdown = total_delay(config, tau, sensors_used)?;
    let meas_var = measurement_noise_variance(&config.preprocessing, tau)?;
    let disc = discretize(&config.system, meas_var, h)?;
    let r_eff = disc.r_d / f64::from(sensors_used);
    let mut p = disc.q_d;
    for _ in 0..1_000_000 {
        let predicted = disc.a_d * disc.a_d * p + disc.q_d;
        let gain = predicted / (predicted + r_eff);
        let next = (1.0 - gain) * predicted;
        if (next - p).abs() <= 1e-15 * p.max(1.0) {
            p = next;
            break;
        }
        p = next;
    }
    let (d, _) = delay_steps(breakdown.tau_tot, h);
    let a2d = disc.a_d.powi(2 * d as i32);
    let accumulated = if (disc.a_d - 1.0).abs() < 1e-15 {
        disc.q_d * d as f64
    } else {
        disc.q_d * (a2d - 1.0) / (disc.a_d * disc.a_d - 1.0)
    };
    Ok(a2d * p + accumulated)
}
