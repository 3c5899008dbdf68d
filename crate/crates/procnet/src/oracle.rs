//! Independent reference implementations for the validation suites.
//!
//! Everything here is an off-the-blackboard transcription of the closed forms
//! using plain `exp`/`sqrt` arithmetic, kept deliberately separate from the
//! production evaluation path (no `exp_m1`, no rationalized square roots, no
//! shared helpers) so the two can check each other. Compiled only under the
//! `oracle` feature, which the test targets enable.

/// Steady-state prediction-error variance for measurement variance `r`
/// projected over `tau_tot`, written exactly as the formula reads.
pub fn reference_variance(a: f64, sigma2_w: f64, r: f64, tau_tot: f64) -> f64 {
    let p_inf = r * (a + (a * a + sigma2_w / r).sqrt());
    let e = (2.0 * a * tau_tot).exp();
    let q = if a == 0.0 { sigma2_w * tau_tot } else { sigma2_w * (e - 1.0) / (2.0 * a) };
    p_inf * e + q
}

/// Reference variance under the inverse-linear law with optional constant
/// communication/fusion delay terms and an optional compressing
/// communication coefficient.
pub fn reference_variance_inverse_linear(
    a: f64,
    sigma2_w: f64,
    b: f64,
    tau: f64,
    constant_delay: f64,
    compressing_c: f64,
) -> f64 {
    let comm = if compressing_c > 0.0 { compressing_c / tau } else { 0.0 };
    reference_variance(a, sigma2_w, b / tau, tau + comm + constant_delay)
}

/// Brute-force grid minimization: returns `(index, x, f(x))` of the best
/// grid point. `log` switches between log- and linearly-spaced grids.
pub fn grid_argmin(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    n: usize,
    log: bool,
) -> (usize, f64, f64) {
    assert!(n >= 2 && hi > lo && lo > 0.0);
    let mut best = (0usize, lo, f64::INFINITY);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let x = if log { (lo.ln() + (hi.ln() - lo.ln()) * t).exp() } else { lo + (hi - lo) * t };
        let fx = f(x);
        if fx < best.2 {
            best = (i, x, fx);
        }
    }
    best
}

/// Grid step size at the argmin (the same measure "within k grid steps"
/// comparisons use): constant for linear grids, local for log grids.
pub fn grid_step(lo: f64, hi: f64, n: usize, log: bool, at: f64) -> f64 {
    if log {
        at * ((hi / lo).ln() / (n - 1) as f64).exp_m1()
    } else {
        (hi - lo) / (n - 1) as f64
    }
}

/// Symmetric central difference `(f(x+h) - f(x-h)) / (2h)`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Bisection for a root of `f` on a sign-changing bracket, to `tol` width.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    assert!(
        flo * f(hi) <= 0.0,
        "bracket [{lo}, {hi}] does not change sign"
    );
    let descending = flo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if (fm < 0.0) == descending {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
