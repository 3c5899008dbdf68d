//! Browser demo bindings: JSON-in/JSON-out wrappers around the library,
//! compiled to WebAssembly for the static page in `www/`.
//!
//! The functions are plain Rust (and unit-tested natively); the
//! `wasm_bindgen` attribute is applied only when targeting wasm32. Requests
//! embed a full [`NetworkConfig`] in the same shape the config file uses.

use serde::{Deserialize, Serialize};

use procnet::analytic::{steady_state_error_variance, tau_upper_bound, variance_limits};
use procnet::model::{NetworkConfig, PreprocessingModel, ScalarSystem};
use procnet::optimize::{optimal_sensor_count, optimal_tau};

#[cfg(target_arch = "wasm32")]
use wasm_bindgen::prelude::*;

#[derive(Deserialize)]
struct CurveRequest {
    config: NetworkConfig,
    sensors_used: Option<u32>,
    tau_min: f64,
    tau_max: f64,
    points: usize,
    #[serde(default)]
    log: bool,
}

#[derive(Serialize)]
struct CurveResponse {
    tau: Vec<f64>,
    estimation: Vec<f64>,
    noise: Vec<f64>,
    total: Vec<f64>,
    tau_opt: f64,
    p_opt: f64,
    method: String,
    /// Common limit at both extremes for stable systems, null otherwise.
    limit: Option<f64>,
}

/// Samples the variance curve `P(tau)` with its estimation/noise split and
/// the optimal delay for the requested configuration.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn variance_curve(request_json: &str) -> Result<String, String> {
    let req: CurveRequest = serde_json::from_str(request_json).map_err(|e| e.to_string())?;
    req.config.validate().map_err(|e| e.to_string())?;
    if !(req.points >= 2 && req.tau_min > 0.0 && req.tau_max > req.tau_min) {
        return Err("need points >= 2 and 0 < tau_min < tau_max".into());
    }
    let sensors = req.sensors_used.unwrap_or(req.config.sensors);

    let mut resp = CurveResponse {
        tau: Vec::with_capacity(req.points),
        estimation: Vec::with_capacity(req.points),
        noise: Vec::with_capacity(req.points),
        total: Vec::with_capacity(req.points),
        tau_opt: 0.0,
        p_opt: 0.0,
        method: String::new(),
        limit: None,
    };
    for i in 0..req.points {
        let t = i as f64 / (req.points - 1) as f64;
        let tau = if req.log {
            (req.tau_min.ln() + (req.tau_max.ln() - req.tau_min.ln()) * t).exp()
        } else {
            req.tau_min + (req.tau_max - req.tau_min) * t
        };
        let v = steady_state_error_variance(&req.config, tau, sensors)
            .map_err(|e| e.to_string())?;
        resp.tau.push(tau);
        resp.estimation.push(v.estimation_part);
        resp.noise.push(v.noise_part);
        resp.total.push(v.total);
    }

    let opt = optimal_tau(&req.config, sensors).map_err(|e| e.to_string())?;
    resp.tau_opt = opt.tau_opt;
    resp.p_opt = opt.value;
    resp.method = opt.method.to_string();
    let limits = variance_limits(&req.config, sensors);
    if limits.at_zero.is_finite() {
        resp.limit = Some(limits.at_zero);
    }

    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct SensorTableRequest {
    config: NetworkConfig,
    tau: f64,
}

#[derive(Serialize)]
struct SensorTableResponse {
    s: Vec<u32>,
    p: Vec<f64>,
    s_opt: u32,
    /// The same table with the fusion delay struck out, for comparison.
    p_no_fusion: Vec<f64>,
    s_opt_no_fusion: u32,
}

/// Tabulates `P(S)` at fixed `tau`, with and without the fusion delay.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn sensor_table(request_json: &str) -> Result<String, String> {
    let req: SensorTableRequest = serde_json::from_str(request_json).map_err(|e| e.to_string())?;
    req.config.validate().map_err(|e| e.to_string())?;

    let with = optimal_sensor_count(&req.config, req.tau).map_err(|e| e.to_string())?;
    let mut no_fusion_cfg = req.config;
    no_fusion_cfg.delays.fusion = procnet::model::FusionDelay::None;
    let without = optimal_sensor_count(&no_fusion_cfg, req.tau).map_err(|e| e.to_string())?;

    let resp = SensorTableResponse {
        s: with.table.iter().map(|&(s, _)| s).collect(),
        p: with.table.iter().map(|&(_, p)| p).collect(),
        s_opt: with.s_opt,
        p_no_fusion: without.table.iter().map(|&(_, p)| p).collect(),
        s_opt_no_fusion: without.s_opt,
    };
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct SweepRequest {
    a: f64,
    s_min: f64,
    s_max: f64,
    points: usize,
}

#[derive(Serialize)]
struct SweepResponse {
    s: Vec<f64>,
    tau_opt: Vec<f64>,
    tau_upper_bound: Vec<f64>,
    p_opt: Vec<f64>,
}

/// Sweeps the noise ratio `s = sigma2_w / b` (log-spaced) and reports the
/// optimal delay with its closed-form upper bound.
#[cfg_attr(target_arch = "wasm32", wasm_bindgen)]
pub fn tau_opt_sweep(request_json: &str) -> Result<String, String> {
    let req: SweepRequest = serde_json::from_str(request_json).map_err(|e| e.to_string())?;
    if !(req.points >= 2 && req.s_min > 0.0 && req.s_max > req.s_min) {
        return Err("need points >= 2 and 0 < s_min < s_max".into());
    }
    let mut resp = SweepResponse {
        s: Vec::new(),
        tau_opt: Vec::new(),
        tau_upper_bound: Vec::new(),
        p_opt: Vec::new(),
    };
    for i in 0..req.points {
        let t = i as f64 / (req.points - 1) as f64;
        let s = (req.s_min.ln() + (req.s_max.ln() - req.s_min.ln()) * t).exp();
        let cfg = NetworkConfig::single_sensor(
            ScalarSystem::new(req.a, s),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        let opt = optimal_tau(&cfg, 1).map_err(|e| e.to_string())?;
        resp.s.push(s);
        resp.tau_opt.push(opt.tau_opt);
        resp.tau_upper_bound.push(tau_upper_bound(req.a, s));
        resp.p_opt.push(opt.value);
    }
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_round_trip() {
        let req = r#"{
            "config": {
                "system": {"a": -1.0, "sigma2_w": 10.0, "mu0": 0.0, "p0": 1.0},
                "preprocessing": {"kind": "inverse_linear", "b": 0.1},
                "delays": {
                    "comm": {"comm_kind": "constant", "tau_c": 0.1},
                    "fusion": {"fusion_kind": "constant", "tau_f": 0.02}
                },
                "sensors": 10
            },
            "sensors_used": 1,
            "tau_min": 0.05, "tau_max": 1.0, "points": 16
        }"#;
        let out = variance_curve(req).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["tau"].as_array().unwrap().len(), 16);
        assert!(v["limit"].as_f64().unwrap() > 0.0);
        assert!(v["tau_opt"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn sensor_table_matches_library() {
        let req = r#"{
            "config": {
                "system": {"a": -1.0, "sigma2_w": 10.0, "mu0": 0.0, "p0": 1.0},
                "preprocessing": {"kind": "inverse_linear", "b": 0.1},
                "delays": {
                    "comm": {"comm_kind": "constant", "tau_c": 0.1},
                    "fusion": {"fusion_kind": "constant", "tau_f": 0.02}
                },
                "sensors": 10
            },
            "tau": 0.1
        }"#;
        let out = sensor_table(req).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["s_opt"].as_u64().unwrap(), 4);
        assert_eq!(v["s_opt_no_fusion"].as_u64().unwrap(), 10);
    }

    #[test]
    fn sweep_is_monotone() {
        let out = tau_opt_sweep(r#"{"a": 1.0, "s_min": 0.1, "s_max": 100.0, "points": 24}"#)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let taus: Vec<f64> =
            v["tau_opt"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!(taus.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bad_request_is_an_error() {
        assert!(variance_curve("{}").is_err());
        assert!(tau_opt_sweep(r#"{"a": 0.0, "s_min": -1.0, "s_max": 1.0, "points": 4}"#).is_err());
    }
}
