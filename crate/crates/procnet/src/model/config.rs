//! The on-disk config format: TOML-style sections of flat key/value pairs.
//!
//! Sections and keys are fixed; unknown or inapplicable keys are errors so
//! that a typo cannot silently fall back to a default. `parse_config` and
//! [`NetworkConfig::to_config_string`](super::NetworkConfig::to_config_string)
//! round-trip exactly.
//!
//! ```text
//! [system]
//! a = -1.0
//! sigma2_w = 10.0
//! mu0 = 0.0
//! p0 = 1.0
//!
//! [preprocessing]
//! kind = "inverse_linear"   # or "inverse_power" / "exponential" (+ gamma)
//! b = 0.1
//!
//! [delays]
//! comm_kind = "constant"    # or "none" / "compressing" (+ c)
//! tau_c = 0.1
//! fusion_kind = "constant"  # or "none" / "compressing" (+ f)
//! tau_f = 0.02
//!
//! [network]
//! sensors = 10
//! ```

use std::fmt::Write as _;

use thiserror::Error;
use toml::{Table, Value};

use super::{CommDelay, DelayModel, FusionDelay, NetworkConfig, PreprocessingModel, ScalarSystem};

/// Structural errors in a config file. Invariant violations are reported
/// separately by [`NetworkConfig::validate`](super::NetworkConfig::validate).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("missing key '{key}' in section [{section}]")]
    MissingKey { section: &'static str, key: &'static str },
    #[error("unknown key '{key}' in section [{section}]")]
    UnknownKey { section: &'static str, key: String },
    #[error("bad value for '{key}' in section [{section}]: {reason}")]
    BadValue { section: &'static str, key: &'static str, reason: String },
}

/// Parses the sectioned key/value format into a [`NetworkConfig`].
///
/// Checks structure and types only; call `validate()` on the result for the
/// numeric invariants.
pub fn parse_config(text: &str) -> Result<NetworkConfig, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        ConfigError::Syntax(e.message().to_string())
    })?;

    for key in table.keys() {
        if !matches!(key.as_str(), "system" | "preprocessing" | "delays" | "network") {
            return Err(ConfigError::UnknownSection(key.clone()));
        }
    }

    let system = {
        let sec = section(&table, "system")?;
        let sys = ScalarSystem {
            a: float(sec, "system", "a")?,
            sigma2_w: float(sec, "system", "sigma2_w")?,
            mu0: float(sec, "system", "mu0")?,
            p0: float(sec, "system", "p0")?,
        };
        no_extra_keys(sec, "system", &["a", "sigma2_w", "mu0", "p0"])?;
        sys
    };

    let preprocessing = {
        let sec = section(&table, "preprocessing")?;
        let kind = string(sec, "preprocessing", "kind")?;
        let b = float(sec, "preprocessing", "b")?;
        let model = match kind.as_str() {
            "inverse_linear" => {
                no_extra_keys(sec, "preprocessing", &["kind", "b"])?;
                PreprocessingModel::InverseLinear { b }
            }
            "inverse_power" => {
                let gamma = float(sec, "preprocessing", "gamma")?;
                no_extra_keys(sec, "preprocessing", &["kind", "b", "gamma"])?;
                PreprocessingModel::InversePower { b, gamma }
            }
            "exponential" => {
                let gamma = float(sec, "preprocessing", "gamma")?;
                no_extra_keys(sec, "preprocessing", &["kind", "b", "gamma"])?;
                PreprocessingModel::Exponential { b, gamma }
            }
            other => {
                return Err(ConfigError::BadValue {
                    section: "preprocessing",
                    key: "kind",
                    reason: format!(
                        "'{other}' is not one of inverse_linear, inverse_power, exponential"
                    ),
                })
            }
        };
        model
    };

    let delays = {
        let sec = section(&table, "delays")?;
        let mut allowed: Vec<&'static str> = vec!["comm_kind", "fusion_kind"];
        let comm = match string(sec, "delays", "comm_kind")?.as_str() {
            "none" => CommDelay::None,
            "constant" => {
                allowed.push("tau_c");
                CommDelay::Constant { tau_c: float(sec, "delays", "tau_c")? }
            }
            "compressing" => {
                allowed.push("c");
                CommDelay::Compressing { c: float(sec, "delays", "c")? }
            }
            other => {
                return Err(ConfigError::BadValue {
                    section: "delays",
                    key: "comm_kind",
                    reason: format!("'{other}' is not one of none, constant, compressing"),
                })
            }
        };
        let fusion = match string(sec, "delays", "fusion_kind")?.as_str() {
            "none" => FusionDelay::None,
            "constant" => {
                allowed.push("tau_f");
                FusionDelay::Constant { tau_f: float(sec, "delays", "tau_f")? }
            }
            "compressing" => {
                allowed.push("f");
                FusionDelay::Compressing { f: float(sec, "delays", "f")? }
            }
            other => {
                return Err(ConfigError::BadValue {
                    section: "delays",
                    key: "fusion_kind",
                    reason: format!("'{other}' is not one of none, constant, compressing"),
                })
            }
        };
        no_extra_keys(sec, "delays", &allowed)?;
        DelayModel { comm, fusion }
    };

    let sensors = {
        let sec = section(&table, "network")?;
        let n = integer(sec, "network", "sensors")?;
        no_extra_keys(sec, "network", &["sensors"])?;
        u32::try_from(n).map_err(|_| ConfigError::BadValue {
            section: "network",
            key: "sensors",
            reason: format!("{n} does not fit a nonnegative 32-bit count"),
        })?
    };

    Ok(NetworkConfig { system, preprocessing, delays, sensors })
}

/// Writes a config in the exact shape `parse_config` reads back.
pub(super) fn write_config(cfg: &NetworkConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[system]");
    let _ = writeln!(out, "a = {:?}", cfg.system.a);
    let _ = writeln!(out, "sigma2_w = {:?}", cfg.system.sigma2_w);
    let _ = writeln!(out, "mu0 = {:?}", cfg.system.mu0);
    let _ = writeln!(out, "p0 = {:?}", cfg.system.p0);
    let _ = writeln!(out);
    let _ = writeln!(out, "[preprocessing]");
    match cfg.preprocessing {
        PreprocessingModel::InverseLinear { b } => {
            let _ = writeln!(out, "kind = \"inverse_linear\"");
            let _ = writeln!(out, "b = {b:?}");
        }
        PreprocessingModel::InversePower { b, gamma } => {
            let _ = writeln!(out, "kind = \"inverse_power\"");
            let _ = writeln!(out, "b = {b:?}");
            let _ = writeln!(out, "gamma = {gamma:?}");
        }
        PreprocessingModel::Exponential { b, gamma } => {
            let _ = writeln!(out, "kind = \"exponential\"");
            let _ = writeln!(out, "b = {b:?}");
            let _ = writeln!(out, "gamma = {gamma:?}");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[delays]");
    match cfg.delays.comm {
        CommDelay::None => {
            let _ = writeln!(out, "comm_kind = \"none\"");
        }
        CommDelay::Constant { tau_c } => {
            let _ = writeln!(out, "comm_kind = \"constant\"");
            let _ = writeln!(out, "tau_c = {tau_c:?}");
        }
        CommDelay::Compressing { c } => {
            let _ = writeln!(out, "comm_kind = \"compressing\"");
            let _ = writeln!(out, "c = {c:?}");
        }
    }
    match cfg.delays.fusion {
        FusionDelay::None => {
            let _ = writeln!(out, "fusion_kind = \"none\"");
        }
        FusionDelay::Constant { tau_f } => {
            let _ = writeln!(out, "fusion_kind = \"constant\"");
            let _ = writeln!(out, "tau_f = {tau_f:?}");
        }
        FusionDelay::Compressing { f } => {
            let _ = writeln!(out, "fusion_kind = \"compressing\"");
            let _ = writeln!(out, "f = {f:?}");
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "[network]");
    let _ = writeln!(out, "sensors = {}", cfg.sensors);
    out
}

fn section<'t>(table: &'t Table, name: &'static str) -> Result<&'t Table, ConfigError> {
    match table.get(name) {
        Some(Value::Table(sec)) => Ok(sec),
        Some(_) => Err(ConfigError::BadValue {
            section: name,
            key: "",
            reason: "expected a section of key/value pairs".into(),
        }),
        None => Err(ConfigError::MissingSection(name)),
    }
}

fn float(sec: &Table, section: &'static str, key: &'static str) -> Result<f64, ConfigError> {
    match sec.get(key) {
        Some(Value::Float(x)) => Ok(*x),
        Some(Value::Integer(n)) => Ok(*n as f64),
        Some(other) => Err(ConfigError::BadValue {
            section,
            key,
            reason: format!("expected a number, got {}", other.type_str()),
        }),
        None => Err(ConfigError::MissingKey { section, key }),
    }
}

fn integer(sec: &Table, section: &'static str, key: &'static str) -> Result<i64, ConfigError> {
    match sec.get(key) {
        Some(Value::Integer(n)) => Ok(*n),
        Some(other) => Err(ConfigError::BadValue {
            section,
            key,
            reason: format!("expected an integer, got {}", other.type_str()),
        }),
        None => Err(ConfigError::MissingKey { section, key }),
    }
}

fn string(sec: &Table, section: &'static str, key: &'static str) -> Result<String, ConfigError> {
    match sec.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(other) => Err(ConfigError::BadValue {
            section,
            key,
            reason: format!("expected a string, got {}", other.type_str()),
        }),
        None => Err(ConfigError::MissingKey { section, key }),
    }
}

fn no_extra_keys(sec: &Table, section: &'static str, allowed: &[&str]) -> Result<(), ConfigError> {
    for key in sec.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { section, key: key.clone() });
        }
    }
    Ok(())
}
