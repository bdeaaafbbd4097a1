//! Flat `key = value` scenario files.
//!
//! One assignment per line, `#` starts a comment, keys are snake_case with a
//! unit suffix. Keys left out keep the reference-deployment value, so an
//! empty file describes the reference scenario.
//!
//! ```text
//! # 9:1 traffic at 40 dB cancellation
//! alpha_db = 40
//! r_fl_mbps = 58.5
//! r_rl_mbps = 6.5
//! pa = tpa
//! ```

use crate::model::{
    db_to_linear, dbm_to_watts, defaults, link_gain, noise_power, residual_self_gain, ChannelSet,
    CircuitAccounting, NodeCircuit, PaKind, PaModel, PerNode, Scenario, Strategy,
};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid scenario: {0}")]
    Scenario(#[from] crate::Error),
    #[error("cannot read `{path}`: {reason}")]
    Io { path: String, reason: String },
    #[error("{0}")]
    Usage(String),
}

/// Scenario parameters in file units. [`Default`] is the reference deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub bandwidth_mhz: f64,
    pub frame_t_ms: f64,
    pub n0_dbm_per_hz: f64,
    pub d_ar_m: f64,
    pub d_br_m: f64,
    pub d_self_cm: f64,
    pub alpha_db: f64,
    pub r_fl_mbps: f64,
    pub r_rl_mbps: f64,
    pub strategy: Strategy,
    pub pa: PaKind,
    /// a, r, b.
    pub p_max_dbm: [f64; 3],
    pub eta_max: [f64; 3],
    pub papr_db: f64,
    pub etpa_u: f64,
    pub p_idle_mw: [f64; 3],
    pub p_base_mw: [f64; 3],
    pub epsilon_mw_per_gbps: f64,
    pub asymptotic_1ts: bool,
    pub accounting: CircuitAccounting,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        use defaults::*;
        ScenarioConfig {
            bandwidth_mhz: BANDWIDTH_HZ / 1e6,
            frame_t_ms: FRAME_T_S * 1e3,
            n0_dbm_per_hz: N0_DBM_PER_HZ,
            d_ar_m: LINK_DISTANCE_M,
            d_br_m: LINK_DISTANCE_M,
            d_self_cm: SELF_DISTANCE_M * 100.0,
            alpha_db: ALPHA_DB,
            r_fl_mbps: RATE_MBPS,
            r_rl_mbps: RATE_MBPS,
            strategy: Strategy::Fd2ts,
            pa: PaKind::Etpa,
            p_max_dbm: P_MAX_DBM,
            eta_max: [ETA_MAX; 3],
            papr_db: PAPR_DB,
            etpa_u: ETPA_U,
            p_idle_mw: P_IDLE_MW,
            p_base_mw: P_BASE_MW,
            epsilon_mw_per_gbps: EPSILON_MW_PER_GBPS,
            asymptotic_1ts: false,
            accounting: CircuitAccounting::AsPrinted,
        }
    }
}

impl ScenarioConfig {
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let sigma2 = noise_power(self.n0_dbm_per_hz, self.bandwidth_mhz * 1e6);
        let gs = residual_self_gain(self.d_self_cm / 100.0, db_to_linear(self.alpha_db));
        let channels = ChannelSet::reciprocal(
            link_gain(self.d_ar_m),
            link_gain(self.d_br_m),
            PerNode::splat(gs),
            sigma2,
        )?;
        let kappa = db_to_linear(self.papr_db);
        let pa = |i: usize| -> crate::Result<PaModel> {
            let p_max = dbm_to_watts(self.p_max_dbm[i]);
            Ok(PaModel::etpa(p_max, self.eta_max[i], kappa, self.etpa_u)?.with_kind(self.pa))
        };
        let eps = self.epsilon_mw_per_gbps * 1e-12;
        let circ =
            |i: usize| NodeCircuit::new(self.p_base_mw[i] * 1e-3, self.p_idle_mw[i] * 1e-3, eps);
        let s = Scenario {
            bandwidth_w: self.bandwidth_mhz * 1e6,
            frame_t: self.frame_t_ms * 1e-3,
            r_fl: self.r_fl_mbps * 1e6,
            r_rl: self.r_rl_mbps * 1e6,
            strategy: self.strategy,
            pa: PerNode::new(pa(0)?, pa(2)?, pa(1)?),
            circuit: PerNode::new(circ(0)?, circ(2)?, circ(1)?),
            channels,
            asymptotic_1ts: self.asymptotic_1ts,
            accounting: self.accounting,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn total_rate_mbps(&self) -> f64 {
        self.r_fl_mbps + self.r_rl_mbps
    }
}

enum Check {
    Any,
    Positive,
    NonNegative,
    /// `(0, 1]`
    Efficiency,
}

fn number(line: usize, key: &str, value: &str, check: Check) -> Result<f64, ConfigError> {
    let bad = |reason: &str| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    };
    let v: f64 = value.parse().map_err(|_| bad("not a number"))?;
    if !v.is_finite() {
        return Err(bad("must be finite"));
    }
    match check {
        Check::Any => Ok(v),
        Check::Positive if v > 0.0 => Ok(v),
        Check::Positive => Err(bad("must be positive")),
        Check::NonNegative if v >= 0.0 => Ok(v),
        Check::NonNegative => Err(bad("must be non-negative")),
        Check::Efficiency if v > 0.0 && v <= 1.0 => Ok(v),
        Check::Efficiency => Err(bad("must lie in (0, 1]")),
    }
}

fn parsed<T: std::str::FromStr<Err = String>>(
    line: usize,
    key: &str,
    value: &str,
) -> Result<T, ConfigError> {
    value.parse().map_err(|reason| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason,
    })
}

const NODE_KEYS: [(&str, usize); 3] = [("a", 0), ("r", 1), ("b", 2)];

fn node_index(key: &str, prefix: &str, suffix: &str) -> Option<usize> {
    let mid = key.strip_prefix(prefix)?.strip_suffix(suffix)?;
    NODE_KEYS.iter().find(|(n, _)| *n == mid).map(|(_, i)| *i)
}

/// Apply one assignment. Values are range-checked here so errors carry the
/// line they came from.
pub fn apply_key(
    cfg: &mut ScenarioConfig,
    line: usize,
    key: &str,
    value: &str,
) -> Result<(), ConfigError> {
    use Check::*;
    let num = |c| number(line, key, value, c);
    match key {
        "bandwidth_mhz" => cfg.bandwidth_mhz = num(Positive)?,
        "frame_t_ms" => cfg.frame_t_ms = num(Positive)?,
        "frame_t_s" => cfg.frame_t_ms = num(Positive)? * 1e3,
        "n0_dbm_per_hz" => cfg.n0_dbm_per_hz = num(Any)?,
        "d_ar_m" => cfg.d_ar_m = num(Positive)?,
        "d_br_m" => cfg.d_br_m = num(Positive)?,
        "d_self_cm" => cfg.d_self_cm = num(Positive)?,
        "alpha_db" => cfg.alpha_db = num(Any)?,
        "r_fl_mbps" => cfg.r_fl_mbps = num(NonNegative)?,
        "r_rl_mbps" => cfg.r_rl_mbps = num(NonNegative)?,
        "strategy" => cfg.strategy = parsed(line, key, value)?,
        "pa" => cfg.pa = parsed(line, key, value)?,
        "accounting" => cfg.accounting = parsed(line, key, value)?,
        "asymptotic_1ts" => {
            cfg.asymptotic_1ts = match value {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                _ => {
                    return Err(ConfigError::BadValue {
                        line,
                        key: key.into(),
                        value: value.into(),
                        reason: "expected true or false".into(),
                    })
                }
            }
        }
        "eta_max" => cfg.eta_max = [num(Efficiency)?; 3],
        "papr_db" => cfg.papr_db = num(NonNegative)?,
        "etpa_u" => cfg.etpa_u = num(NonNegative)?,
        "epsilon_mw_per_gbps" => cfg.epsilon_mw_per_gbps = num(NonNegative)?,
        _ => {
            if let Some(i) = node_index(key, "p_max_", "_dbm") {
                cfg.p_max_dbm[i] = num(Any)?;
            } else if let Some(i) = node_index(key, "eta_max_", "") {
                cfg.eta_max[i] = num(Efficiency)?;
            } else if let Some(i) = node_index(key, "p_idle_", "_mw") {
                cfg.p_idle_mw[i] = num(NonNegative)?;
            } else if let Some(i) = node_index(key, "p_base_", "_mw") {
                cfg.p_base_mw[i] = num(NonNegative)?;
            } else {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Parse a config file into file-unit parameters.
pub fn parse_scenario_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut seen = HashSet::new();
    let mut rate_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: body.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: body.to_string(),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        apply_key(&mut cfg, line, key, value)?;
        if key.starts_with("r_") {
            rate_line = line;
        }
    }
    if cfg.total_rate_mbps() <= 0.0 {
        return Err(ConfigError::BadValue {
            line: rate_line,
            key: "r_fl_mbps + r_rl_mbps".into(),
            value: "0".into(),
            reason: "total demand must be positive".into(),
        });
    }
    Ok(cfg)
}

/// Parse a config file straight into a validated [`Scenario`].
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    parse_scenario_config(text)?.to_scenario()
}
