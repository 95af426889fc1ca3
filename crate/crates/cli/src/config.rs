//! Flat `key = value` experiment configuration (TOML syntax, no tables).

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;
use toml::Value;
use trofdm::simkit::alpha_grid;
use trofdm::{Execution, SimConfig, SystemParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{0}` is present but provides no value")]
    MissingKey(String),
    #[error("config key `{key}` has the wrong type: expected {expected}")]
    WrongType { key: String, expected: &'static str },
    #[error("config key `{key}` out of range: {reason}")]
    OutOfRange { key: String, reason: String },
}

impl ConfigError {
    /// Name of the offending key, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey(k) | ConfigError::MissingKey(k) => Some(k),
            ConfigError::WrongType { key, .. } | ConfigError::OutOfRange { key, .. } => Some(key),
            _ => None,
        }
    }
}

fn out_of_range(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Every knob of a run. Defaults reproduce the desk-scale experiments:
/// 256 subcarriers, D = 20, 100 channel realizations of 300 blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub q: usize,
    /// Back-off rate of `ber-vs-snr`.
    pub bor: usize,
    /// Back-off rates of the per-BOR series.
    pub bors: Vec<usize>,
    /// Power split used where a single value is needed.
    pub alpha: f64,
    /// Power splits plotted by `ber-vs-snr`.
    pub alphas: Vec<f64>,
    pub ebn0_grid: Vec<f64>,
    /// `Eb/N0` of `ber-vs-alpha`.
    pub ebn0_db: f64,
    /// `Eb/N0` of `sr-vs-alpha` and `alpha-opt`.
    pub sr_ebn0_db: f64,
    pub alpha_step: f64,
    pub bessel_terms: usize,
    pub realizations: usize,
    pub blocks: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            q: 256,
            bor: 4,
            bors: vec![2, 4, 8],
            alpha: 1.0,
            alphas: vec![1.0, 0.95, 0.8, 0.5, 0.2, 0.01],
            ebn0_grid: (0..=8).map(|i| f64::from(i) * 2.5).collect(),
            ebn0_db: 15.0,
            sr_ebn0_db: 20.0,
            alpha_step: 0.02,
            bessel_terms: SystemParams::DEFAULT_BESSEL_TERMS,
            realizations: SimConfig::DEFAULT_REALIZATIONS,
            blocks: SimConfig::DEFAULT_BLOCKS,
            seed: 20_200_501,
        }
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::WrongType {
            key: key.into(),
            expected: "number",
        }),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(_) => Err(out_of_range(key, "must be non-negative")),
        _ => Err(ConfigError::WrongType {
            key: key.into(),
            expected: "non-negative integer",
        }),
    }
}

fn as_list<T>(
    key: &str,
    v: &Value,
    item: impl Fn(&str, &Value) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<Value> = match v {
        Value::Array(a) => a.clone(),
        scalar => vec![scalar.clone()],
    };
    if items.is_empty() {
        return Err(ConfigError::MissingKey(key.into()));
    }
    items.iter().map(|x| item(key, x)).collect()
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        text.parse()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.q == 0 {
            return Err(out_of_range("q", "must be positive"));
        }
        let check_bor = |key: &str, bor: usize| {
            if bor == 0 || !self.q.is_multiple_of(bor) {
                Err(out_of_range(
                    key,
                    format!("q = {} is not divisible by {bor}", self.q),
                ))
            } else {
                Ok(())
            }
        };
        check_bor("bor", self.bor)?;
        for &b in &self.bors {
            check_bor("bors", b)?;
        }
        let unit = |key: &str, a: f64| {
            if (0.0..=1.0).contains(&a) {
                Ok(())
            } else {
                Err(out_of_range(key, format!("{a} not in [0, 1]")))
            }
        };
        unit("alpha", self.alpha)?;
        for &a in &self.alphas {
            unit("alphas", a)?;
        }
        if !(self.alpha_step > 0.0 && self.alpha_step <= 1.0) {
            return Err(out_of_range(
                "alpha_step",
                format!("{} not in (0, 1]", self.alpha_step),
            ));
        }
        for (key, v) in [("ebn0_db", self.ebn0_db), ("sr_ebn0_db", self.sr_ebn0_db)] {
            if !v.is_finite() {
                return Err(out_of_range(key, "must be finite"));
            }
        }
        if self.ebn0_grid.iter().any(|v| !v.is_finite()) {
            return Err(out_of_range("ebn0_grid", "values must be finite"));
        }
        for (key, v) in [
            ("bessel_terms", self.bessel_terms),
            ("realizations", self.realizations),
            ("blocks", self.blocks),
        ] {
            if v == 0 {
                return Err(out_of_range(key, "must be positive"));
            }
        }
        Ok(())
    }

    pub fn alpha_axis(&self) -> Vec<f64> {
        alpha_grid(self.alpha_step)
    }

    /// Monte Carlo settings for back-off rate `bor` with noise at `ebn0_db`.
    pub fn sim_config(
        &self,
        bor: usize,
        ebn0_db: f64,
    ) -> Result<SimConfig, trofdm::model::ModelError> {
        let params = SystemParams::new(self.q, bor)?
            .with_alpha(self.alpha)?
            .with_bessel_terms(self.bessel_terms)?
            .with_ebn0_db(ebn0_db)?;
        Ok(SimConfig::new(params, self.seed)
            .with_counts(self.realizations, self.blocks)
            .with_execution(Execution::Parallel))
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
        let mut cfg = Self::default();
        for (key, value) in &table {
            let k = key.as_str();
            match k {
                "q" => cfg.q = as_usize(k, value)?,
                "bor" => cfg.bor = as_usize(k, value)?,
                "bors" => cfg.bors = as_list(k, value, as_usize)?,
                "alpha" => cfg.alpha = as_f64(k, value)?,
                "alphas" => cfg.alphas = as_list(k, value, as_f64)?,
                "ebn0_grid" => cfg.ebn0_grid = as_list(k, value, as_f64)?,
                "ebn0_db" => cfg.ebn0_db = as_f64(k, value)?,
                "sr_ebn0_db" => cfg.sr_ebn0_db = as_f64(k, value)?,
                "alpha_step" => cfg.alpha_step = as_f64(k, value)?,
                "bessel_terms" => cfg.bessel_terms = as_usize(k, value)?,
                "realizations" => cfg.realizations = as_usize(k, value)?,
                "blocks" => cfg.blocks = as_usize(k, value)?,
                "seed" => {
                    cfg.seed = match value {
                        Value::Integer(i) => *i as u64,
                        Value::String(s) => s.parse().map_err(|_| out_of_range(k, "not a u64"))?,
                        _ => {
                            return Err(ConfigError::WrongType {
                                key: k.into(),
                                expected: "integer",
                            })
                        }
                    }
                }
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
