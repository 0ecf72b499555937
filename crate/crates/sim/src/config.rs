//! TOML run configuration.
//!
//! Every table and field is optional; missing values take the defaults that
//! `melsim --print-defaults` prints. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use mel_game::edge::LearningMode;
use mel_game::game::Policy;
use mel_game::orchestrator::SolverConfig;
use mel_game::scenario::ScenarioConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("invalid config at `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_owned(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Seconds.
    pub t_max: Vec<f64>,
    pub seeds: Vec<u64>,
    pub policies: Vec<Policy>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_max: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            seeds: (0..10).collect(),
            policies: Policy::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NashConfig {
    /// Run the equilibrium audit on every run.
    pub verify: bool,
    pub epsilon: f64,
    /// Points per axis of the deviation grids.
    pub grid: usize,
}

impl Default for NashConfig {
    fn default() -> Self {
        Self {
            verify: false,
            epsilon: 1e-5,
            grid: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub sweep: SweepConfig,
    pub solver: SolverConfig,
    pub nash: NashConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_owned(),
            source: Box::new(e),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }

    pub fn with_mode(mut self, mode: LearningMode) -> Self {
        self.scenario.task.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario
            .validate()
            .map_err(|e| core_error("scenario", e))?;
        self.solver.validate().map_err(|e| core_error("", e))?;
        let sweep = &self.sweep;
        if sweep.t_max.is_empty() {
            return Err(invalid("sweep.t_max", "need at least one deadline"));
        }
        if let Some(t) = sweep.t_max.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(invalid(
                "sweep.t_max",
                format!("deadlines must be positive, got {t}"),
            ));
        }
        if sweep.seeds.is_empty() {
            return Err(invalid("sweep.seeds", "need at least one seed"));
        }
        if sweep.policies.is_empty() {
            return Err(invalid("sweep.policies", "need at least one policy"));
        }
        if !(self.nash.epsilon >= 0.0) {
            return Err(invalid("nash.epsilon", "must be non-negative"));
        }
        if self.nash.grid < 2 {
            return Err(invalid("nash.grid", "must be at least 2"));
        }
        Ok(())
    }
}

/// Qualifies a core validation error with the table it came from.
fn core_error(table: &str, e: mel_game::Error) -> ConfigError {
    let (key, reason) = match e {
        mel_game::Error::Domain { what, value } => (what, format!("out of range: {value}")),
        mel_game::Error::InvalidConfig { key, reason } => (key, reason.to_owned()),
        other => ("", other.to_string()),
    };
    let key = match (table, key.split_once('.')) {
        ("", _) => key.to_owned(),
        (_, Some((head, _))) if head == table => key.to_owned(),
        _ => format!("{table}.{key}"),
    };
    ConfigError::Invalid { key, reason }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    RunConfig::from_toml(&text, path)
}
