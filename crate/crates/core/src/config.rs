//! Simulation configuration: defaults, validation, and layering of a TOML
//! config file and command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strategy::PolicyKind;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("config file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read config file {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl ConfigError {
    /// Name of the offending field, for `Invalid` errors.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Everything needed to run one experiment (a set of independent trials).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_agents: usize,
    pub n_meanings: usize,
    pub n_words: usize,
    pub policy: PolicyKind,
    /// Sliding-window length for the LAPS estimate.
    pub tau: usize,
    /// Bandit exploration rate.
    pub gamma: f64,
    /// Bandit weight-decay time scale; `None` means "same as `tau`".
    pub bandit_n: Option<f64>,
    pub max_interactions: u64,
    pub measure_every: u64,
    /// Probe interactions per Monte Carlo TCS measurement; 0 selects the
    /// exact population computation instead.
    pub mc_samples: usize,
    pub trials: u32,
    pub seed: u64,
    pub stop_on_convergence: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_agents: 40,
            n_meanings: 40,
            n_words: 40,
            policy: PolicyKind::LapsMax,
            tau: 2,
            gamma: 0.01,
            bandit_n: None,
            max_interactions: 80_000,
            measure_every: 100,
            mc_samples: 1_000,
            trials: 8,
            seed: 0,
            stop_on_convergence: false,
        }
    }
}

impl SimulationConfig {
    pub fn effective_bandit_n(&self) -> f64 {
        self.bandit_n.unwrap_or(self.tau as f64)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_agents < 2 {
            return Err(invalid("agents", "need at least 2 agents"));
        }
        if self.n_meanings < 1 {
            return Err(invalid("meanings", "need at least 1 meaning"));
        }
        if self.n_words < 1 {
            return Err(invalid("words", "need at least 1 word"));
        }
        if u32::try_from(self.n_meanings).is_err() {
            return Err(invalid("meanings", "too many meanings"));
        }
        if u32::try_from(self.n_words).is_err() {
            return Err(invalid("words", "too many words"));
        }
        if self.tau < 1 {
            return Err(invalid("tau", "window length must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(invalid(
                "gamma",
                format!("{} is outside (0, 1]", self.gamma),
            ));
        }
        if let Some(n) = self.bandit_n {
            if !(n > 0.0 && n.is_finite()) {
                return Err(invalid("bandit_n", format!("{n} is not a positive number")));
            }
        }
        if self.max_interactions < 1 {
            return Err(invalid("max_interactions", "must be at least 1"));
        }
        if self.measure_every < 1 {
            return Err(invalid("measure_every", "must be at least 1"));
        }
        if self.trials < 1 {
            return Err(invalid("trials", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of measurement ticks per trial.
    pub fn ticks(&self) -> u64 {
        self.max_interactions / self.measure_every
    }

    /// Layers `overrides` on top of `self`.
    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! set {
            ($($src:ident => $dst:ident),* $(,)?) => {
                $(if let Some(v) = o.$src.clone() { self.$dst = v; })*
            };
        }
        set!(
            agents => n_agents,
            meanings => n_meanings,
            words => n_words,
            policy => policy,
            tau => tau,
            gamma => gamma,
            max_interactions => max_interactions,
            measure_every => measure_every,
            mc_samples => mc_samples,
            trials => trials,
            seed => seed,
            stop_on_convergence => stop_on_convergence,
        );
        if o.bandit_n.is_some() {
            self.bandit_n = o.bandit_n;
        }
    }

    /// Defaults, then the config file (if any), then explicit overrides.
    pub fn resolve(
        file: Option<&ConfigOverrides>,
        flags: &ConfigOverrides,
    ) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            cfg.apply(f);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Partial configuration, as read from a TOML file or the command line.
/// Keys mirror the CLI flag names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub agents: Option<usize>,
    pub meanings: Option<usize>,
    pub words: Option<usize>,
    pub policy: Option<PolicyKind>,
    pub tau: Option<usize>,
    pub gamma: Option<f64>,
    pub bandit_n: Option<f64>,
    pub max_interactions: Option<u64>,
    pub measure_every: Option<u64>,
    pub mc_samples: Option<usize>,
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    pub stop_on_convergence: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                ConfigError::MissingFile(path.to_path_buf())
            } else {
                ConfigError::Io {
                    path: path.to_path_buf(),
                    source,
                }
            }
        })?;
        Self::from_toml_str(&text, path)
    }
}
