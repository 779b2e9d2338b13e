//! Experiment configuration files.
//!
//! A config is a TOML document with one table per experiment:
//!
//! ```toml
//! [fair]
//! p = 0.5
//! N_grid = [1000, 100000, 10000000]
//! trials = 50
//! seed = 7
//! epsilon = 0.5      # optional, default 0.5
//! gamma_a = 1.5      # optional; enables the γ_N = a·log_λ N + b check
//! gamma_b = 0.0      # optional, default 0, requires gamma_a
//! ```
//!
//! Experiments run in lexicographic order of their table names. Seeds must
//! fit in a TOML integer (at most 2^63 - 1).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use switchrun::{BernoulliParams, ExperimentConfig, GammaFamily};

use crate::error::{CliError, Result};

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    p: f64,
    #[serde(rename = "N_grid")]
    n_grid: Vec<u64>,
    trials: u64,
    seed: u64,
    epsilon: Option<f64>,
    gamma_a: Option<f64>,
    gamma_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExperimentOwned")]
pub struct NamedExperiment {
    pub name: String,
    pub config: ExperimentConfig,
}

// Deserialization helper so that manifests re-validate the configs they store.
#[derive(Deserialize)]
struct RawExperimentOwned {
    name: String,
    config: ExperimentConfig,
}

impl TryFrom<RawExperimentOwned> for NamedExperiment {
    type Error = String;

    fn try_from(raw: RawExperimentOwned) -> std::result::Result<Self, String> {
        raw.config.validate().map_err(|e| e.to_string())?;
        Ok(Self {
            name: raw.name,
            config: raw.config,
        })
    }
}

impl TryFrom<RawExperiment> for ExperimentConfig {
    type Error = String;

    fn try_from(raw: RawExperiment) -> std::result::Result<Self, String> {
        let gamma = match (raw.gamma_a, raw.gamma_b) {
            (Some(a), b) => Some(GammaFamily {
                a,
                b: b.unwrap_or(0.0),
            }),
            (None, Some(_)) => return Err("gamma_b given without gamma_a".into()),
            (None, None) => None,
        };
        let config = ExperimentConfig {
            p: BernoulliParams::new(raw.p).map_err(|e| e.to_string())?,
            n_grid: raw.n_grid,
            trials: raw.trials,
            seed: raw.seed,
            epsilon: raw.epsilon.unwrap_or(DEFAULT_EPSILON),
            gamma,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Debug, Deserialize)]
#[serde(transparent)]
struct RawConfig(BTreeMap<String, ValidatedExperiment>);

#[derive(Debug, Deserialize)]
#[serde(try_from = "RawExperiment")]
struct ValidatedExperiment(ExperimentConfig);

impl TryFrom<RawExperiment> for ValidatedExperiment {
    type Error = String;

    fn try_from(raw: RawExperiment) -> std::result::Result<Self, String> {
        ExperimentConfig::try_from(raw).map(ValidatedExperiment)
    }
}

/// Parses config text. Errors carry the line and column reported by the
/// TOML parser.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<NamedExperiment>> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config {
        path: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    if raw.0.is_empty() {
        return Err(CliError::Config {
            path: origin.to_string(),
            message: "no experiment sections".into(),
        });
    }
    Ok(raw
        .0
        .into_iter()
        .map(|(name, ValidatedExperiment(config))| NamedExperiment { name, config })
        .collect())
}

pub fn load_config(path: &Path) -> Result<Vec<NamedExperiment>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}
