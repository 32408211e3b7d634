//! Optional JSON defaults named by `BFFKIT_CONFIG`. Command-line flags
//! override every field.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

pub const CONFIG_ENV: &str = "BFFKIT_CONFIG";

pub const DEFAULT_OMEGA_MIN: f64 = 0.005;
pub const DEFAULT_OMEGA_MAX: f64 = 1.0;
pub const DEFAULT_OMEGA_STEP: f64 = 0.005;
pub const DEFAULT_R: f64 = 1.0;
pub const DEFAULT_LEVELS: [f64; 3] = [-1.0, -3.0, -5.0];

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_step: Option<f64>,
    pub r: Option<f64>,
    pub mmap: Option<bool>,
    pub r_max: Option<f64>,
    pub levels: Option<Vec<f64>>,
    /// `as_printed` or `two_denominator`.
    pub linear_model_scale: Option<String>,
    pub families: Option<Vec<String>>,
    pub tuples: Option<usize>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
    }

    /// The config named by the environment value, or all defaults.
    pub fn from_env_value(value: Option<PathBuf>) -> Result<Config> {
        match value {
            Some(p) if !p.as_os_str().is_empty() => Config::load(&p),
            _ => Ok(Config::default()),
        }
    }
}
