//! JSON run configuration. Every field is optional; command-line flags win
//! over the file.

use std::fs;
use std::path::{Path, PathBuf};

use microloc::{ProcessSpec, ScalarFunctionSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: Option<ProcessSpec>,
    /// Deterministic function to sample instead of a process.
    pub function: Option<ScalarFunctionSpec>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t0: Option<f64>,
    pub t0_grid: Option<Vec<f64>>,
    pub s_grid: Option<Vec<f64>>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub window: Option<usize>,
    pub paths: Option<usize>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub suite: Option<String>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag if given, else the config value.
pub fn pick<T: Clone>(flag: Option<T>, file: &Option<T>) -> Option<T> {
    flag.or_else(|| file.clone())
}

pub fn require<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing {what}")))
}
