//! Optional TOML defaults. Flags win over the file, the file over built-ins.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::exit::{CliResult, Failure};

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub delta_min: Option<f64>,
    pub samples: Option<usize>,
    pub radii: Option<usize>,
    pub r_min: Option<f64>,
    pub seed: Option<u64>,
    pub s: Option<String>,
    pub sigma: Option<String>,
    #[serde(rename = "C")]
    pub c: Option<Vec<f64>>,
    pub mu: Option<String>,
    pub m_max: Option<u32>,
    pub k_max: Option<usize>,
    pub delta: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }
}

/// First present value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
