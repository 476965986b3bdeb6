//! Flag/env/file configuration merging and the effective-config hash.
//!
//! Precedence: command-line flags > `GEOREF_*` environment variables >
//! config file > built-in defaults. Flag/env precedence is handled by the
//! argument parser; the file supplies values only where neither is given.

use crate::util::{canonical_json, sha256_hex};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Optional TOML config file. Every field mirrors a flag.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub per_type_random: Option<u32>,
    pub two_step_ratio: Option<f64>,
    pub jobs: Option<usize>,
    pub concurrency: Option<usize>,
    pub shots: Option<usize>,
    pub accept_tol: Option<f64>,
    pub max_restarts: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Stable digest of the effective settings, embedded in manifests and
/// reports so any output can be traced to its exact configuration.
pub fn config_hash<T: Serialize>(effective: &T) -> String {
    sha256_hex(canonical_json(effective).as_bytes())
}
