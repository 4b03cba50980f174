use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "TRIFREE_CONFIG";

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Runtime configuration: enumeration caps, seed, output format and worker
/// count. Values come from (in increasing priority) built-in defaults, the
/// config file named by `TRIFREE_CONFIG` or `--config`, and flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub brute_cap: u32,
    pub structural_cap: u32,
    pub oracle_cap: u32,
    pub seed: u64,
    pub format: OutputFormat,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            brute_cap: trifree::caps::BRUTE,
            structural_cap: trifree::caps::STRUCTURAL,
            oracle_cap: trifree::caps::ORACLE,
            seed: 0,
            format: OutputFormat::Text,
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn load(explicit: Option<&Path>) -> Result<Self, String> {
        let path: Option<PathBuf> = explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.brute_cap == 0 || self.structural_cap == 0 || self.oracle_cap == 0 {
            return Err("caps must be positive".into());
        }
        Ok(())
    }
}
