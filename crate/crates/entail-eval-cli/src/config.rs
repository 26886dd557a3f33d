//! Optional TOML configuration file. Every field is optional; command-line
//! flags override whatever the file sets.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub backend: BackendSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendSection {
    pub backend_id: Option<String>,
    pub model_name: Option<String>,
    pub seed: Option<i64>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API key. The key
    /// itself never goes in a config file.
    pub credentials_env: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub policies: Option<Vec<String>>,
    pub schemes: Option<Vec<String>>,
    pub workers: Option<usize>,
    pub failure_threshold: Option<f64>,
    pub score_all_ranks: Option<bool>,
    pub auroc_population: Option<String>,
    pub exclude_systems: Option<Vec<String>>,
}

pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
}
