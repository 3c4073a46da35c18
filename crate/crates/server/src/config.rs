use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use trade_core::{EngineConfig, SmeWeights};

/// Service settings, loaded from a JSON file; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub engine: EngineConfig,
    pub sme_weights: SmeWeights,
    /// Importance profiles used when no sheets are loaded.
    pub profiles_path: Option<PathBuf>,
    /// Append-only ratings log; ratings stay in memory when unset.
    pub ratings_path: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
