//! Loading league, player, profile and personalization files.

use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use trade_core::synthetic::{sample_profiles, standard_rules};
use trade_core::{League, ModelImportanceProfile, PlayerRecord};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlayersFile {
    League(League),
    Players(Vec<PlayerRecord>),
}

/// Accepts a full league file or a bare player array. A bare array gets the
/// standard slot rules and no teams, so sheets carry no cost breakdowns.
pub fn read_league_or_players(path: &Path) -> anyhow::Result<League> {
    Ok(match read_json::<PlayersFile>(path)? {
        PlayersFile::League(league) => league,
        PlayersFile::Players(players) => League { rules: standard_rules(0, 0), teams: Vec::new(), players },
    })
}

/// Profiles from `path`, or the built-in sample set.
pub fn read_profiles(path: Option<&Path>) -> anyhow::Result<Vec<ModelImportanceProfile>> {
    match path {
        Some(p) => read_json(p),
        None => Ok(sample_profiles()),
    }
}
