//! User personalization of knapsack item pools.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::knapsack::KnapsackItem;
use crate::domain::{League, PlayerTable, Position};
use crate::error::{Result, TradeError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PersonalizationRequest {
    pub watchlist: BTreeSet<String>,
    pub prefer_release: BTreeSet<String>,
    pub untradables: BTreeSet<String>,
    pub target_positions: BTreeSet<Position>,
    pub must_acquire: BTreeSet<String>,
    pub must_release: BTreeSet<String>,
    pub risk: f64,
}

impl Default for PersonalizationRequest {
    fn default() -> Self {
        Self {
            watchlist: BTreeSet::new(),
            prefer_release: BTreeSet::new(),
            untradables: BTreeSet::new(),
            target_positions: BTreeSet::new(),
            must_acquire: BTreeSet::new(),
            must_release: BTreeSet::new(),
            risk: 1.0,
        }
    }
}

impl PersonalizationRequest {
    pub fn with_risk(risk: f64) -> Self {
        Self { risk, ..Self::default() }
    }

    /// True when the user expressed any preference beyond risk.
    pub fn is_personalized(&self) -> bool {
        !(self.watchlist.is_empty()
            && self.prefer_release.is_empty()
            && self.untradables.is_empty()
            && self.target_positions.is_empty()
            && self.must_acquire.is_empty()
            && self.must_release.is_empty())
    }

    /// Checks the request against the league from the requesting team's side.
    pub fn validate(&self, league: &League, requesting_team: &str) -> Result<()> {
        if !(self.risk > 0.0 && self.risk <= 1.0) {
            return Err(TradeError::InvalidRisk(self.risk));
        }
        let team = league
            .team(requesting_team)
            .ok_or_else(|| TradeError::UnknownTeam(requesting_team.to_string()))?;
        let table = league.player_table();
        let sets = [
            &self.watchlist,
            &self.prefer_release,
            &self.untradables,
            &self.must_acquire,
            &self.must_release,
        ];
        if let Some(unknown) = sets.iter().flat_map(|s| s.iter()).find(|pid| table.get(pid).is_none()) {
            return Err(TradeError::UnknownPlayer(unknown.clone()));
        }
        for pid in self.must_acquire.iter().chain(&self.must_release) {
            if self.untradables.contains(pid) {
                return Err(TradeError::ForcedUntradable(pid.clone()));
            }
        }
        if let Some(pid) = self.must_release.iter().find(|pid| !team.roster.contains(pid)) {
            return Err(TradeError::ReleaseNotOwned(pid.clone()));
        }
        if let Some(pid) = self.must_acquire.iter().find(|pid| team.roster.contains(pid)) {
            return Err(TradeError::AcquireAlreadyOwned(pid.clone()));
        }
        Ok(())
    }
}

/// Multipliers for watchlist boost (w1), release-preference cost cut (w2)
/// and target-position boost (w4). Untradables (w3) are excluded outright.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PersonalizationWeights {
    pub watchlist_boost: f64,
    pub release_discount: f64,
    pub position_boost: f64,
}

impl Default for PersonalizationWeights {
    fn default() -> Self {
        Self {
            watchlist_boost: 1.25,
            release_discount: 0.8,
            position_boost: 1.2,
        }
    }
}

/// Which side of the trade a pool feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolSide {
    /// Opponent players the requester may receive.
    Acquire,
    /// Requester players the opponent may receive.
    Release,
}

/// Knapsack candidates plus the players forced into the selection.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ItemPool {
    pub items: Vec<KnapsackItem>,
    pub forced: Vec<KnapsackItem>,
}

fn rescale(x: u32, factor: f64) -> u32 {
    (f64::from(x) * factor).round().clamp(1.0, 100.0) as u32
}

/// Applies the request to one side's candidate items.
pub fn apply_personalization(
    items: Vec<KnapsackItem>,
    side: PoolSide,
    table: &PlayerTable<'_>,
    request: &PersonalizationRequest,
    weights: &PersonalizationWeights,
) -> ItemPool {
    let forced_ids = match side {
        PoolSide::Acquire => &request.must_acquire,
        PoolSide::Release => &request.must_release,
    };
    let mut pool = ItemPool::default();
    for mut item in items {
        if request.untradables.contains(&item.player_id) {
            continue;
        }
        match side {
            PoolSide::Acquire => {
                if request.watchlist.contains(&item.player_id) {
                    item.value = rescale(item.value, weights.watchlist_boost);
                }
                let targeted = table
                    .get(&item.player_id)
                    .is_some_and(|p| request.target_positions.contains(&p.position));
                if targeted {
                    item.value = rescale(item.value, weights.position_boost);
                }
            }
            PoolSide::Release => {
                if request.prefer_release.contains(&item.player_id) {
                    item.weight = rescale(item.weight, weights.release_discount);
                }
            }
        }
        if forced_ids.contains(&item.player_id) {
            pool.forced.push(item);
        } else {
            pool.items.push(item);
        }
    }
    pool
}
