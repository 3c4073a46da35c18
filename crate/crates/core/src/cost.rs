//! Tradability cost of each rostered player given the owning team's roster.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domain::{LeagueRules, PlayerRecord, Position};
use crate::error::{Result, TradeError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub position_importance_term: f64,
    pub all_roster_projection_term: f64,
    pub position_projection_term: f64,
    pub rank_term: f64,
    pub pre_pc: f64,
    pub norm_pcost: f64,
}

/// Starter slots a player at `position` can fill, per rostered player eligible
/// for those slots. A slotted position with nobody eligible counts as fully
/// scarce (1); a position without slots has no importance (0).
pub fn position_importance(rules: &LeagueRules, position: Position, roster: &[&PlayerRecord]) -> f64 {
    let slots = rules.slots_for(position);
    if slots == 0 {
        return 0.0;
    }
    let competing = rules.competing_positions(position);
    let eligible = roster.iter().filter(|p| competing.contains(&p.position)).count();
    if eligible == 0 {
        return 1.0;
    }
    f64::from(slots) / eligible as f64
}

/// Mean of the position importance, projection share of the roster,
/// projection share of the position group and inverted positional rank.
///
/// `position_ranks` holds league-wide positional ranks (1 = best). The rank
/// term is inverted within the team's position group so the best player
/// at a position carries the highest cost.
pub fn player_cost(
    player: &PlayerRecord,
    roster: &[&PlayerRecord],
    rules: &LeagueRules,
    position_ranks: &HashMap<String, u32>,
) -> Result<CostBreakdown> {
    let mut team: Vec<&PlayerRecord> = roster.to_vec();
    if !team.iter().any(|p| p.player_id == player.player_id) {
        team.push(player);
    }

    let importance = position_importance(rules, player.position, &team);
    let max_importance = rules
        .positions_with_slots()
        .into_iter()
        .map(|pos| position_importance(rules, pos, &team))
        .fold(0.0, f64::max);
    let position_importance_term = if max_importance > 0.0 { importance / max_importance } else { 0.0 };

    let total: f64 = team.iter().map(|p| p.season_projection).sum();
    if !(total > 0.0) {
        return Err(TradeError::ZeroDenominator("roster projection sum"));
    }
    let group: Vec<&PlayerRecord> = team.iter().copied().filter(|p| p.position == player.position).collect();
    let group_total: f64 = group.iter().map(|p| p.season_projection).sum();
    if !(group_total > 0.0) {
        return Err(TradeError::ZeroDenominator("position projection sum"));
    }

    let rank_of = |p: &PlayerRecord| {
        position_ranks
            .get(&p.player_id)
            .copied()
            .ok_or_else(|| TradeError::MissingRank(p.player_id.clone()))
    };
    let group_ranks = group.iter().map(|p| rank_of(p)).collect::<Result<Vec<u32>>>()?;
    let worst = group_ranks.iter().copied().max().unwrap_or(1);
    let best = group_ranks.iter().copied().min().unwrap_or(1);
    let inverted = f64::from(worst - rank_of(player)? + 1);
    let rank_term = inverted / f64::from(worst - best + 1);

    let all_roster_projection_term = player.season_projection / total;
    let position_projection_term = player.season_projection / group_total;
    let pre_pc = (position_importance_term + all_roster_projection_term + position_projection_term + rank_term) / 4.0;
    Ok(CostBreakdown {
        position_importance_term,
        all_roster_projection_term,
        position_projection_term,
        rank_term,
        pre_pc,
        norm_pcost: pre_pc.clamp(0.0, 1.0),
    })
}

/// Cost of every player on a roster, keyed by player id.
pub fn team_costs(
    roster: &[&PlayerRecord],
    rules: &LeagueRules,
    position_ranks: &HashMap<String, u32>,
) -> Result<HashMap<String, CostBreakdown>> {
    roster
        .iter()
        .map(|p| Ok((p.player_id.clone(), player_cost(p, roster, rules, position_ranks)?)))
        .collect()
}
