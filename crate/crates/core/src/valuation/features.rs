//! Per-player tier scores and model features derived from the player table.

use std::collections::HashMap;

use super::model::FeatureVector;
use super::sme::{boom_ratio, bust_ratio, projection_valuation, rank_score, TierScores};
use crate::domain::{positional_ranks, PlayerRecord, Position};

/// Names of the features produced by [`PoolContext::features`]; all lie in [0, 1].
pub struct FeatureRegistry;

impl FeatureRegistry {
    pub const NAMES: [&'static str; 12] = [
        "projection_valuation",
        "projection_rank",
        "next_game_rank",
        "preseason_rank",
        "boom_ratio",
        "bust_avoidance",
        "percent_owned",
        "percent_started",
        "sentiment",
        "adp_rank",
        "momentum",
        "availability",
    ];

    pub fn contains(name: &str) -> bool {
        Self::NAMES.contains(&name)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Spread {
    mean: f64,
    std: f64,
}

/// League-wide context: positional score pools, projection spreads and ranks.
#[derive(Debug, Clone)]
pub struct PoolContext {
    pools: HashMap<Position, Vec<f64>>,
    spreads: HashMap<Position, Spread>,
    position_sizes: HashMap<Position, usize>,
    projection_rank: HashMap<String, u32>,
    next_game_rank: HashMap<String, u32>,
    preseason_rank: HashMap<String, u32>,
    adp_rank: HashMap<String, u32>,
    max_prev: HashMap<Position, f64>,
    max_games_left: u32,
    player_count: usize,
}

fn rank_by(players: &[PlayerRecord], key: impl Fn(&PlayerRecord) -> f64, descending: bool) -> HashMap<String, u32> {
    let mut ranks = HashMap::new();
    for pos in Position::ALL {
        let mut group: Vec<&PlayerRecord> = players.iter().filter(|p| p.position == pos).collect();
        group.sort_by(|a, b| {
            let ord = key(a).total_cmp(&key(b));
            let ord = if descending { ord.reverse() } else { ord };
            ord.then_with(|| a.player_id.cmp(&b.player_id))
        });
        for (i, p) in group.into_iter().enumerate() {
            ranks.insert(p.player_id.clone(), i as u32 + 1);
        }
    }
    ranks
}

impl PoolContext {
    pub fn new(players: &[PlayerRecord]) -> Self {
        let mut pools: HashMap<Position, Vec<f64>> = HashMap::new();
        let mut projections: HashMap<Position, Vec<f64>> = HashMap::new();
        let mut max_prev: HashMap<Position, f64> = HashMap::new();
        for p in players {
            pools.entry(p.position).or_default().extend(p.game_log.iter().copied());
            projections.entry(p.position).or_default().push(p.season_projection);
            let m = max_prev.entry(p.position).or_insert(0.0);
            *m = m.max(p.avg_points_prev);
        }
        let spreads = projections
            .iter()
            .map(|(&pos, xs)| {
                let n = xs.len() as f64;
                let mean = xs.iter().sum::<f64>() / n;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                (pos, Spread { mean, std: var.sqrt() })
            })
            .collect();
        let position_sizes = projections.iter().map(|(&pos, xs)| (pos, xs.len())).collect();

        // ADP is ranked across all positions: lower draft position is better.
        let mut by_adp: Vec<&PlayerRecord> = players.iter().collect();
        by_adp.sort_by(|a, b| a.adp.total_cmp(&b.adp).then_with(|| a.player_id.cmp(&b.player_id)));
        let adp_rank = by_adp
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p.player_id.clone(), i as u32 + 1))
            .collect();

        Self {
            pools,
            spreads,
            position_sizes,
            projection_rank: positional_ranks(players),
            next_game_rank: rank_by(players, |p| p.next_game_projection, true),
            preseason_rank: rank_by(players, |p| p.preseason_projection, true),
            adp_rank,
            max_prev,
            max_games_left: players.iter().map(|p| p.games_left).max().unwrap_or(0),
            player_count: players.len(),
        }
    }

    pub fn positional_rank(&self, player: &PlayerRecord) -> u32 {
        self.projection_rank.get(&player.player_id).copied().unwrap_or(u32::MAX)
    }

    fn position_score(&self, ranks: &HashMap<String, u32>, player: &PlayerRecord) -> f64 {
        let size = self.position_sizes.get(&player.position).copied().unwrap_or(0);
        let rank = ranks.get(&player.player_id).copied().unwrap_or(size as u32) as usize;
        rank_score(rank, size)
    }

    fn pool(&self, position: Position) -> &[f64] {
        self.pools.get(&position).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn boom(&self, player: &PlayerRecord) -> f64 {
        boom_ratio(&player.game_log, self.pool(player.position)).unwrap_or(0.0)
    }

    pub fn bust(&self, player: &PlayerRecord) -> f64 {
        bust_ratio(&player.game_log, self.pool(player.position)).unwrap_or(0.0)
    }

    /// Boom indicator for the most recent game.
    pub fn current_week_boom(&self, player: &PlayerRecord) -> f64 {
        match player.game_log.last() {
            Some(&last) => boom_ratio(&[last], self.pool(player.position)).unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// Season projection valuation against the positional spread (0.5 when
    /// every player at the position shares one projection).
    pub fn projection_value(&self, player: &PlayerRecord) -> f64 {
        let spread = self.spreads.get(&player.position).copied().unwrap_or_default();
        projection_valuation(player.season_projection, spread.mean, spread.std).unwrap_or(0.5)
    }

    pub fn tiers(&self, player: &PlayerRecord) -> TierScores<f64> {
        let tier1 = self.position_score(&self.projection_rank, player);
        let tier2 = (self.boom(player) + (1.0 - self.bust(player)) + self.position_score(&self.next_game_rank, player)) / 3.0;
        let tier3 = (self.current_week_boom(player)
            + player.percent_started
            + self.position_score(&self.preseason_rank, player)
            + self.projection_value(player))
            / 4.0;
        let adp = self.adp_rank.get(&player.player_id).copied().unwrap_or(self.player_count as u32);
        let tier4 = rank_score(adp as usize, self.player_count);
        TierScores { tier1, tier2, tier3, tier4 }
    }

    pub fn features(&self, player: &PlayerRecord) -> FeatureVector {
        let adp = self.adp_rank.get(&player.player_id).copied().unwrap_or(self.player_count as u32);
        let max_prev = self.max_prev.get(&player.position).copied().unwrap_or(0.0);
        let momentum = if max_prev > 0.0 { player.avg_points_prev / max_prev } else { 0.0 };
        let availability = if self.max_games_left > 0 {
            f64::from(player.games_left) / f64::from(self.max_games_left)
        } else {
            0.0
        };
        let values = [
            self.projection_value(player),
            self.position_score(&self.projection_rank, player),
            self.position_score(&self.next_game_rank, player),
            self.position_score(&self.preseason_rank, player),
            self.boom(player),
            1.0 - self.bust(player),
            player.percent_owned,
            player.percent_started,
            (player.sentiment.clamp(-1.0, 1.0) + 1.0) / 2.0,
            rank_score(adp as usize, self.player_count),
            momentum.clamp(0.0, 1.0),
            availability,
        ];
        FeatureRegistry::NAMES.iter().copied().zip(values).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::player;

    #[test]
    fn features_cover_the_registry_and_stay_in_unit_range() {
        let mut players = vec![
            player("a", Position::RB, 200.0),
            player("b", Position::RB, 150.0),
            player("c", Position::WR, 120.0),
        ];
        players[0].game_log = vec![30.0, 4.0, 18.0];
        players[1].game_log = vec![12.0, 9.0];
        players[1].sentiment = -1.0;
        let ctx = PoolContext::new(&players);
        for p in &players {
            let f = ctx.features(p);
            assert_eq!(f.0.len(), FeatureRegistry::NAMES.len());
            for (name, v) in &f.0 {
                assert!(FeatureRegistry::contains(name));
                assert!((0.0..=1.0).contains(v), "{name}={v}");
            }
            let t = ctx.tiers(p);
            for v in [t.tier1, t.tier2, t.tier3, t.tier4] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
        assert_eq!(ctx.positional_rank(&players[0]), 1);
        assert_eq!(ctx.positional_rank(&players[1]), 2);
        assert_eq!(ctx.features(&players[1]).get("sentiment"), Some(0.0));
        // Lone WR: no spread, neutral projection valuation.
        assert_eq!(ctx.projection_value(&players[2]), 0.5);
    }
}
