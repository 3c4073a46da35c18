//! Seeded synthetic leagues and model profiles for fixtures, benchmarks and demos.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{League, LeagueRules, PlayerRecord, PlayerStatus, Position, SlotRule, Team};
use crate::valuation::{ComputeMode, FeatureRegistry, ModelImportanceProfile};

/// A bare active player with the given season projection.
pub fn player(id: &str, position: Position, season_projection: f64) -> PlayerRecord {
    PlayerRecord {
        player_id: id.to_string(),
        name: id.to_string(),
        position,
        season_projection,
        next_game_projection: season_projection / 17.0,
        preseason_projection: season_projection,
        season_actual: 0.0,
        avg_points_prev: 0.0,
        game_log: Vec::new(),
        percent_owned: 0.5,
        percent_started: 0.5,
        adp: 100.0,
        status: PlayerStatus::Active,
        sentiment: 0.0,
        opponent_rank: 16,
        games_left: 10,
    }
}

/// QB, 2 RB, 2 WR, TE, RB/WR/TE flex, K, DST.
pub fn standard_rules(team_count: u32, current_week: u32) -> LeagueRules {
    use Position::*;
    LeagueRules {
        slot_rules: vec![
            SlotRule::new("QB", &[QB], 1),
            SlotRule::new("RB", &[RB], 2),
            SlotRule::new("WR", &[WR], 2),
            SlotRule::new("TE", &[TE], 1),
            SlotRule::new("FLEX", &[RB, WR, TE], 1),
            SlotRule::new("K", &[K], 1),
            SlotRule::new("DST", &[DST], 1),
        ],
        team_count,
        current_week,
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub teams: usize,
    /// Rostered players per position on every team.
    pub roster_shape: Vec<(Position, usize)>,
    pub free_agents: usize,
    pub week: u32,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        use Position::*;
        Self {
            teams: 10,
            roster_shape: vec![(QB, 2), (RB, 5), (WR, 5), (TE, 2), (K, 1), (DST, 1)],
            free_agents: 40,
            week: 8,
            seed: 2021,
        }
    }
}

fn projection_profile(position: Position) -> (f64, f64) {
    match position {
        Position::QB => (280.0, 60.0),
        Position::RB => (180.0, 70.0),
        Position::WR => (170.0, 60.0),
        Position::TE => (110.0, 40.0),
        Position::K => (120.0, 20.0),
        Position::DST => (110.0, 25.0),
    }
}

const STATUSES: [PlayerStatus; 5] = [
    PlayerStatus::Probable,
    PlayerStatus::Questionable,
    PlayerStatus::Doubtful,
    PlayerStatus::Out,
    PlayerStatus::InjuredReserve,
];

fn make_player(rng: &mut ChaCha8Rng, id: String, position: Position, week: u32) -> PlayerRecord {
    let (mean, spread) = projection_profile(position);
    let projection = (mean + spread * rng.gen_range(-1.6..1.6)).max(15.0);
    let per_game = projection / 17.0;
    let game_log: Vec<f64> = (0..week)
        .map(|_| (per_game * rng.gen_range(0.2..1.8)).max(0.0))
        .collect();
    let status = if rng.gen_bool(0.12) {
        *STATUSES.choose(rng).unwrap()
    } else {
        PlayerStatus::Active
    };
    let quality = ((projection - mean) / spread / 3.2 + 0.5).clamp(0.0, 1.0);
    PlayerRecord {
        name: format!("Player {id}"),
        player_id: id,
        position,
        season_projection: projection,
        next_game_projection: per_game * rng.gen_range(0.8..1.2),
        preseason_projection: projection * rng.gen_range(0.85..1.15),
        season_actual: game_log.iter().sum(),
        avg_points_prev: if rng.gen_bool(0.1) { 0.0 } else { per_game * rng.gen_range(0.6..1.3) },
        game_log,
        percent_owned: (quality * 0.8 + rng.gen_range(0.0..0.2)).clamp(0.0, 1.0),
        percent_started: (quality * 0.7 + rng.gen_range(0.0..0.3)).clamp(0.0, 1.0),
        adp: ((1.0 - quality) * 200.0 + rng.gen_range(1.0..40.0)).round(),
        status,
        sentiment: rng.gen_range(-1.0..1.0),
        opponent_rank: rng.gen_range(1..=32),
        games_left: 17u32.saturating_sub(week),
    }
}

/// Deterministic league: players are generated per position, sorted by
/// projection and dealt to teams in shuffled rounds; leftovers are free agents.
pub fn synthetic_league(spec: &SyntheticSpec) -> League {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let team_ids: Vec<String> = (1..=spec.teams).map(|i| format!("T{i}")).collect();
    let mut rosters: Vec<Vec<String>> = vec![Vec::new(); spec.teams];
    let mut players = Vec::new();
    let shape_total: usize = spec.roster_shape.iter().map(|(_, n)| n).sum::<usize>().max(1);

    for &(position, per_team) in &spec.roster_shape {
        let extra = spec.free_agents * per_team / shape_total;
        let count = spec.teams * per_team + extra;
        let mut group: Vec<PlayerRecord> = (0..count)
            .map(|i| make_player(&mut rng, format!("{}{:03}", position.as_str().to_lowercase(), i + 1), position, spec.week))
            .collect();
        group.sort_by(|a, b| b.season_projection.total_cmp(&a.season_projection));
        let mut dealt = group.iter();
        for _ in 0..per_team {
            let mut order: Vec<usize> = (0..spec.teams).collect();
            order.shuffle(&mut rng);
            for t in order {
                if let Some(p) = dealt.next() {
                    rosters[t].push(p.player_id.clone());
                }
            }
        }
        players.extend(group);
    }
    players.sort_by(|a, b| a.player_id.cmp(&b.player_id));

    League {
        rules: standard_rules(spec.teams as u32, spec.week),
        teams: team_ids
            .into_iter()
            .zip(rosters)
            .map(|(team_id, roster)| Team { team_id, roster })
            .collect(),
        players,
    }
}

fn random_profile(rng: &mut ChaCha8Rng, model_id: &str, mode: ComputeMode, accuracy: f64, sharpness: i32) -> ModelImportanceProfile {
    let raw: Vec<f64> = FeatureRegistry::NAMES
        .iter()
        .map(|_| rng.gen_range(0.05f64..1.0).powi(sharpness))
        .collect();
    let total: f64 = raw.iter().sum();
    let importances: BTreeMap<String, f64> = FeatureRegistry::NAMES
        .iter()
        .zip(raw)
        .map(|(name, w)| (name.to_string(), w / total))
        .collect();
    ModelImportanceProfile::ranked(model_id, mode, accuracy, importances)
}

/// One expert-rule ranking, one classical model and four quantum models
/// with fixed accuracies.
pub fn sample_profiles() -> Vec<ModelImportanceProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    vec![
        random_profile(&mut rng, "sme-rules", ComputeMode::Sme, 0.90, 1),
        random_profile(&mut rng, "xgb", ComputeMode::Classical, 0.957, 1),
        random_profile(&mut rng, "hqnn-pi", ComputeMode::Quantum, 0.943, 3),
        random_profile(&mut rng, "qsvc-pi", ComputeMode::Quantum, 0.855, 3),
        random_profile(&mut rng, "qsvc-ale", ComputeMode::Quantum, 0.855, 2),
        random_profile(&mut rng, "vqc-pi", ComputeMode::Quantum, 0.573, 2),
    ]
}
