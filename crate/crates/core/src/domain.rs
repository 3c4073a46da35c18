//! League, roster and player data model.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Position {
    QB,
    RB,
    WR,
    TE,
    K,
    DST,
}

impl Position {
    /// Fixed block order used by team vectors and reports.
    pub const ALL: [Position; 6] = [
        Position::QB,
        Position::RB,
        Position::WR,
        Position::TE,
        Position::K,
        Position::DST,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Position::QB => "QB",
            Position::RB => "RB",
            Position::WR => "WR",
            Position::TE => "TE",
            Position::K => "K",
            Position::DST => "DST",
        }
    }

    /// Kickers and defenses only move alongside another player.
    pub fn is_special_teams(self) -> bool {
        matches!(self, Position::K | Position::DST)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRule {
    pub slot_id: String,
    pub eligible_positions: BTreeSet<Position>,
    pub count: u32,
}

impl SlotRule {
    pub fn new(slot_id: impl Into<String>, eligible: &[Position], count: u32) -> Self {
        Self {
            slot_id: slot_id.into(),
            eligible_positions: eligible.iter().copied().collect(),
            count,
        }
    }

    pub fn is_flex(&self) -> bool {
        self.eligible_positions.len() > 1
    }

    pub fn accepts(&self, position: Position) -> bool {
        self.eligible_positions.contains(&position)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeagueRules {
    pub slot_rules: Vec<SlotRule>,
    pub team_count: u32,
    #[serde(default)]
    pub current_week: u32,
}

impl LeagueRules {
    /// Number of starter slots a player at `position` could occupy.
    pub fn slots_for(&self, position: Position) -> u32 {
        self.slot_rules
            .iter()
            .filter(|rule| rule.accepts(position))
            .map(|rule| rule.count)
            .sum()
    }

    /// Union of positions eligible for any slot `position` can fill.
    pub fn competing_positions(&self, position: Position) -> BTreeSet<Position> {
        self.slot_rules
            .iter()
            .filter(|rule| rule.accepts(position))
            .flat_map(|rule| rule.eligible_positions.iter().copied())
            .collect()
    }

    pub fn positions_with_slots(&self) -> BTreeSet<Position> {
        self.slot_rules
            .iter()
            .flat_map(|rule| rule.eligible_positions.iter().copied())
            .collect()
    }

    pub fn total_starters(&self) -> u32 {
        self.slot_rules.iter().map(|rule| rule.count).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayerStatus {
    Active,
    Probable,
    Questionable,
    Doubtful,
    Out,
    InjuredReserve,
    CovidList,
    Suspended,
}

impl Default for PlayerStatus {
    fn default() -> Self {
        PlayerStatus::Active
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerRecord {
    pub player_id: String,
    pub name: String,
    pub position: Position,
    pub season_projection: f64,
    pub next_game_projection: f64,
    pub preseason_projection: f64,
    pub season_actual: f64,
    pub avg_points_prev: f64,
    #[serde(default)]
    pub game_log: Vec<f64>,
    pub percent_owned: f64,
    pub percent_started: f64,
    pub adp: f64,
    #[serde(default)]
    pub status: PlayerStatus,
    #[serde(default)]
    pub sentiment: f64,
    pub opponent_rank: u32,
    pub games_left: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Team {
    pub team_id: String,
    pub roster: Vec<String>,
}

/// The league input document: `{rules, teams, players}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct League {
    pub rules: LeagueRules,
    #[serde(default)]
    pub teams: Vec<Team>,
    pub players: Vec<PlayerRecord>,
}

impl League {
    pub fn player_table(&self) -> PlayerTable<'_> {
        PlayerTable::new(&self.players)
    }

    pub fn team(&self, team_id: &str) -> Option<&Team> {
        self.teams.iter().find(|team| team.team_id == team_id)
    }

    /// Map of rostered player id to owning team id.
    pub fn owners(&self) -> HashMap<&str, &str> {
        self.teams
            .iter()
            .flat_map(|team| {
                team.roster
                    .iter()
                    .map(move |pid| (pid.as_str(), team.team_id.as_str()))
            })
            .collect()
    }
}

/// Borrowed lookup of players by id.
#[derive(Debug, Clone)]
pub struct PlayerTable<'a> {
    by_id: HashMap<&'a str, &'a PlayerRecord>,
}

impl<'a> PlayerTable<'a> {
    pub fn new(players: &'a [PlayerRecord]) -> Self {
        Self {
            by_id: players.iter().map(|p| (p.player_id.as_str(), p)).collect(),
        }
    }

    pub fn get(&self, player_id: &str) -> Option<&'a PlayerRecord> {
        self.by_id.get(player_id).copied()
    }

    /// Resolves a roster, silently dropping unknown ids (validation reports them).
    pub fn roster(&self, team: &Team) -> Vec<&'a PlayerRecord> {
        team.roster.iter().filter_map(|pid| self.get(pid)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    DuplicatePlayer { player_id: String, teams: Vec<String> },
    UnknownPlayer { team_id: String, player_id: String },
    EmptyRoster { team_id: String },
    DuplicateTeam { team_id: String },
    DuplicateSlot { slot_id: String },
    InvalidSlot { slot_id: String, reason: String },
    TooFewTeams { team_count: u32 },
    InvalidPlayer { player_id: String, reason: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Collects structural problems in a league without failing on the first one.
pub fn validate_league(rules: &LeagueRules, teams: &[Team], players: &[PlayerRecord]) -> ValidationReport {
    let mut findings = Vec::new();

    if rules.team_count < 2 {
        findings.push(Finding::TooFewTeams {
            team_count: rules.team_count,
        });
    }
    let mut slot_ids = BTreeSet::new();
    for rule in &rules.slot_rules {
        if !slot_ids.insert(rule.slot_id.as_str()) {
            findings.push(Finding::DuplicateSlot {
                slot_id: rule.slot_id.clone(),
            });
        }
        if rule.eligible_positions.is_empty() {
            findings.push(Finding::InvalidSlot {
                slot_id: rule.slot_id.clone(),
                reason: "no eligible positions".into(),
            });
        }
        if rule.count == 0 {
            findings.push(Finding::InvalidSlot {
                slot_id: rule.slot_id.clone(),
                reason: "count must be at least 1".into(),
            });
        }
    }

    let table = PlayerTable::new(players);
    for p in players {
        let finite = [
            p.season_projection,
            p.next_game_projection,
            p.preseason_projection,
            p.season_actual,
            p.avg_points_prev,
            p.adp,
            p.sentiment,
        ]
        .iter()
        .chain(p.game_log.iter())
        .all(|v| v.is_finite());
        if !finite {
            findings.push(Finding::InvalidPlayer {
                player_id: p.player_id.clone(),
                reason: "non-finite numeric field".into(),
            });
        }
        let fractions_ok = (0.0..=1.0).contains(&p.percent_owned) && (0.0..=1.0).contains(&p.percent_started);
        if !fractions_ok {
            findings.push(Finding::InvalidPlayer {
                player_id: p.player_id.clone(),
                reason: "ownership fractions outside [0, 1]".into(),
            });
        }
    }

    let mut seen_teams = BTreeSet::new();
    let mut holders: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for team in teams {
        if !seen_teams.insert(team.team_id.as_str()) {
            findings.push(Finding::DuplicateTeam {
                team_id: team.team_id.clone(),
            });
        }
        if team.roster.is_empty() {
            findings.push(Finding::EmptyRoster {
                team_id: team.team_id.clone(),
            });
        }
        for pid in &team.roster {
            if table.get(pid).is_none() {
                findings.push(Finding::UnknownPlayer {
                    team_id: team.team_id.clone(),
                    player_id: pid.clone(),
                });
            }
            holders.entry(pid.as_str()).or_default().push(team.team_id.clone());
        }
    }
    for (pid, owners) in holders {
        if owners.len() > 1 {
            findings.push(Finding::DuplicatePlayer {
                player_id: pid.to_string(),
                teams: owners,
            });
        }
    }

    ValidationReport { findings }
}

/// League-wide positional rank by season projection (1 = best), ties by id.
pub fn positional_ranks(players: &[PlayerRecord]) -> HashMap<String, u32> {
    let mut ranks = HashMap::with_capacity(players.len());
    for pos in Position::ALL {
        let mut group: Vec<&PlayerRecord> = players.iter().filter(|p| p.position == pos).collect();
        group.sort_by(|a, b| {
            b.season_projection
                .total_cmp(&a.season_projection)
                .then_with(|| a.player_id.cmp(&b.player_id))
        });
        for (i, p) in group.into_iter().enumerate() {
            ranks.insert(p.player_id.clone(), i as u32 + 1);
        }
    }
    ranks
}

/// Size of a maximum matching between roster players and expanded starter slots.
pub fn max_starters_matched(rules: &LeagueRules, positions: &[Position]) -> usize {
    let slots: Vec<&SlotRule> = rules
        .slot_rules
        .iter()
        .flat_map(|rule| std::iter::repeat(rule).take(rule.count as usize))
        .collect();

    // player index -> slot index
    let mut slot_of_player: Vec<Option<usize>> = vec![None; positions.len()];
    let mut matched = 0;
    for slot in 0..slots.len() {
        let mut visited = vec![false; positions.len()];
        if augment(slot, &slots, positions, &mut visited, &mut slot_of_player) {
            matched += 1;
        }
    }
    matched
}

fn augment(
    slot: usize,
    slots: &[&SlotRule],
    positions: &[Position],
    visited: &mut [bool],
    slot_of_player: &mut [Option<usize>],
) -> bool {
    for (player, &pos) in positions.iter().enumerate() {
        if visited[player] || !slots[slot].accepts(pos) {
            continue;
        }
        visited[player] = true;
        let free = match slot_of_player[player] {
            None => true,
            Some(other) => augment(other, slots, positions, visited, slot_of_player),
        };
        if free {
            slot_of_player[player] = Some(slot);
            return true;
        }
    }
    false
}

/// True iff every starter slot can be filled simultaneously from the roster.
pub fn starters_fillable(rules: &LeagueRules, roster: &[&PlayerRecord]) -> bool {
    let positions: Vec<Position> = roster.iter().map(|p| p.position).collect();
    positions_fill_starters(rules, &positions)
}

pub fn positions_fill_starters(rules: &LeagueRules, positions: &[Position]) -> bool {
    max_starters_matched(rules, positions) == rules.total_starters() as usize
}
