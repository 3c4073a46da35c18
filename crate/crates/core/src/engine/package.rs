//! Trade packages: two knapsack runs with the teams' roles swapped.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::knapsack::{integer_scale, knapsack_01, KnapsackItem};
use super::personalize::{apply_personalization, ItemPool, PersonalizationRequest, PersonalizationWeights, PoolSide};
use crate::cost::team_costs;
use crate::domain::{positional_ranks, League, PlayerRecord, PlayerTable, Position};
use crate::error::{Result, TradeError};
use crate::insights::TradeInsights;
use crate::sheet::ValuationSheet;
use crate::valuation::{rank_score, roster_adjustments, ComputeMode};

/// One player changing teams, with the integer metrics the insights use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovedPlayer {
    pub player_id: String,
    pub position: Position,
    pub from_team: String,
    pub to_team: String,
    /// Value to the receiving team (roster-adjusted, 1..=100).
    pub value: u32,
    /// Release cost to the sending team (1..=100).
    pub cost: u32,
    /// Broad market value before roster adjustment (1..=100).
    pub market_value: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradePackage {
    pub fingerprint: String,
    /// The requesting team.
    pub team_a: String,
    pub team_b: String,
    pub a_receives: Vec<String>,
    pub b_receives: Vec<String>,
    pub compute_mode: ComputeMode,
    pub pairing_angle: f64,
    pub risk: f64,
    pub moves: Vec<MovedPlayer>,
    /// Largest market value on each team's pre-trade roster.
    pub max_value_a: u32,
    pub max_value_b: u32,
    #[serde(default)]
    pub insights: Option<TradeInsights>,
}

/// Canonical identity of a trade: every moving player id, sorted.
pub fn fingerprint<'a>(player_ids: impl IntoIterator<Item = &'a str>) -> String {
    let mut ids: Vec<&str> = player_ids.into_iter().collect();
    ids.sort_unstable();
    ids.join("+")
}

impl TradePackage {
    pub fn moves_to<'a>(&'a self, team: &'a str) -> impl Iterator<Item = &'a MovedPlayer> + 'a {
        self.moves.iter().filter(move |m| m.to_team == team)
    }

    pub fn moves_from<'a>(&'a self, team: &'a str) -> impl Iterator<Item = &'a MovedPlayer> + 'a {
        self.moves.iter().filter(move |m| m.from_team == team)
    }

    pub fn max_value(&self, team: &str) -> u32 {
        if team == self.team_a {
            self.max_value_a
        } else {
            self.max_value_b
        }
    }
}

/// Mode-independent league state shared by every trade of one request.
#[derive(Debug)]
pub struct TradeContext<'a> {
    pub league: &'a League,
    pub table: PlayerTable<'a>,
    rosters: BTreeMap<&'a str, Vec<&'a PlayerRecord>>,
    costs: HashMap<String, u32>,
    ranks: HashMap<String, u32>,
    position_sizes: HashMap<Position, usize>,
}

impl<'a> TradeContext<'a> {
    pub fn new(league: &'a League) -> Result<Self> {
        let table = league.player_table();
        let ranks = positional_ranks(&league.players);
        let mut rosters = BTreeMap::new();
        let mut costs = HashMap::new();
        for team in &league.teams {
            let roster = table.roster(team);
            if roster.is_empty() {
                return Err(TradeError::EmptyInput("team roster"));
            }
            for (pid, c) in team_costs(&roster, &league.rules, &ranks)? {
                costs.insert(pid, integer_scale(c.norm_pcost));
            }
            rosters.insert(team.team_id.as_str(), roster);
        }
        let mut position_sizes = HashMap::new();
        for p in &league.players {
            *position_sizes.entry(p.position).or_insert(0) += 1;
        }
        Ok(Self { league, table, rosters, costs, ranks, position_sizes })
    }

    pub fn roster(&self, team_id: &str) -> Result<&[&'a PlayerRecord]> {
        self.rosters
            .get(team_id)
            .map(Vec::as_slice)
            .ok_or_else(|| TradeError::UnknownTeam(team_id.to_string()))
    }

    pub fn team_ids(&self) -> impl Iterator<Item = &&'a str> {
        self.rosters.keys()
    }

    /// Integer-scaled release cost of a rostered player.
    pub fn cost(&self, player_id: &str) -> u32 {
        self.costs.get(player_id).copied().unwrap_or(1)
    }

    /// Inverted normalized league-wide positional rank.
    pub fn rank_score(&self, player: &PlayerRecord) -> f64 {
        let size = self.position_sizes.get(&player.position).copied().unwrap_or(0);
        let rank = self.ranks.get(&player.player_id).copied().unwrap_or(size as u32);
        rank_score(rank as usize, size)
    }
}

/// One compute mode's valuations rescaled to (0, 1] by the sheet's SME high.
#[derive(Debug)]
pub struct ModeView<'s> {
    pub sheet: &'s ValuationSheet,
    valuations: HashMap<&'s str, f64>,
    floor: f64,
}

impl<'s> ModeView<'s> {
    pub fn new(sheet: &'s ValuationSheet) -> Self {
        Self {
            valuations: sheet.valuation_map(),
            floor: sheet.floor_valuation(),
            sheet,
        }
    }

    pub fn mode(&self) -> ComputeMode {
        self.sheet.compute_mode
    }

    pub fn valuation(&self, player_id: &str) -> f64 {
        self.valuations.get(player_id).copied().unwrap_or(self.floor)
    }

    /// Valuation as a fraction of the sheet's top of range.
    pub fn fraction(&self, player_id: &str) -> f64 {
        if self.sheet.sme_high > 0.0 {
            self.valuation(player_id) / self.sheet.sme_high
        } else {
            0.0
        }
    }

    pub fn market_value(&self, player_id: &str) -> u32 {
        integer_scale(self.fraction(player_id))
    }
}

/// Knobs for a single pair of knapsack runs.
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions<'w> {
    pub risk: f64,
    pub max_items: usize,
    pub pairing_angle: f64,
    pub weights: &'w PersonalizationWeights,
}

fn candidate_items(ctx: &TradeContext<'_>, view: &ModeView<'_>, sender: &[&PlayerRecord], receiver: &[&PlayerRecord]) -> Vec<KnapsackItem> {
    sender
        .iter()
        .map(|p| {
            let adjusted = roster_adjustments(view.fraction(&p.player_id), p, receiver, &ctx.league.rules);
            KnapsackItem::new(p.player_id.clone(), integer_scale(adjusted), ctx.cost(&p.player_id))
        })
        .collect()
}

/// Knapsack over one pool; capacity is `floor(risk * heaviest release cost)`.
/// Forced players are placed first and consume capacity and cardinality.
fn solve_side(pool: &ItemPool, risk: f64, max_items: usize) -> Vec<KnapsackItem> {
    let heaviest = pool.items.iter().chain(&pool.forced).map(|it| it.weight).max().unwrap_or(0);
    // Slack keeps products such as 0.29 * 100 from flooring one unit low.
    let capacity = (risk * f64::from(heaviest) + 1e-9).floor().max(0.0) as u64;
    let forced_weight: u64 = pool.forced.iter().map(|it| u64::from(it.weight)).sum();
    let selection = knapsack_01(
        &pool.items,
        capacity.saturating_sub(forced_weight),
        max_items.saturating_sub(pool.forced.len()),
    );
    let mut chosen = pool.forced.clone();
    chosen.extend(selection.indices.iter().map(|&i| pool.items[i].clone()));
    chosen.sort_by(|a, b| a.player_id.cmp(&b.player_id));
    chosen
}

/// Builds the trade between `requester` and `opponent` under one mode and risk.
///
/// Returns `Ok(None)` when either side ends up empty or a must-acquire
/// player is not on this opponent's roster.
pub fn build_trade(
    ctx: &TradeContext<'_>,
    view: &ModeView<'_>,
    requester: &str,
    opponent: &str,
    request: &PersonalizationRequest,
    opts: BuildOptions<'_>,
) -> Result<Option<TradePackage>> {
    let own = ctx.roster(requester)?;
    let theirs = ctx.roster(opponent)?;
    if request
        .must_acquire
        .iter()
        .any(|pid| !theirs.iter().any(|p| &p.player_id == pid))
    {
        return Ok(None);
    }

    let acquire = apply_personalization(
        candidate_items(ctx, view, theirs, own),
        PoolSide::Acquire,
        &ctx.table,
        request,
        opts.weights,
    );
    let release = apply_personalization(
        candidate_items(ctx, view, own, theirs),
        PoolSide::Release,
        &ctx.table,
        request,
        opts.weights,
    );
    let a_gets = solve_side(&acquire, opts.risk, opts.max_items);
    let b_gets = solve_side(&release, opts.risk, opts.max_items);
    if a_gets.is_empty() || b_gets.is_empty() {
        return Ok(None);
    }

    let mut moves = Vec::with_capacity(a_gets.len() + b_gets.len());
    for (items, from, to) in [(&a_gets, opponent, requester), (&b_gets, requester, opponent)] {
        for it in items {
            let position = ctx
                .table
                .get(&it.player_id)
                .ok_or_else(|| TradeError::UnknownPlayer(it.player_id.clone()))?
                .position;
            moves.push(MovedPlayer {
                player_id: it.player_id.clone(),
                position,
                from_team: from.to_string(),
                to_team: to.to_string(),
                value: it.value,
                cost: it.weight,
                market_value: view.market_value(&it.player_id),
            });
        }
    }
    let max_market = |roster: &[&PlayerRecord]| roster.iter().map(|p| view.market_value(&p.player_id)).max().unwrap_or(1);

    Ok(Some(TradePackage {
        fingerprint: fingerprint(moves.iter().map(|m| m.player_id.as_str())),
        team_a: requester.to_string(),
        team_b: opponent.to_string(),
        a_receives: a_gets.into_iter().map(|it| it.player_id).collect(),
        b_receives: b_gets.into_iter().map(|it| it.player_id).collect(),
        compute_mode: view.mode(),
        pairing_angle: opts.pairing_angle,
        risk: opts.risk,
        moves,
        max_value_a: max_market(own),
        max_value_b: max_market(theirs),
        insights: None,
    }))
}
