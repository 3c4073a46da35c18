//! Rule filters and thresholds applied to scored trades.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{starters_fillable, League, PlayerRecord, Position};
use crate::engine::{PersonalizationRequest, TradePackage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    /// Both post-trade rosters can fill every starter slot.
    R1,
    /// Nobody trades away their only player at a position.
    R2,
    /// No 1-for-1 same-position QB swap.
    R3,
    /// Without personalization only 1-1 and 2-2 shapes.
    R4,
    /// Best player given and received are close in value.
    R5,
    /// K and DST only move alongside another player.
    R6,
    /// No side carries three players of one position.
    R7,
    /// At most three players per side.
    R8,
    /// Without personalization no pure positional swaps.
    R9,
    /// Parity threshold.
    T1,
    /// Pain threshold, both sides.
    T2,
    /// Player-count difference threshold.
    T3,
    /// Upside threshold.
    T4,
}

impl RuleId {
    pub const ALL: [RuleId; 13] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::T1,
        RuleId::T2,
        RuleId::T3,
        RuleId::T4,
    ];
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub max_parity: f64,
    pub max_pain: f64,
    pub max_count_diff: usize,
    pub min_upside: f64,
    /// Largest allowed gap between the best market values given and received.
    pub best_player_gap: u32,
    /// Extend R3 from QB to every position.
    pub same_position_swaps_any: bool,
    pub disabled: BTreeSet<RuleId>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            max_parity: 0.35,
            max_pain: 1.5,
            max_count_diff: 1,
            min_upside: 0.5,
            best_player_gap: 25,
            same_position_swaps_any: false,
            disabled: BTreeSet::new(),
        }
    }
}

impl FilterConfig {
    pub fn enabled(&self, rule: RuleId) -> bool {
        !self.disabled.contains(&rule)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub fingerprint: String,
    pub rule: RuleId,
    pub metrics: String,
}

impl Rejection {
    /// `fingerprint<TAB>rule<TAB>metrics`
    pub fn log_line(&self) -> String {
        format!("{}\t{}\t{}", self.fingerprint, self.rule, self.metrics)
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.log_line())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterOutcome {
    pub survivors: Vec<TradePackage>,
    pub rejections: Vec<Rejection>,
}

fn metrics_text(trade: &TradePackage) -> String {
    match &trade.insights {
        Some(m) => format!(
            "parity={:.6} impact_a={:.6} impact_b={:.6} pain_a={:.6} pain_b={:.6} upside={:.6}",
            m.parity, m.impact_a, m.impact_b, m.pain_a, m.pain_b, m.upside
        ),
        None => "insights=none".to_string(),
    }
}

fn position_counts<'a>(ids: impl IntoIterator<Item = &'a String>, league: &League) -> BTreeMap<Position, usize> {
    let table = league.player_table();
    let mut counts = BTreeMap::new();
    for id in ids {
        if let Some(p) = table.get(id) {
            *counts.entry(p.position).or_insert(0) += 1;
        }
    }
    counts
}

fn post_trade_roster<'a>(league: &'a League, team: &str, out: &[String], incoming: &[String]) -> Option<Vec<&'a PlayerRecord>> {
    let table = league.player_table();
    let team = league.team(team)?;
    team.roster
        .iter()
        .filter(|id| !out.contains(id))
        .chain(incoming)
        .map(|id| table.get(id))
        .collect()
}

fn best_market(trade: &TradePackage, to: &str) -> u32 {
    trade.moves_to(to).map(|m| m.market_value).max().unwrap_or(0)
}

/// First enabled rule the trade violates, or `None` if it survives.
pub fn check_trade(trade: &TradePackage, league: &League, request: &PersonalizationRequest, config: &FilterConfig) -> Option<RuleId> {
    let (a, b) = (trade.team_a.as_str(), trade.team_b.as_str());
    let (a_in, b_in) = (&trade.a_receives, &trade.b_receives);
    let personalized = request.is_personalized();
    let on = |r| config.enabled(r);
    let a_pos = position_counts(a_in, league);
    let b_pos = position_counts(b_in, league);

    if on(RuleId::R1) {
        let ok = [(a, b_in, a_in), (b, a_in, b_in)].iter().all(|&(team, out, incoming)| {
            post_trade_roster(league, team, out, incoming).is_some_and(|r| starters_fillable(&league.rules, &r))
        });
        if !ok {
            return Some(RuleId::R1);
        }
    }
    if on(RuleId::R2) {
        // Each side's outgoing players are what the other side receives.
        for (team, out) in [(a, &b_pos), (b, &a_pos)] {
            let roster = league.team(team).map(|t| position_counts(&t.roster, league)).unwrap_or_default();
            if out.iter().any(|(pos, &n)| roster.get(pos).copied().unwrap_or(0) <= n) {
                return Some(RuleId::R2);
            }
        }
    }
    if on(RuleId::R3) && a_in.len() == 1 && b_in.len() == 1 {
        let same = a_pos.keys().next() == b_pos.keys().next();
        let pos = a_pos.keys().next().copied();
        if same && (pos == Some(Position::QB) || config.same_position_swaps_any) {
            return Some(RuleId::R3);
        }
    }
    if on(RuleId::R4) && !personalized {
        let shape = (a_in.len(), b_in.len());
        if shape != (1, 1) && shape != (2, 2) {
            return Some(RuleId::R4);
        }
    }
    if on(RuleId::R5) && best_market(trade, a).abs_diff(best_market(trade, b)) > config.best_player_gap {
        return Some(RuleId::R5);
    }
    if on(RuleId::R6) {
        for side in [&a_pos, &b_pos] {
            let total: usize = side.values().sum();
            if side.keys().any(|p| p.is_special_teams()) && total < 2 {
                return Some(RuleId::R6);
            }
        }
    }
    if on(RuleId::R7) && a_pos.values().chain(b_pos.values()).any(|&n| n >= 3) {
        return Some(RuleId::R7);
    }
    if on(RuleId::R8) && (a_in.len() > 3 || b_in.len() > 3) {
        return Some(RuleId::R8);
    }
    if on(RuleId::R9) && !personalized && a_pos == b_pos {
        return Some(RuleId::R9);
    }

    let m = trade.insights.as_ref();
    if on(RuleId::T1) && !m.is_some_and(|m| m.parity <= config.max_parity) {
        return Some(RuleId::T1);
    }
    if on(RuleId::T2) && !m.is_some_and(|m| m.pain_a <= config.max_pain && m.pain_b <= config.max_pain) {
        return Some(RuleId::T2);
    }
    if on(RuleId::T3) && a_in.len().abs_diff(b_in.len()) > config.max_count_diff {
        return Some(RuleId::T3);
    }
    if on(RuleId::T4) && !m.is_some_and(|m| m.upside >= config.min_upside) {
        return Some(RuleId::T4);
    }
    None
}

/// Splits trades into survivors and rejections, keeping input order.
pub fn filter_trades(
    trades: Vec<TradePackage>,
    league: &League,
    request: &PersonalizationRequest,
    config: &FilterConfig,
) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    for trade in trades {
        match check_trade(&trade, league, request, config) {
            None => out.survivors.push(trade),
            Some(rule) => out.rejections.push(Rejection {
                fingerprint: trade.fingerprint.clone(),
                rule,
                metrics: metrics_text(&trade),
            }),
        }
    }
    out
}
