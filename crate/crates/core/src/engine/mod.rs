//! Trade generation: pairings, knapsack packages, insights and filters.

mod knapsack;
mod package;
mod personalize;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::domain::League;
use crate::error::Result;
use crate::insights::{compute_insights, filter_trades, FilterConfig, LogisticUpside, Rejection, UpsideScorer};
use crate::pairing::{rank_pairings, team_vector, Pairing, TeamVector};
use crate::sheet::ValuationSheet;

pub use knapsack::{integer_scale, knapsack_01, KnapsackItem, Selection};
pub use package::{build_trade, fingerprint, BuildOptions, ModeView, MovedPlayer, TradeContext, TradePackage};
pub use personalize::{apply_personalization, ItemPool, PersonalizationRequest, PersonalizationWeights, PoolSide};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Most dissimilar opponents tried per mode.
    pub top_pairings: usize,
    /// Multipliers applied to the requested risk.
    pub risk_levels: Vec<f64>,
    pub max_items_per_side: usize,
    pub max_results: usize,
    pub personalization: PersonalizationWeights,
    pub filters: FilterConfig,
    pub upside: LogisticUpside,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            top_pairings: 3,
            risk_levels: vec![1.0, 0.75, 0.5],
            max_items_per_side: 3,
            max_results: 10,
            personalization: PersonalizationWeights::default(),
            filters: FilterConfig::default(),
            upside: LogisticUpside::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TradeOutcome {
    /// Best surviving trades, highest upside first.
    pub trades: Vec<TradePackage>,
    pub rejections: Vec<Rejection>,
    /// Distinct packages built before filtering.
    pub candidates: usize,
}

/// Team vectors for every team under one mode.
pub fn team_vectors(ctx: &TradeContext<'_>, view: &ModeView<'_>) -> Result<BTreeMap<String, TeamVector<f64>>> {
    ctx.team_ids()
        .map(|&id| {
            let roster = ctx.roster(id)?;
            let v = team_vector(roster, &ctx.league.rules, |p| view.fraction(&p.player_id), |p| ctx.rank_score(p));
            Ok((id.to_string(), v))
        })
        .collect()
}

/// Opponents ranked by dissimilarity to `team` under one mode.
pub fn pairings_for(ctx: &TradeContext<'_>, view: &ModeView<'_>, team: &str) -> Result<Vec<Pairing<f64>>> {
    rank_pairings(team, &team_vectors(ctx, view)?)
}

/// Builds, scores and filters trades for `team` across every sheet.
pub fn generate_trades(
    league: &League,
    team: &str,
    request: &PersonalizationRequest,
    sheets: &[ValuationSheet],
    config: &EngineConfig,
) -> Result<TradeOutcome> {
    generate_trades_with(league, team, request, sheets, config, &config.upside)
}

/// As [`generate_trades`] with a caller-supplied upside scorer.
pub fn generate_trades_with(
    league: &League,
    team: &str,
    request: &PersonalizationRequest,
    sheets: &[ValuationSheet],
    config: &EngineConfig,
    scorer: &dyn UpsideScorer,
) -> Result<TradeOutcome> {
    request.validate(league, team)?;
    let ctx = TradeContext::new(league)?;
    let mut sheets: Vec<&ValuationSheet> = sheets.iter().collect();
    sheets.sort_by_key(|s| s.compute_mode);

    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for sheet in sheets {
        let view = ModeView::new(sheet);
        for pairing in pairings_for(&ctx, &view, team)?.into_iter().take(config.top_pairings) {
            for &level in &config.risk_levels {
                let opts = BuildOptions {
                    risk: request.risk * level,
                    max_items: config.max_items_per_side,
                    pairing_angle: pairing.angle,
                    weights: &config.personalization,
                };
                let Some(mut trade) = build_trade(&ctx, &view, team, &pairing.team_id, request, opts)? else {
                    continue;
                };
                if !seen.insert(trade.fingerprint.clone()) {
                    continue;
                }
                trade.insights = Some(compute_insights(&trade, scorer)?);
                candidates.push(trade);
            }
        }
    }

    let total = candidates.len();
    let mut out = filter_trades(candidates, league, request, &config.filters);
    out.survivors.sort_by(|a, b| {
        let up = |t: &TradePackage| t.insights.map_or(0.0, |m| m.upside);
        up(b).total_cmp(&up(a)).then_with(|| a.fingerprint.cmp(&b.fingerprint))
    });
    out.survivors.truncate(config.max_results);
    Ok(TradeOutcome {
        trades: out.survivors,
        rejections: out.rejections,
        candidates: total,
    })
}
