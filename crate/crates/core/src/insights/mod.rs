//! Trade metrics (parity, impact, pain, upside) and the rule filters.

mod filters;
mod upside;

use serde::{Deserialize, Serialize};

use crate::engine::TradePackage;
use crate::error::{Result, TradeError};

pub use filters::{check_trade, filter_trades, FilterConfig, FilterOutcome, Rejection, RuleId};
pub use upside::{logistic, LogisticUpside, UpsideFeatures, UpsideScorer, UpsideWeights};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeInsights {
    pub parity: f64,
    pub impact_a: f64,
    pub impact_b: f64,
    pub pain_a: f64,
    pub pain_b: f64,
    pub upside: f64,
}

/// Fairness gap: half the difference in normalized incoming value plus half
/// the difference in outgoing cost fractions.
pub fn parity(trade: &TradePackage) -> Result<f64> {
    let value_share = |team: &str| -> Result<f64> {
        let max = trade.max_value(team);
        if max == 0 {
            return Err(TradeError::ZeroDenominator("max roster value"));
        }
        let incoming: u32 = trade.moves_to(team).map(|m| m.market_value).sum();
        Ok(f64::from(incoming) / f64::from(max))
    };
    let cost_share = |team: &str| trade.moves_from(team).map(|m| f64::from(m.cost) / 100.0).sum::<f64>();
    let (a, b) = (trade.team_a.as_str(), trade.team_b.as_str());
    Ok(0.5 * (value_share(a)? - value_share(b)?).abs() + 0.5 * (cost_share(a) - cost_share(b)).abs())
}

/// Incoming integer value over outgoing integer cost for `team`.
pub fn impact(trade: &TradePackage, team: &str) -> Result<f64> {
    let incoming: u32 = trade.moves_to(team).map(|m| m.value).sum();
    let outgoing: u32 = trade.moves_from(team).map(|m| m.cost).sum();
    if outgoing == 0 {
        return Err(TradeError::ZeroDenominator("outgoing cost"));
    }
    Ok(f64::from(incoming) / f64::from(outgoing))
}

/// Outgoing cost over outgoing normalized market value for `team`.
pub fn pain(trade: &TradePackage, team: &str) -> Result<f64> {
    let max = f64::from(trade.max_value(team));
    let (cost, value) = trade
        .moves_from(team)
        .fold((0.0, 0.0), |(c, v), m| (c + f64::from(m.cost) / 100.0, v + f64::from(m.market_value) / max));
    if !(value > 0.0) {
        return Err(TradeError::ZeroDenominator("outgoing value"));
    }
    Ok(cost / value)
}

/// Computes every metric and scores upside.
pub fn compute_insights(trade: &TradePackage, scorer: &dyn UpsideScorer) -> Result<TradeInsights> {
    let (a, b) = (trade.team_a.as_str(), trade.team_b.as_str());
    let mut out = TradeInsights {
        parity: parity(trade)?,
        impact_a: impact(trade, a)?,
        impact_b: impact(trade, b)?,
        pain_a: pain(trade, a)?,
        pain_b: pain(trade, b)?,
        upside: 0.0,
    };
    out.upside = scorer.score(&UpsideFeatures::from_metrics(&out, trade.pairing_angle));
    Ok(out)
}
