//! Expert-rule valuation: boom/bust ratios, projection valuation, tiered
//! scores, state penalties, positional equivalence and early-season momentum.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{PlayerRecord, PlayerStatus, Position};
use crate::error::{Result, TradeError};
use crate::scalar::Scalar;

const BOOM_PERCENTILE: f64 = 85.0;
const BUST_PERCENTILE: f64 = 15.0;
/// Week at which last season's scoring stops contributing.
pub const MOMENTUM_WEEKS: u32 = 6;

/// Percentile rank of `value` in `pool`: share of pool scores strictly below it, in percent.
pub fn percentile_rank<T: Scalar>(value: T, pool: &[T]) -> Result<T> {
    if pool.is_empty() {
        return Err(TradeError::EmptyPool);
    }
    let below = pool.iter().filter(|&&s| s < value).count();
    Ok(T::lit(100.0) * T::from_count(below) / T::from_count(pool.len()))
}

fn share_of_games<T: Scalar>(log: &[T], pool: &[T], hit: impl Fn(T) -> bool) -> Result<T> {
    if pool.is_empty() {
        return Err(TradeError::EmptyPool);
    }
    if log.is_empty() {
        return Ok(T::zero());
    }
    let mut hits = 0;
    for &game in log {
        if hit(percentile_rank(game, pool)?) {
            hits += 1;
        }
    }
    Ok(T::from_count(hits) / T::from_count(log.len()))
}

/// Fraction of games at or above the 85th percentile of the positional pool.
/// A player with no games has no boom evidence and scores 0.
pub fn boom_ratio<T: Scalar>(log: &[T], pool: &[T]) -> Result<T> {
    share_of_games(log, pool, |pr| pr >= T::lit(BOOM_PERCENTILE))
}

/// Fraction of games at or below the 15th percentile of the positional pool.
pub fn bust_ratio<T: Scalar>(log: &[T], pool: &[T]) -> Result<T> {
    share_of_games(log, pool, |pr| pr <= T::lit(BUST_PERCENTILE))
}

/// Normal CDF of a season projection against the positional mean and spread.
pub fn projection_valuation<T: Scalar>(x_pts: T, mu_pts: T, sigma_pts: T) -> Result<T> {
    if !(sigma_pts > T::zero()) {
        return Err(TradeError::NonPositiveSigma(sigma_pts.to_f64().unwrap_or(f64::NAN)));
    }
    let z = (x_pts - mu_pts) / sigma_pts;
    Ok(T::lit(0.5) * (-z / T::SQRT_2()).erfc())
}

/// Converts an ordinal rank (1 = best of `pool_size`) to a score in (0, 1].
pub fn rank_score<T: Scalar>(rank: usize, pool_size: usize) -> T {
    if pool_size == 0 {
        return T::zero();
    }
    let rank = rank.clamp(1, pool_size);
    T::from_count(pool_size - rank + 1) / T::from_count(pool_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierScores<T> {
    pub tier1: T,
    pub tier2: T,
    pub tier3: T,
    pub tier4: T,
}

/// Multipliers applied to players who are not fully available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StatusPenalties(pub BTreeMap<PlayerStatus, f64>);

impl StatusPenalties {
    /// Multiplier for `status`; statuses without an entry are not penalized.
    pub fn multiplier(&self, status: PlayerStatus) -> f64 {
        self.0.get(&status).copied().unwrap_or(1.0)
    }
}

impl Default for StatusPenalties {
    fn default() -> Self {
        use PlayerStatus::*;
        Self(BTreeMap::from([
            (Probable, 0.95),
            (Questionable, 0.8),
            (Doubtful, 0.6),
            (CovidList, 0.5),
            (Suspended, 0.4),
            (Out, 0.3),
            (InjuredReserve, 0.2),
        ]))
    }
}

/// One row of a positional equivalence table: positional ranks
/// `rank_from..=rank_to` at `position` get `multiplier`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceEntry {
    pub position: Position,
    pub rank_from: u32,
    pub rank_to: u32,
    pub multiplier: f64,
}

fn equivalence_lookup(table: &[EquivalenceEntry], position: Position, rank: u32) -> f64 {
    table
        .iter()
        .find(|e| e.position == position && (e.rank_from..=e.rank_to).contains(&rank))
        .map(|e| e.multiplier)
        .unwrap_or(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmeWeights {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub decay_divisor: f64,
    pub status_penalties: StatusPenalties,
    pub equivalence_boost: Vec<EquivalenceEntry>,
    pub equivalence_expert: Vec<EquivalenceEntry>,
}

impl Default for SmeWeights {
    fn default() -> Self {
        Self {
            alpha1: 0.4,
            alpha2: 0.3,
            alpha3: 0.2,
            decay_divisor: 3.0,
            status_penalties: StatusPenalties::default(),
            equivalence_boost: Vec::new(),
            equivalence_expert: Vec::new(),
        }
    }
}

impl SmeWeights {
    /// Brand (tier 4) weight at `week`: e^(-week / decay_divisor).
    pub fn brand_decay<T: Scalar>(&self, week: u32) -> T {
        (-T::from_u32(week).unwrap() / T::lit(self.decay_divisor)).exp()
    }
}

/// Weighted tier combination with a decaying brand term.
pub fn sme_raw_valuation<T: Scalar>(tiers: &TierScores<T>, week: u32, weights: &SmeWeights) -> T {
    T::lit(weights.alpha1) * tiers.tier1
        + T::lit(weights.alpha2) * tiers.tier2
        + T::lit(weights.alpha3) * tiers.tier3
        + weights.brand_decay::<T>(week) * tiers.tier4
}

/// Applies the status penalty and both positional equivalence multipliers.
pub fn apply_state_and_equivalence<T: Scalar>(
    raw: T,
    player: &PlayerRecord,
    positional_rank: u32,
    weights: &SmeWeights,
) -> T {
    let status = weights.status_penalties.multiplier(player.status);
    let boost = equivalence_lookup(&weights.equivalence_boost, player.position, positional_rank);
    let expert = equivalence_lookup(&weights.equivalence_expert, player.position, positional_rank);
    raw * T::lit(status) * T::lit(boost) * T::lit(expert)
}

/// Blends in last season's points per game, fading out linearly by week 6.
pub fn momentum_blend<T: Scalar>(v_norm: T, avg_points_prev: T, week: u32) -> T {
    if week <= MOMENTUM_WEEKS {
        let w = T::from_u32(week).unwrap();
        let remaining = T::from_u32(MOMENTUM_WEEKS - week).unwrap();
        w * v_norm + remaining * avg_points_prev
    } else {
        T::from_u32(MOMENTUM_WEEKS).unwrap() * v_norm
    }
}
