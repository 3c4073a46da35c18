//! Team importance/strength vectors and partner ranking by cosine dissimilarity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{LeagueRules, PlayerRecord, Position};
use crate::error::{Result, TradeError};
use crate::scalar::Scalar;

/// One-hot position code, slot count, eligible players.
const IMPORTANCE_LEN: usize = Position::ALL.len() + 2;
/// Average valuation, average rank score, average/min/max projection, average ownership.
const STRENGTH_LEN: usize = 6;
pub const BLOCK_LEN: usize = IMPORTANCE_LEN + STRENGTH_LEN;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamVector<T>(pub Vec<T>);

impl<T: Scalar> TeamVector<T> {
    pub fn block(&self, position: Position) -> &[T] {
        let start = position.index() * BLOCK_LEN;
        &self.0[start..start + BLOCK_LEN]
    }

    pub fn strength(&self, position: Position) -> &[T] {
        &self.block(position)[IMPORTANCE_LEN..]
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self(self.0.iter().map(|&x| x * factor).collect())
    }
}

/// Concatenated per-position blocks in `Position::ALL` order.
///
/// `valuation` and `rank_score` supply the player's mode valuation and
/// inverted normalized positional rank; both must be nonnegative.
pub fn team_vector(
    roster: &[&PlayerRecord],
    rules: &LeagueRules,
    valuation: impl Fn(&PlayerRecord) -> f64,
    rank_score: impl Fn(&PlayerRecord) -> f64,
) -> TeamVector<f64> {
    let mut out = Vec::with_capacity(BLOCK_LEN * Position::ALL.len());
    for pos in Position::ALL {
        let mut one_hot = [0.0; 6];
        one_hot[pos.index()] = 1.0;
        out.extend_from_slice(&one_hot);

        let competing = rules.competing_positions(pos);
        let eligible = roster.iter().filter(|p| competing.contains(&p.position)).count();
        out.push(f64::from(rules.slots_for(pos)));
        out.push(eligible as f64);

        let group: Vec<&PlayerRecord> = roster.iter().copied().filter(|p| p.position == pos).collect();
        if group.is_empty() {
            out.extend_from_slice(&[0.0; STRENGTH_LEN]);
            continue;
        }
        let n = group.len() as f64;
        let mean = |f: &dyn Fn(&PlayerRecord) -> f64| group.iter().map(|p| f(p)).sum::<f64>() / n;
        let projections = group.iter().map(|p| p.season_projection.max(0.0));
        let min_proj = projections.clone().fold(f64::INFINITY, f64::min);
        let max_proj = projections.fold(0.0, f64::max);
        out.push(mean(&|p| valuation(p).max(0.0)));
        out.push(mean(&|p| rank_score(p).max(0.0)));
        out.push(mean(&|p| p.season_projection.max(0.0)));
        out.push(min_proj);
        out.push(max_proj);
        out.push(mean(&|p| p.percent_owned));
    }
    TeamVector(out)
}

/// Angle between two team vectors in degrees.
pub fn dissimilarity_angle<T: Scalar>(a: &TeamVector<T>, b: &TeamVector<T>) -> Result<T> {
    if a.0.len() != b.0.len() {
        return Err(TradeError::DimensionMismatch(a.0.len(), b.0.len()));
    }
    let norm = |v: &mut dyn Iterator<Item = T>| v.map(|x| x * x).sum::<T>().sqrt();
    let (na, nb) = (norm(&mut a.0.iter().copied()), norm(&mut b.0.iter().copied()));
    if na == T::zero() || nb == T::zero() {
        return Err(TradeError::ZeroVector);
    }
    // Half-angle form stays accurate near 0 and 180 degrees, unlike acos.
    let diff = norm(&mut a.0.iter().zip(&b.0).map(|(&x, &y)| x / na - y / nb));
    let sum = norm(&mut a.0.iter().zip(&b.0).map(|(&x, &y)| x / na + y / nb));
    Ok((T::lit(2.0) * diff.atan2(sum)).to_degrees())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pairing<T> {
    pub team_id: String,
    pub angle: T,
}

/// Opponents of `requesting_team`, most dissimilar first; ties by team id.
pub fn rank_pairings<T: Scalar>(requesting_team: &str, vectors: &BTreeMap<String, TeamVector<T>>) -> Result<Vec<Pairing<T>>> {
    let own = vectors
        .get(requesting_team)
        .ok_or_else(|| TradeError::UnknownTeam(requesting_team.to_string()))?;
    let mut pairings = vectors
        .iter()
        .filter(|(id, _)| id.as_str() != requesting_team)
        .map(|(id, v)| {
            Ok(Pairing {
                team_id: id.clone(),
                angle: dissimilarity_angle(own, v)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    pairings.sort_by(|a, b| {
        b.angle
            .partial_cmp(&a.angle)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.team_id.cmp(&b.team_id))
    });
    Ok(pairings)
}
