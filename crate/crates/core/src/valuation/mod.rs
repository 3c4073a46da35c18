//! Broad player valuations per compute mode, normalized to the daily
//! expert-rule range, and their league-specific roster adjustments.

mod features;
mod model;
mod roster;
mod sme;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub use features::{FeatureRegistry, PoolContext};
pub use model::{model_raw_score, model_valuation, FeatureVector, ModelImportanceProfile};
pub use roster::{depth_decay, roster_adjustments, slot_need};
pub use sme::{
    apply_state_and_equivalence, boom_ratio, bust_ratio, momentum_blend, percentile_rank, projection_valuation,
    rank_score, sme_raw_valuation, EquivalenceEntry, SmeWeights, StatusPenalties, TierScores, MOMENTUM_WEEKS,
};

/// Provenance of a valuation sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputeMode {
    Sme,
    Classical,
    Quantum,
}

impl ComputeMode {
    pub const ALL: [ComputeMode; 3] = [ComputeMode::Sme, ComputeMode::Classical, ComputeMode::Quantum];

    pub fn as_str(self) -> &'static str {
        match self {
            ComputeMode::Sme => "sme",
            ComputeMode::Classical => "classical",
            ComputeMode::Quantum => "quantum",
        }
    }
}

impl fmt::Display for ComputeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ComputeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sme" => Ok(ComputeMode::Sme),
            "classical" => Ok(ComputeMode::Classical),
            "quantum" => Ok(ComputeMode::Quantum),
            other => Err(format!("unknown compute mode `{other}`")),
        }
    }
}

/// The expert-rule range for the day and a mode's own raw range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValuationRange<T> {
    pub sme_low: T,
    pub sme_high: T,
    pub mode_low: T,
    pub mode_high: T,
}

impl<T: Scalar> ValuationRange<T> {
    /// Range whose mode bounds are the min and max of `raw`.
    pub fn spanning(sme_low: T, sme_high: T, raw: impl IntoIterator<Item = T>) -> Option<Self> {
        let mut iter = raw.into_iter();
        let first = iter.next()?;
        let (lo, hi) = iter.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
        Some(Self {
            sme_low,
            sme_high,
            mode_low: lo,
            mode_high: hi,
        })
    }
}

/// Linear map from the mode range onto the expert-rule range.
///
/// Inputs outside `[mode_low, mode_high]` are clamped first. A degenerate
/// mode range maps everything to the middle of the expert range.
pub fn normalize_to_sme_range<T: Scalar>(x: T, range: &ValuationRange<T>) -> T {
    if range.mode_high == range.mode_low {
        return (range.sme_low + range.sme_high) / T::lit(2.0);
    }
    let x = x.max(range.mode_low).min(range.mode_high);
    range.sme_low + (range.sme_high - range.sme_low) / (range.mode_high - range.mode_low) * (x - range.mode_low)
}
