//! Model-agnostic feature importance, tiered importance combination,
//! cross-model ensemble weights and diversity notation.

mod diversity;
mod ensemble;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TradeError};
use crate::valuation::FeatureVector;

pub use diversity::{
    avg_rank_diff, diversity_report, importance_variance, max_rank_diff, normalize_importances, rank_diff_pct,
    tier_boost, DiversityRow, DiversityTriple,
};
pub use ensemble::{ensemble_weights, ModelDiversity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Good,
    Bad,
}

impl Label {
    pub fn is_good(self) -> bool {
        self == Label::Good
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub rows: Vec<FeatureVector>,
    pub labels: Vec<Label>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<FeatureVector>, labels: Vec<Label>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(TradeError::DimensionMismatch(rows.len(), labels.len()));
        }
        Ok(Self { rows, labels })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Generator stream for one feature: mixes the caller's seed with the
/// feature name so per-feature computations are independent and reproducible.
fn feature_rng(seed: u64, feature: &str) -> ChaCha8Rng {
    // FNV-1a keeps the stream stable across platforms and releases.
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in feature.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ hash)
}

/// Mean drop in `score_fn` when the `feature` column is shuffled, over `repeats` shuffles.
pub fn permutation_importance<F>(score_fn: F, data: &LabeledDataset, feature: &str, repeats: usize, seed: u64) -> Result<f64>
where
    F: Fn(&LabeledDataset) -> f64,
{
    if data.len() < 2 {
        return Err(TradeError::TooFew {
            what: "dataset rows",
            needed: 2,
            got: data.len(),
        });
    }
    if repeats == 0 {
        return Err(TradeError::TooFew {
            what: "shuffle repeats",
            needed: 1,
            got: 0,
        });
    }
    let column = data
        .rows
        .iter()
        .map(|row| row.get(feature).ok_or_else(|| TradeError::MissingFeature(feature.to_string())))
        .collect::<Result<Vec<f64>>>()?;

    let baseline = score_fn(data);
    let mut rng = feature_rng(seed, feature);
    let mut shuffled = data.clone();
    let mut column_perm = column;
    let mut total_drop = 0.0;
    for _ in 0..repeats {
        column_perm.shuffle(&mut rng);
        for (row, &value) in shuffled.rows.iter_mut().zip(&column_perm) {
            row.set(feature, value);
        }
        // Summing drops rather than scores keeps an unchanged score at exactly zero.
        total_drop += baseline - score_fn(&shuffled);
    }
    Ok(total_drop / repeats as f64)
}
