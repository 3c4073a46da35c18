use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TradeError};
use crate::scalar::Scalar;
use crate::valuation::{ComputeMode, ModelImportanceProfile};

/// Boosts an importance by the accuracy of the tiered model that produced it.
pub fn tier_boost<T: Scalar>(importance: T, tier_accuracy: T) -> T {
    let half = T::lit(0.5);
    half * (tier_accuracy * importance).exp() + half * tier_accuracy.tan() * importance + importance
}

/// Divides each boosted importance by their total.
pub fn normalize_importances<T: Scalar>(firs: &[T]) -> Result<Vec<T>> {
    let total: T = firs.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(TradeError::ZeroImportanceSum);
    }
    Ok(firs.iter().map(|&f| f / total).collect())
}

/// Largest total displacement any permutation of `n` items can have.
pub fn max_rank_diff(n: usize) -> usize {
    n * n / 2
}

/// Total rank displacement between two orderings of one feature set, as a
/// fraction of the largest possible displacement.
pub fn rank_diff_pct<T: Scalar, S: AsRef<str>>(ranks_a: &[S], ranks_b: &[S]) -> Result<T> {
    if ranks_a.len() != ranks_b.len() {
        return Err(TradeError::MismatchedRankings);
    }
    let position_b: HashMap<&str, usize> = ranks_b.iter().enumerate().map(|(i, f)| (f.as_ref(), i)).collect();
    if position_b.len() != ranks_b.len() {
        return Err(TradeError::MismatchedRankings);
    }
    let mut seen = std::collections::HashSet::with_capacity(ranks_a.len());
    let mut displacement = 0usize;
    for (i, feature) in ranks_a.iter().enumerate() {
        let feature = feature.as_ref();
        if !seen.insert(feature) {
            return Err(TradeError::MismatchedRankings);
        }
        let j = *position_b.get(feature).ok_or(TradeError::MismatchedRankings)?;
        displacement += i.abs_diff(j);
    }
    let max = max_rank_diff(ranks_a.len());
    if max == 0 {
        return Ok(T::zero());
    }
    Ok(T::from_count(displacement) / T::from_count(max))
}

pub fn avg_rank_diff<T: Scalar>(vs_classical: T, vs_sme: T) -> T {
    (vs_classical + vs_sme) / T::lit(2.0)
}

/// Population variance.
pub fn importance_variance<T: Scalar>(importances: &[T]) -> Result<T> {
    if importances.is_empty() {
        return Err(TradeError::EmptyInput("importances"));
    }
    let n = T::from_count(importances.len());
    let mean = importances.iter().copied().sum::<T>() / n;
    Ok(importances.iter().map(|&p| (p - mean) * (p - mean)).sum::<T>() / n)
}

/// Accuracy, average rank difference and importance variance of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityTriple<T> {
    pub accuracy: T,
    pub avg_rank_diff: T,
    pub importance_variance: T,
}

impl<T: Scalar> DiversityTriple<T> {
    pub fn new(accuracy: T, avg_rank_diff: T, importance_variance: T) -> Self {
        Self { accuracy, avg_rank_diff, importance_variance }
    }
}

impl<T: Scalar> fmt::Display for DiversityTriple<T> {
    /// `accuracy%@rank_diff%@variance`, e.g. `95.70%@67.00%@0.002`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |v: T| v.to_f64().unwrap_or(f64::NAN) * 100.0;
        write!(
            f,
            "{:.2}%@{:.2}%@{:.3}",
            pct(self.accuracy),
            pct(self.avg_rank_diff),
            self.importance_variance.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// One row of the diversity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityRow {
    pub model_id: String,
    pub compute_mode: ComputeMode,
    pub accuracy: f64,
    pub avg_rank_diff: f64,
    pub variance: f64,
    pub rendered_triple: String,
}

impl DiversityRow {
    pub fn triple(&self) -> DiversityTriple<f64> {
        DiversityTriple::new(self.accuracy, self.avg_rank_diff, self.variance)
    }
}

/// Diversity of every profile relative to the other compute modes.
///
/// Each model is compared against the most accurate profile of every other
/// mode present; its rank difference is the mean over those comparisons.
pub fn diversity_report(profiles: &[ModelImportanceProfile]) -> Result<Vec<DiversityRow>> {
    let mut reference: BTreeMap<ComputeMode, &ModelImportanceProfile> = BTreeMap::new();
    for p in profiles {
        p.validate()?;
        let slot = reference.entry(p.compute_mode).or_insert(p);
        if p.accuracy > slot.accuracy {
            *slot = p;
        }
    }

    profiles
        .iter()
        .map(|p| {
            let diffs = reference
                .iter()
                .filter(|(mode, _)| **mode != p.compute_mode)
                .map(|(_, other)| rank_diff_pct::<f64, _>(&p.rank_order, &other.rank_order))
                .collect::<Result<Vec<f64>>>()?;
            let avg = if diffs.is_empty() {
                0.0
            } else {
                diffs.iter().sum::<f64>() / diffs.len() as f64
            };
            let variance = importance_variance(&p.importance_vector()).unwrap_or(0.0);
            let triple = DiversityTriple::new(p.accuracy, avg, variance);
            Ok(DiversityRow {
                model_id: p.model_id.clone(),
                compute_mode: p.compute_mode,
                accuracy: p.accuracy,
                avg_rank_diff: avg,
                variance,
                rendered_triple: triple.to_string(),
            })
        })
        .collect()
}
