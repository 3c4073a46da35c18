use std::collections::BTreeMap;

use crate::error::{Result, TradeError};
use crate::valuation::ModelImportanceProfile;

/// A model profile with its diversity statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDiversity {
    pub profile: ModelImportanceProfile,
    pub avg_rank_diff: f64,
    pub variance: f64,
}

fn share(part: f64, total: f64) -> f64 {
    if total > 0.0 {
        part / total
    } else {
        0.0
    }
}

/// Combines per-model importances, weighting each model by its share of the
/// total accuracy, rank difference and importance variance.
///
/// A statistic that sums to zero across models contributes nothing.
pub fn ensemble_weights(models: &[ModelDiversity]) -> Result<BTreeMap<String, f64>> {
    if models.is_empty() {
        return Err(TradeError::EmptyInput("model profiles"));
    }
    let acc_total: f64 = models.iter().map(|m| m.profile.accuracy).sum();
    let rank_total: f64 = models.iter().map(|m| m.avg_rank_diff).sum();
    let var_total: f64 = models.iter().map(|m| m.variance).sum();

    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    for m in models {
        let factor = share(m.profile.accuracy, acc_total) + share(m.avg_rank_diff, rank_total) + share(m.variance, var_total);
        for (feature, &p) in &m.profile.importances {
            *weights.entry(feature.clone()).or_insert(0.0) += p * factor;
        }
    }
    Ok(weights)
}
