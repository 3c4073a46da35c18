use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{normalize_to_sme_range, ComputeMode, StatusPenalties, ValuationRange};
use crate::domain::PlayerRecord;
use crate::error::{Result, TradeError};

/// Named feature values for one player (or one dataset row).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub BTreeMap<String, f64>);

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// A trained model's accuracy and per-feature importances, ingested as data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelImportanceProfile {
    pub model_id: String,
    pub compute_mode: ComputeMode,
    pub accuracy: f64,
    pub importances: BTreeMap<String, f64>,
    pub rank_order: Vec<String>,
}

impl ModelImportanceProfile {
    /// Builds a profile whose rank order follows descending importance.
    pub fn ranked(model_id: impl Into<String>, compute_mode: ComputeMode, accuracy: f64, importances: BTreeMap<String, f64>) -> Self {
        let mut rank_order: Vec<String> = importances.keys().cloned().collect();
        rank_order.sort_by(|a, b| importances[b].total_cmp(&importances[a]).then_with(|| a.cmp(b)));
        Self {
            model_id: model_id.into(),
            compute_mode,
            accuracy,
            importances,
            rank_order,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| TradeError::InvalidProfile {
            model_id: self.model_id.clone(),
            reason: reason.to_string(),
        };
        if !(0.0..=1.0).contains(&self.accuracy) {
            return Err(invalid("accuracy outside [0, 1]"));
        }
        if self.importances.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid("importances must be finite and nonnegative"));
        }
        let ranked: BTreeSet<&String> = self.rank_order.iter().collect();
        let named: BTreeSet<&String> = self.importances.keys().collect();
        if ranked.len() != self.rank_order.len() || ranked != named {
            return Err(invalid("rank_order is not a permutation of the feature names"));
        }
        Ok(())
    }

    /// Importances in `rank_order`.
    pub fn importance_vector(&self) -> Vec<f64> {
        self.rank_order.iter().map(|f| self.importances[f]).collect()
    }
}

/// Product sum of features and importances, before penalties and normalization.
pub fn model_raw_score(features: &FeatureVector, importances: &BTreeMap<String, f64>) -> Result<f64> {
    importances.iter().try_fold(0.0, |acc, (name, weight)| {
        let value = features
            .get(name)
            .ok_or_else(|| TradeError::MissingFeature(name.clone()))?;
        Ok(acc + value * weight)
    })
}

/// Status-penalized importance-weighted product sum, mapped into the expert range.
pub fn model_valuation(
    features: &FeatureVector,
    profile: &ModelImportanceProfile,
    player: &PlayerRecord,
    penalties: &StatusPenalties,
    range: &ValuationRange<f64>,
) -> Result<f64> {
    let raw = penalties.multiplier(player.status) * model_raw_score(features, &profile.importances)?;
    Ok(normalize_to_sme_range(raw, range))
}
