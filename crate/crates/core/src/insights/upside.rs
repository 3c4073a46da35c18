//! Acceptance-likelihood scoring.

use serde::{Deserialize, Serialize};

use super::TradeInsights;

/// Inputs to an upside scorer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsideFeatures {
    pub parity: f64,
    pub mean_pain: f64,
    /// `|angle - 90| / 90`.
    pub dissimilarity: f64,
    pub min_impact: f64,
}

impl UpsideFeatures {
    pub fn from_metrics(m: &TradeInsights, pairing_angle: f64) -> Self {
        Self {
            parity: m.parity,
            mean_pain: 0.5 * (m.pain_a + m.pain_b),
            dissimilarity: (pairing_angle - 90.0).abs() / 90.0,
            min_impact: m.impact_a.min(m.impact_b),
        }
    }
}

pub trait UpsideScorer: Send + Sync {
    /// Probability-like score in [0, 1].
    fn score(&self, features: &UpsideFeatures) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UpsideWeights {
    pub bias: f64,
    pub parity: f64,
    pub mean_pain: f64,
    pub dissimilarity: f64,
    pub min_impact: f64,
}

impl UpsideWeights {
    pub fn zero() -> Self {
        Self { bias: 0.0, parity: 0.0, mean_pain: 0.0, dissimilarity: 0.0, min_impact: 0.0 }
    }

    pub fn linear(&self, f: &UpsideFeatures) -> f64 {
        self.bias
            + self.parity * f.parity
            + self.mean_pain * f.mean_pain
            + self.dissimilarity * f.dissimilarity
            + self.min_impact * f.min_impact
    }
}

impl Default for UpsideWeights {
    fn default() -> Self {
        Self { bias: 0.5, parity: -4.0, mean_pain: -1.0, dissimilarity: 0.5, min_impact: 1.5 }
    }
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Default scorer: `logistic(bias + w . features)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogisticUpside(pub UpsideWeights);

impl UpsideScorer for LogisticUpside {
    fn score(&self, features: &UpsideFeatures) -> f64 {
        logistic(self.0.linear(features))
    }
}
