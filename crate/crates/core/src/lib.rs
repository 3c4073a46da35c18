//! Fantasy-football trade recommendation: player valuation under several
//! compute modes, team pairing, knapsack trade packages, trade insights and
//! rating-based evaluation.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); league data
//! and sheets use `f64`.

pub mod cost;
pub mod domain;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod importance;
pub mod insights;
pub mod pairing;
pub mod scalar;
pub mod sheet;
pub mod synthetic;
pub mod valuation;

pub use domain::{League, LeagueRules, PlayerRecord, PlayerStatus, Position, SlotRule, Team};
pub use engine::{generate_trades, EngineConfig, PersonalizationRequest, TradeOutcome, TradePackage};
pub use error::{Result, TradeError};
pub use insights::{FilterConfig, TradeInsights, UpsideWeights};
pub use scalar::Scalar;
pub use sheet::{batch_valuate, BatchConfig, ValuationSheet};
pub use valuation::{ComputeMode, ModelImportanceProfile, SmeWeights};

pub type TierScoresF64 = valuation::TierScores<f64>;
pub type TierScoresF32 = valuation::TierScores<f32>;
pub type ValuationRangeF64 = valuation::ValuationRange<f64>;
pub type ValuationRangeF32 = valuation::ValuationRange<f32>;
pub type TeamVectorF64 = pairing::TeamVector<f64>;
pub type TeamVectorF32 = pairing::TeamVector<f32>;
pub type PairingF64 = pairing::Pairing<f64>;
pub type DiversityTripleF64 = importance::DiversityTriple<f64>;
