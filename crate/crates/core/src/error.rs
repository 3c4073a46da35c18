use thiserror::Error;

/// Errors raised by the valuation, importance and trade kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TradeError {
    #[error("position pool is empty")]
    EmptyPool,
    #[error("standard deviation must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("missing feature `{0}`")]
    MissingFeature(String),
    #[error("cannot normalize: importances sum to zero")]
    ZeroImportanceSum,
    #[error("rankings cover different feature sets")]
    MismatchedRankings,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("division by zero: {0}")]
    ZeroDenominator(&'static str),
    #[error("missing positional rank for player `{0}`")]
    MissingRank(String),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unknown team `{0}`")]
    UnknownTeam(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("risk must lie in (0, 1], got {0}")]
    InvalidRisk(f64),
    #[error("player `{0}` must be released but is not on the requesting roster")]
    ReleaseNotOwned(String),
    #[error("player `{0}` is both required and untradable")]
    ForcedUntradable(String),
    #[error("player `{0}` must be acquired but is already on the requesting roster")]
    AcquireAlreadyOwned(String),
    #[error("rating must be within 1..=10, got {0}")]
    InvalidRating(u8),
    #[error("undefined kappa: expected agreement is 1 but observed agreement is not")]
    UndefinedKappa,
    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("i/o: {0}")]
    Io(String),
    #[error("invalid profile `{model_id}`: {reason}")]
    InvalidProfile { model_id: String, reason: String },
}

pub type Result<T, E = TradeError> = std::result::Result<T, E>;
