//! HTTP endpoints.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use trade_core::evaluation::{evaluation_report, RatingStore, Side, TradeRating};
use trade_core::sheet::to_fixed_json;
use trade_core::{
    batch_valuate, generate_trades, BatchConfig, ComputeMode, League, ModelImportanceProfile, PersonalizationRequest,
    TradeError, TradePackage,
};

use crate::config::ServiceConfig;
use crate::snapshot::SnapshotStore;

pub struct AppState {
    pub sheets: Arc<SnapshotStore>,
    pub config: ServiceConfig,
    /// Used to value the request's league when no sheets are loaded.
    pub profiles: Vec<ModelImportanceProfile>,
    pub ratings: Mutex<RatingStore>,
    /// Fingerprints served per mode, for the uniqueness metric.
    pub served: Mutex<BTreeMap<ComputeMode, BTreeSet<String>>>,
}

impl AppState {
    pub fn new(sheets: Arc<SnapshotStore>, config: ServiceConfig, profiles: Vec<ModelImportanceProfile>, ratings: RatingStore) -> Self {
        Self {
            sheets,
            config,
            profiles,
            ratings: Mutex::new(ratings),
            served: Mutex::new(BTreeMap::new()),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/trades", post(post_trades))
        .route("/v1/valuations", get(get_valuations))
        .route("/v1/ratings", post(post_rating))
        .route("/v1/reports/evaluation", get(get_evaluation))
        .with_state(state)
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    json_response(status, to_fixed_json(&ErrorBody { error: code, message: message.into() }))
}

fn trade_error(e: &TradeError) -> Response {
    let (status, code) = match e {
        TradeError::UnknownTeam(_) => (StatusCode::NOT_FOUND, "unknown_team"),
        TradeError::UnknownPlayer(_) => (StatusCode::NOT_FOUND, "unknown_player"),
        TradeError::InvalidRisk(_) => (StatusCode::BAD_REQUEST, "invalid_risk"),
        TradeError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
        _ => (StatusCode::BAD_REQUEST, "invalid_request"),
    };
    error(status, code, e.to_string())
}

fn parse<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, Response> {
    serde_json::from_slice(body).map_err(|e| error(StatusCode::BAD_REQUEST, "malformed_body", e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeRequest {
    pub league: League,
    pub requesting_team: String,
    #[serde(default)]
    pub personalization: PersonalizationRequest,
    #[serde(default)]
    pub compute_modes: Vec<ComputeMode>,
    #[serde(default)]
    pub max_results: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeResponse {
    pub snapshot_version: u64,
    pub trades: Vec<TradePackage>,
    pub candidates: usize,
    pub rejected: usize,
}

/// Runs one trade request against the current snapshot.
pub fn handle_trades(state: &AppState, req: &TradeRequest) -> Result<TradeResponse, TradeError> {
    let snapshot = state.sheets.load();
    let mut sheets = snapshot.select(&req.compute_modes);
    if snapshot.is_empty() {
        let batch = BatchConfig {
            modes: if req.compute_modes.is_empty() { ComputeMode::ALL.to_vec() } else { req.compute_modes.clone() },
            ..BatchConfig::default()
        };
        sheets = batch_valuate(&req.league, &state.profiles, &state.config.sme_weights, &batch)?.sheets;
    }
    let mut engine = state.config.engine.clone();
    if let Some(n) = req.max_results {
        engine.max_results = n;
    }
    let out = generate_trades(&req.league, &req.requesting_team, &req.personalization, &sheets, &engine)?;
    if let Ok(mut served) = state.served.lock() {
        for t in &out.trades {
            served.entry(t.compute_mode).or_default().insert(t.fingerprint.clone());
        }
    }
    Ok(TradeResponse {
        snapshot_version: snapshot.version,
        rejected: out.rejections.len(),
        candidates: out.candidates,
        trades: out.trades,
    })
}

async fn post_trades(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: TradeRequest = match parse(&body) {
        Ok(r) => r,
        Err(resp) => return resp,
    };
    let result = tokio::task::spawn_blocking(move || handle_trades(&state, &req).map(|r| to_fixed_json(&r))).await;
    match result {
        Ok(Ok(body)) => json_response(StatusCode::OK, body),
        Ok(Err(e)) => trade_error(&e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
    }
}

#[derive(Debug, Deserialize)]
struct ValuationQuery {
    mode: Option<String>,
}

async fn get_valuations(State(state): State<Arc<AppState>>, Query(q): Query<ValuationQuery>) -> Response {
    let mode = q.mode.as_deref().unwrap_or("sme");
    let Ok(mode) = mode.parse::<ComputeMode>() else {
        return error(StatusCode::BAD_REQUEST, "invalid_mode", format!("unknown compute mode `{mode}`"));
    };
    match state.sheets.load().sheets.get(&mode) {
        Some(sheet) => json_response(StatusCode::OK, sheet.to_json()),
        None => error(StatusCode::NOT_FOUND, "no_sheet", format!("no sheet loaded for mode `{mode}`")),
    }
}

#[derive(Debug, Deserialize)]
struct RatingBody {
    fingerprint: String,
    rater_id: String,
    side: Side,
    rating: u8,
    #[serde(default)]
    blinded_mode_label: Option<char>,
}

async fn post_rating(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let body: RatingBody = match parse(&body) {
        Ok(b) => b,
        Err(resp) => return resp,
    };
    let rating = TradeRating {
        fingerprint: body.fingerprint,
        rater_id: body.rater_id,
        side: body.side,
        rating: body.rating,
        blinded_mode_label: body.blinded_mode_label,
    };
    let recorded = match state.ratings.lock() {
        Ok(mut store) => store.record(rating.clone()),
        Err(_) => return error(StatusCode::INTERNAL_SERVER_ERROR, "internal", "ratings store poisoned"),
    };
    match recorded {
        Ok(()) => json_response(StatusCode::CREATED, to_fixed_json(&rating)),
        Err(e) => trade_error(&e),
    }
}

async fn get_evaluation(State(state): State<Arc<AppState>>) -> Response {
    let ratings = match state.ratings.lock() {
        Ok(store) => store.ratings(),
        Err(_) => return error(StatusCode::INTERNAL_SERVER_ERROR, "internal", "ratings store poisoned"),
    };
    let served: BTreeMap<ComputeMode, Vec<String>> = state
        .served
        .lock()
        .map(|s| s.iter().map(|(m, fps)| (*m, fps.iter().cloned().collect())).collect())
        .unwrap_or_default();
    let report = evaluation_report(&ratings, Some(&served));
    json_response(StatusCode::OK, to_fixed_json(&report))
}
