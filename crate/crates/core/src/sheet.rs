//! Per-mode valuation sheets: the batch job output and the unit the trade
//! service caches.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost::{team_costs, CostBreakdown};
use crate::domain::{positional_ranks, League, PlayerRecord};
use crate::error::{Result, TradeError};
use crate::importance::{diversity_report, ensemble_weights, ModelDiversity};
use crate::valuation::{
    apply_state_and_equivalence, model_raw_score, momentum_blend, normalize_to_sme_range, sme_raw_valuation,
    ComputeMode, ModelImportanceProfile, PoolContext, SmeWeights, ValuationRange,
};

pub const DEFAULT_TOP_N: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetEntry {
    pub player_id: String,
    pub valuation: f64,
    #[serde(default)]
    pub cost: Option<CostBreakdown>,
    pub boom: f64,
    pub bust: f64,
    pub percent_owned: f64,
    pub opponent_rank: u32,
    pub games_left: u32,
    pub season_actual: f64,
    pub season_projection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationSheet {
    pub compute_mode: ComputeMode,
    pub generated_at: String,
    /// Daily expert-rule range every mode is normalized into.
    pub sme_low: f64,
    pub sme_high: f64,
    pub entries: Vec<SheetEntry>,
}

impl ValuationSheet {
    pub fn valuation_map(&self) -> HashMap<&str, f64> {
        self.entries.iter().map(|e| (e.player_id.as_str(), e.valuation)).collect()
    }

    /// Valuation for players that fell outside the sheet's top entries.
    pub fn floor_valuation(&self) -> f64 {
        self.entries.iter().map(|e| e.valuation).fold(self.sme_high, f64::min)
    }

    pub fn file_name(mode: ComputeMode) -> String {
        format!("{mode}.json")
    }

    pub fn to_json(&self) -> String {
        to_fixed_json(self)
    }
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub modes: Vec<ComputeMode>,
    pub top_n: usize,
    pub generated_at: String,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            modes: ComputeMode::ALL.to_vec(),
            top_n: DEFAULT_TOP_N,
            generated_at: "1970-01-01T00:00:00Z".into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatchOutcome {
    pub sheets: Vec<ValuationSheet>,
    pub warnings: Vec<String>,
}

/// Final expert-rule valuation of every player.
pub fn sme_valuations(players: &[PlayerRecord], ctx: &PoolContext, weights: &SmeWeights, week: u32) -> Vec<f64> {
    players
        .iter()
        .map(|p| {
            let raw = sme_raw_valuation(&ctx.tiers(p), week, weights);
            let adjusted = apply_state_and_equivalence(raw, p, ctx.positional_rank(p), weights);
            momentum_blend(adjusted, p.avg_points_prev, week)
        })
        .collect()
}

/// Importance vector for a mode: the single profile's importances, or the
/// diversity-weighted ensemble when a mode has several models.
fn mode_importances(
    mode: ComputeMode,
    profiles: &[ModelImportanceProfile],
) -> Result<Option<BTreeMap<String, f64>>> {
    let members: Vec<&ModelImportanceProfile> = profiles.iter().filter(|p| p.compute_mode == mode).collect();
    match members.len() {
        0 => Ok(None),
        1 => Ok(Some(members[0].importances.clone())),
        _ => {
            let report = diversity_report(profiles)?;
            let models = profiles
                .iter()
                .zip(&report)
                .filter(|(p, _)| p.compute_mode == mode)
                .map(|(p, row)| ModelDiversity {
                    profile: p.clone(),
                    avg_rank_diff: row.avg_rank_diff,
                    variance: row.variance,
                })
                .collect::<Vec<_>>();
            ensemble_weights(&models).map(Some)
        }
    }
}

/// Values every player under each configured mode and keeps the top `top_n`.
pub fn batch_valuate(
    league: &League,
    profiles: &[ModelImportanceProfile],
    weights: &SmeWeights,
    config: &BatchConfig,
) -> Result<BatchOutcome> {
    let players = &league.players;
    if players.is_empty() {
        return Err(TradeError::EmptyInput("player table"));
    }
    for p in profiles {
        p.validate()?;
    }
    let week = league.rules.current_week;
    let ctx = PoolContext::new(players);
    let sme = sme_valuations(players, &ctx, weights, week);
    let sme_low = sme.iter().copied().fold(f64::INFINITY, f64::min);
    let sme_high = sme.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut warnings = Vec::new();
    let ranks = positional_ranks(players);
    let table = league.player_table();
    let mut costs: HashMap<String, CostBreakdown> = HashMap::new();
    for team in &league.teams {
        match team_costs(&table.roster(team), &league.rules, &ranks) {
            Ok(c) => costs.extend(c),
            Err(e) => warnings.push(format!("team {}: costs unavailable: {e}", team.team_id)),
        }
    }

    let mut modes = config.modes.clone();
    modes.sort();
    modes.dedup();
    let mut sheets = Vec::new();
    for mode in modes {
        let valuations = match mode {
            ComputeMode::Sme => sme.clone(),
            _ => {
                let Some(importances) = mode_importances(mode, profiles)? else {
                    warnings.push(format!("no importance profile for mode {mode}; skipped"));
                    continue;
                };
                let raw = players
                    .iter()
                    .map(|p| {
                        let features = ctx.features(p);
                        Ok(weights.status_penalties.multiplier(p.status) * model_raw_score(&features, &importances)?)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let range = ValuationRange::spanning(sme_low, sme_high, raw.iter().copied())
                    .expect("nonempty player table");
                raw.iter().map(|&x| normalize_to_sme_range(x, &range)).collect()
            }
        };

        let mut entries: Vec<SheetEntry> = players
            .iter()
            .zip(valuations)
            .map(|(p, valuation)| SheetEntry {
                player_id: p.player_id.clone(),
                valuation,
                cost: costs.get(&p.player_id).copied(),
                boom: ctx.boom(p),
                bust: ctx.bust(p),
                percent_owned: p.percent_owned,
                opponent_rank: p.opponent_rank,
                games_left: p.games_left,
                season_actual: p.season_actual,
                season_projection: p.season_projection,
            })
            .collect();
        entries.sort_by(|a, b| b.valuation.total_cmp(&a.valuation).then_with(|| a.player_id.cmp(&b.player_id)));
        entries.truncate(config.top_n);
        sheets.push(ValuationSheet {
            compute_mode: mode,
            generated_at: config.generated_at.clone(),
            sme_low,
            sme_high,
            entries,
        });
    }
    Ok(BatchOutcome { sheets, warnings })
}

/// Writes one `<mode>.json` file per sheet.
pub fn write_sheets(dir: &Path, sheets: &[ValuationSheet]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    sheets
        .iter()
        .map(|sheet| {
            let path = dir.join(ValuationSheet::file_name(sheet.compute_mode));
            fs::write(&path, sheet.to_json() + "\n")?;
            Ok(path)
        })
        .collect()
}

/// Reads every `<mode>.json` sheet present in `dir`.
pub fn read_sheets(dir: &Path) -> io::Result<Vec<ValuationSheet>> {
    let mut sheets = Vec::new();
    for mode in ComputeMode::ALL {
        let path = dir.join(ValuationSheet::file_name(mode));
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path)?;
        let sheet: ValuationSheet =
            serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
        sheets.push(sheet);
    }
    Ok(sheets)
}

/// Compact JSON formatter writing every float with six decimals.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

impl serde_json::ser::Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.6}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.6}")
    }
}

pub fn to_fixed_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedPrecision);
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
