//! Blinded rating capture and the evaluation metrics computed from it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TradeError};
use crate::valuation::ComputeMode;

/// Overall ratings at or above this count as good trades.
pub const GOOD_TRADE_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeRating {
    pub fingerprint: String,
    pub rater_id: String,
    pub side: Side,
    pub rating: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blinded_mode_label: Option<char>,
}

impl TradeRating {
    pub fn validate(&self) -> Result<()> {
        if (1..=10).contains(&self.rating) {
            Ok(())
        } else {
            Err(TradeError::InvalidRating(self.rating))
        }
    }

    fn key(&self) -> (String, String, Side) {
        (self.rater_id.clone(), self.fingerprint.clone(), self.side)
    }
}

pub fn overall_rating(side_a: u8, side_b: u8) -> f64 {
    (f64::from(side_a) + f64::from(side_b)) / 2.0
}

/// A trade rated from both sides by one rater.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedRating {
    pub fingerprint: String,
    pub rater_id: String,
    pub overall: f64,
}

/// Pairs side ratings per (rater, trade). Returns the completed ratings and
/// the number of half-rated trades still pending.
pub fn complete_ratings(ratings: &[TradeRating]) -> (Vec<CompletedRating>, usize) {
    let mut sides: BTreeMap<(&str, &str), [Option<u8>; 2]> = BTreeMap::new();
    for r in ratings {
        let slot = sides.entry((r.rater_id.as_str(), r.fingerprint.as_str())).or_default();
        slot[r.side as usize] = Some(r.rating);
    }
    let mut pending = 0;
    let mut done = Vec::new();
    for ((rater, fp), s) in sides {
        match s {
            [Some(a), Some(b)] => done.push(CompletedRating {
                fingerprint: fp.to_string(),
                rater_id: rater.to_string(),
                overall: overall_rating(a, b),
            }),
            _ => pending += 1,
        }
    }
    (done, pending)
}

/// Share of overall ratings at or above the good-trade threshold.
pub fn good_trade_accuracy(overall: &[f64]) -> Option<f64> {
    if overall.is_empty() {
        return None;
    }
    let good = overall.iter().filter(|&&r| r >= GOOD_TRADE_THRESHOLD).count();
    Some(good as f64 / overall.len() as f64)
}

/// Percentage of ratings in each bin 1..=10; half-point averages fall in
/// the lower bin.
pub fn rating_distribution(overall: &[f64]) -> [f64; 10] {
    let mut bins = [0usize; 10];
    for &r in overall {
        let bin = (r.floor().clamp(1.0, 10.0) as usize) - 1;
        bins[bin] += 1;
    }
    let n = overall.len().max(1) as f64;
    bins.map(|c| 100.0 * c as f64 / n)
}

/// Cohen's kappa for two raters' binary judgements on the same trades.
pub fn cohen_kappa(x: &[bool], y: &[bool]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(TradeError::DimensionMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(TradeError::EmptyInput("shared trades"));
    }
    let n = x.len() as f64;
    let agree = x.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / n;
    let px = x.iter().filter(|&&v| v).count() as f64 / n;
    let py = y.iter().filter(|&&v| v).count() as f64 / n;
    let chance = px * py + (1.0 - px) * (1.0 - py);
    if chance == 1.0 {
        return if agree == 1.0 { Ok(1.0) } else { Err(TradeError::UndefinedKappa) };
    }
    Ok((agree - chance) / (1.0 - chance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaRow {
    pub rater_x: String,
    pub rater_y: String,
    pub shared: usize,
    pub kappa: f64,
}

/// Kappa for every rater pair with at least one shared completed trade.
pub fn pairwise_kappa(completed: &[CompletedRating]) -> Vec<KappaRow> {
    let mut by_rater: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for c in completed {
        by_rater
            .entry(c.rater_id.as_str())
            .or_default()
            .insert(c.fingerprint.as_str(), c.overall >= GOOD_TRADE_THRESHOLD);
    }
    let raters: Vec<_> = by_rater.keys().copied().collect();
    let mut rows = Vec::new();
    for (i, rx) in raters.iter().enumerate() {
        for ry in &raters[i + 1..] {
            let (mx, my) = (&by_rater[rx], &by_rater[ry]);
            let (xs, ys): (Vec<bool>, Vec<bool>) = mx
                .iter()
                .filter_map(|(fp, &vx)| my.get(fp).map(|&vy| (vx, vy)))
                .unzip();
            if let Ok(kappa) = cohen_kappa(&xs, &ys) {
                rows.push(KappaRow { rater_x: rx.to_string(), rater_y: ry.to_string(), shared: xs.len(), kappa });
            }
        }
    }
    rows
}

/// Share of trade occurrences (one per mode and fingerprint) whose
/// fingerprint appears in no other mode.
pub fn uniqueness<K: Ord, S: AsRef<str>>(per_mode: &BTreeMap<K, Vec<S>>) -> Result<f64> {
    if per_mode.len() < 2 {
        return Err(TradeError::TooFew { what: "compute modes", needed: 2, got: per_mode.len() });
    }
    let sets: Vec<BTreeSet<&str>> = per_mode.values().map(|v| v.iter().map(AsRef::as_ref).collect()).collect();
    let mut modes_per_trade: BTreeMap<&str, usize> = BTreeMap::new();
    for set in &sets {
        for fp in set {
            *modes_per_trade.entry(fp).or_insert(0) += 1;
        }
    }
    let occurrences: usize = sets.iter().map(BTreeSet::len).sum();
    if occurrences == 0 {
        return Err(TradeError::EmptyInput("trade sets"));
    }
    let unique = modes_per_trade.values().filter(|&&n| n == 1).count();
    Ok(unique as f64 / occurrences as f64)
}

/// Per-session shuffle of compute modes onto the labels A, B, C.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindingSession {
    pub session_id: String,
    pub labels: BTreeMap<ComputeMode, char>,
}

impl BlindingSession {
    pub fn new(session_id: impl Into<String>, seed: u64) -> Self {
        let mut modes = ComputeMode::ALL.to_vec();
        modes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let labels = modes.into_iter().zip(['A', 'B', 'C']).collect();
        Self { session_id: session_id.into(), labels }
    }

    pub fn label(&self, mode: ComputeMode) -> char {
        self.labels[&mode]
    }

    pub fn mode(&self, label: char) -> Option<ComputeMode> {
        self.labels.iter().find(|(_, &l)| l == label).map(|(&m, _)| m)
    }
}

/// Append-only JSON-lines rating log; the latest rating per
/// (rater, trade, side) wins.
#[derive(Debug, Default)]
pub struct RatingStore {
    path: Option<PathBuf>,
    latest: BTreeMap<(String, String, Side), TradeRating>,
}

impl RatingStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or creates on first write) the log at `path`.
    pub fn open(path: impl Into<PathBuf>) -> io::Result<Self> {
        let path = path.into();
        let mut store = Self { path: Some(path.clone()), latest: BTreeMap::new() };
        if path.exists() {
            for rating in read_ratings(&path)? {
                store.latest.insert(rating.key(), rating);
            }
        }
        Ok(store)
    }

    pub fn record(&mut self, rating: TradeRating) -> Result<()> {
        rating.validate()?;
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(io_error)?;
            }
            let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io_error)?;
            let line = serde_json::to_string(&rating).expect("rating serializes");
            writeln!(file, "{line}").map_err(io_error)?;
        }
        self.latest.insert(rating.key(), rating);
        Ok(())
    }

    pub fn ratings(&self) -> Vec<TradeRating> {
        self.latest.values().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.latest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.latest.is_empty()
    }
}

fn io_error(e: io::Error) -> TradeError {
    TradeError::Io(e.to_string())
}

/// Reads every line of a ratings log; later lines override earlier ones.
pub fn read_ratings(path: &Path) -> io::Result<Vec<TradeRating>> {
    let reader = BufReader::new(File::open(path)?);
    let mut latest = BTreeMap::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rating: TradeRating = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), n + 1)))?;
        latest.insert(rating.key(), rating);
    }
    Ok(latest.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub completed: usize,
    pub pending: usize,
    pub good_trade_accuracy: Option<f64>,
    /// Percentages for overall ratings 1..=10.
    pub distribution: Vec<f64>,
    pub kappa: Vec<KappaRow>,
    pub mean_kappa: Option<f64>,
    pub uniqueness: Option<f64>,
}

/// Builds the report; uniqueness needs trade sets from at least two modes.
pub fn evaluation_report<K: Ord, S: AsRef<str>>(
    ratings: &[TradeRating],
    trades_per_mode: Option<&BTreeMap<K, Vec<S>>>,
) -> EvaluationReport {
    let (completed, pending) = complete_ratings(ratings);
    let overall: Vec<f64> = completed.iter().map(|c| c.overall).collect();
    let kappa = pairwise_kappa(&completed);
    let mean_kappa = (!kappa.is_empty()).then(|| kappa.iter().map(|k| k.kappa).sum::<f64>() / kappa.len() as f64);
    EvaluationReport {
        completed: completed.len(),
        pending,
        good_trade_accuracy: good_trade_accuracy(&overall),
        distribution: rating_distribution(&overall).to_vec(),
        kappa,
        mean_kappa,
        uniqueness: trades_per_mode.and_then(|t| uniqueness(t).ok()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rating(fp: &str, rater: &str, side: Side, rating: u8) -> TradeRating {
        TradeRating { fingerprint: fp.into(), rater_id: rater.into(), side, rating, blinded_mode_label: None }
    }

    #[test]
    fn overall_examples() {
        assert_eq!(overall_rating(4, 4), 4.0);
        assert_eq!(overall_rating(1, 10), 5.5);
        assert_eq!(overall_rating(7, 6), 6.5);
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(good_trade_accuracy(&[10.0; 5]), Some(1.0));
        assert_eq!(good_trade_accuracy(&[3.0, 5.0]), Some(0.5));
        assert_eq!(good_trade_accuracy(&[]), None);
        assert_eq!(good_trade_accuracy(&[3.5, 4.0]), Some(0.5));
    }

    #[test]
    fn distribution_examples() {
        let single = rating_distribution(&[7.0]);
        assert_eq!(single[6], 100.0);
        assert_eq!(single.iter().sum::<f64>(), 100.0);
        let uniform: Vec<f64> = (1..=10).map(f64::from).collect();
        assert!(rating_distribution(&uniform).iter().all(|&p| (p - 10.0).abs() < 1e-12));
        // 6.5 lands in bin 6, 5.5 in bin 5.
        let d = rating_distribution(&[6.5, 5.5, 6.0, 9.0]);
        assert_eq!(d[5], 50.0);
        assert_eq!(d[4], 25.0);
        assert_eq!(d[8], 25.0);
    }

    fn table(a: usize, b: usize, c: usize, d: usize) -> (Vec<bool>, Vec<bool>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (n, vx, vy) in [(a, true, true), (b, true, false), (c, false, true), (d, false, false)] {
            x.extend(std::iter::repeat(vx).take(n));
            y.extend(std::iter::repeat(vy).take(n));
        }
        (x, y)
    }

    #[test]
    fn kappa_examples() {
        let (x, y) = table(40, 10, 10, 40);
        assert!((cohen_kappa(&x, &y).unwrap() - 0.6).abs() < 1e-12);
        let (x, y) = table(3, 2, 0, 0);
        assert_eq!(cohen_kappa(&x, &y).unwrap(), 0.0);
        // p_o = p_e = 0.5 with both raters at 50% positives.
        let (x, y) = table(25, 25, 25, 25);
        assert_eq!(cohen_kappa(&x, &y).unwrap(), 0.0);
        let mixed = [true, false, true, true];
        assert_eq!(cohen_kappa(&mixed, &mixed).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[true; 3], &[true; 3]).unwrap(), 1.0);
        assert!(cohen_kappa(&[], &[]).is_err());
    }

    #[test]
    fn uniqueness_examples() {
        let mut m = BTreeMap::new();
        m.insert("sme", vec!["a", "b"]);
        m.insert("classical", vec!["a", "b"]);
        assert_eq!(uniqueness(&m).unwrap(), 0.0);
        m.insert("classical", vec!["c", "d"]);
        assert_eq!(uniqueness(&m).unwrap(), 1.0);
        m.insert("sme", vec!["t1", "t2", "t3", "t4", "shared"]);
        m.insert("classical", vec!["u1", "u2", "u3", "u4", "shared"]);
        assert!((uniqueness(&m).unwrap() - 0.8).abs() < 1e-12);
        m.insert("classical", vec!["u1", "u2", "u3", "u4", "shared", "u1"]);
        assert!((uniqueness(&m).unwrap() - 0.8).abs() < 1e-12);
        m.remove("classical");
        assert!(uniqueness(&m).is_err());
    }

    #[test]
    fn completion_and_pending() {
        let ratings = vec![
            rating("t1", "r1", Side::A, 4),
            rating("t1", "r1", Side::B, 6),
            rating("t2", "r1", Side::A, 9),
        ];
        let (done, pending) = complete_ratings(&ratings);
        assert_eq!(done.len(), 1);
        assert_eq!(done[0].overall, 5.0);
        assert_eq!(pending, 1);
    }

    #[test]
    fn store_keeps_latest_rating() {
        let dir = std::env::temp_dir().join(format!("ratings-{}", std::process::id()));
        let path = dir.join("ratings.jsonl");
        let _ = fs::remove_file(&path);
        let mut store = RatingStore::open(&path).unwrap();
        store.record(rating("t1", "r1", Side::A, 3)).unwrap();
        store.record(rating("t1", "r1", Side::A, 8)).unwrap();
        assert!(store.record(rating("t1", "r1", Side::B, 11)).is_err());
        let reopened = RatingStore::open(&path).unwrap();
        assert_eq!(reopened.ratings(), vec![rating("t1", "r1", Side::A, 8)]);
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 2);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn blinding_is_a_permutation() {
        let s = BlindingSession::new("s1", 9);
        let labels: BTreeSet<char> = s.labels.values().copied().collect();
        assert_eq!(labels, BTreeSet::from(['A', 'B', 'C']));
        for mode in ComputeMode::ALL {
            assert_eq!(s.mode(s.label(mode)), Some(mode));
        }
        assert_eq!(s, BlindingSession::new("s1", 9));
    }

    #[test]
    fn report_pairs_raters() {
        let mut ratings = Vec::new();
        for (fp, x, y) in [("t1", 8, 7), ("t2", 2, 3), ("t3", 6, 5)] {
            for side in [Side::A, Side::B] {
                ratings.push(rating(fp, "r1", side, x));
                ratings.push(rating(fp, "r2", side, y));
            }
        }
        let report = evaluation_report::<&str, &str>(&ratings, None);
        assert_eq!(report.completed, 6);
        assert_eq!(report.mean_kappa, Some(1.0));
        assert!((report.good_trade_accuracy.unwrap() - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(report.uniqueness, None);
    }
}
