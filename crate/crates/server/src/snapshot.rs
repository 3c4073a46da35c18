//! Immutable in-memory sheet snapshots, swapped atomically on refresh.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use arc_swap::ArcSwap;
use trade_core::sheet::read_sheets;
use trade_core::{ComputeMode, ValuationSheet};

#[derive(Debug, Default)]
pub struct Snapshot {
    pub sheets: BTreeMap<ComputeMode, ValuationSheet>,
    /// Bumped on every successful load.
    pub version: u64,
}

impl Snapshot {
    pub fn new(sheets: Vec<ValuationSheet>, version: u64) -> Self {
        Self {
            sheets: sheets.into_iter().map(|s| (s.compute_mode, s)).collect(),
            version,
        }
    }

    /// Sheets for `modes` in mode order; every loaded sheet when `modes` is empty.
    pub fn select(&self, modes: &[ComputeMode]) -> Vec<ValuationSheet> {
        self.sheets
            .iter()
            .filter(|(m, _)| modes.is_empty() || modes.contains(m))
            .map(|(_, s)| s.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.sheets.is_empty()
    }
}

/// Readers take a consistent `Arc<Snapshot>`; a refresh publishes a new one.
#[derive(Debug)]
pub struct SnapshotStore {
    current: ArcSwap<Snapshot>,
    dir: Option<PathBuf>,
}

impl SnapshotStore {
    pub fn empty() -> Self {
        Self { current: ArcSwap::from_pointee(Snapshot::default()), dir: None }
    }

    pub fn from_sheets(sheets: Vec<ValuationSheet>) -> Self {
        Self { current: ArcSwap::from_pointee(Snapshot::new(sheets, 1)), dir: None }
    }

    /// Loads every sheet file in `dir` and remembers it for refreshes.
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let store = Self { current: ArcSwap::from_pointee(Snapshot::default()), dir: Some(dir.into()) };
        store.refresh()?;
        Ok(store)
    }

    pub fn load(&self) -> Arc<Snapshot> {
        self.current.load_full()
    }

    pub fn replace(&self, sheets: Vec<ValuationSheet>) {
        let version = self.current.load().version + 1;
        self.current.store(Arc::new(Snapshot::new(sheets, version)));
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Re-reads the sheet directory. A failed read keeps the old snapshot.
    pub fn refresh(&self) -> std::io::Result<()> {
        if let Some(dir) = &self.dir {
            let sheets = read_sheets(dir)?;
            self.replace(sheets);
        }
        Ok(())
    }

    /// Refreshes every `period` until the task is dropped.
    pub fn spawn_refresh(self: &Arc<Self>, period: Duration) -> tokio::task::JoinHandle<()> {
        let store = Arc::clone(self);
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            tick.tick().await;
            loop {
                tick.tick().await;
                let s = Arc::clone(&store);
                match tokio::task::spawn_blocking(move || s.refresh()).await {
                    Ok(Ok(())) => tracing::debug!(version = store.load().version, "sheets refreshed"),
                    Ok(Err(e)) => tracing::warn!(error = %e, "sheet refresh failed; keeping previous snapshot"),
                    Err(e) => tracing::warn!(error = %e, "sheet refresh task panicked"),
                }
            }
        })
    }
}
