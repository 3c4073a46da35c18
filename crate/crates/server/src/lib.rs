//! Batch valuation, the cached HTTP trade service and the `fftrade` CLI
//! built on `trade-core`.

pub mod api;
pub mod config;
pub mod inputs;
pub mod snapshot;

pub use api::{router, AppState};
pub use config::ServiceConfig;
pub use snapshot::{Snapshot, SnapshotStore};
