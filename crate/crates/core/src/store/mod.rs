//! Fixed-size evidence log, sidecar event index, content-addressed event
//! store, ingestion pipeline and audit scan.

mod audit;
mod events;
mod fixed;
mod index;
mod ingest;
mod log;

pub use audit::{audit_scan, AuditReport};
pub use events::EventStore;
pub use fixed::Durability;
pub use index::{sidecar_path, SidecarIndex, INDEX_MAGIC, INDEX_VERSION};
pub use ingest::{ingest_events, IngestReport, LineRejection};
pub use log::{EvidenceLog, LOG_MAGIC, LOG_VERSION};
