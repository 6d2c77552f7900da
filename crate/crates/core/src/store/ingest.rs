use std::collections::HashSet;
use std::io::BufRead;

use crate::encoding::event_from_line;
use crate::error::{Error, Result};
use crate::evidence::generate_evidence;
use crate::keys::KeyPair;
use crate::params::Params;

use super::{EventStore, EvidenceLog, SidecarIndex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineRejection {
    /// 1-based line number in the source.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Newly appended records.
    pub accepted: usize,
    /// Line numbers of events already present in the log.
    pub duplicates: Vec<usize>,
    pub rejected: Vec<LineRejection>,
    /// Index of the first record appended by this run.
    pub first_index: u64,
}

/// Stores, signs and appends each event line from `source`.
///
/// Events already indexed (same canonical digest) are skipped, so
/// re-running over the same input appends nothing. Per-line problems are
/// reported; only storage failures abort.
pub fn ingest_events(
    source: impl BufRead,
    params: &Params,
    keypair: &KeyPair,
    log: &mut EvidenceLog,
    index: &mut SidecarIndex,
    events: &EventStore,
) -> Result<IngestReport> {
    if log.params().digest() != params.digest() {
        return Err(Error::ParamsMismatch {
            expected: log.params().digest(),
            got: params.digest(),
        });
    }
    if index.len() != log.record_count() || index.partial_tail() != 0 || log.partial_tail() != 0 {
        return Err(Error::CorruptFile {
            path: log.path().display().to_string(),
            reason: format!(
                "log holds {} records (+{} stray bytes), index {} entries (+{})",
                log.record_count(),
                log.partial_tail(),
                index.len(),
                index.partial_tail()
            ),
        });
    }
    let mut seen: HashSet<_> = index.read_all()?.into_iter().collect();
    let mut report = IngestReport {
        first_index: log.record_count(),
        ..Default::default()
    };
    for (n, line) in source.split(b'\n').enumerate() {
        let line_no = n + 1;
        let raw = line?;
        let reject = |reason: String| LineRejection {
            line: line_no,
            reason,
        };
        let text = match std::str::from_utf8(&raw) {
            Ok(t) => t.trim(),
            Err(e) => {
                report.rejected.push(reject(format!("invalid UTF-8: {e}")));
                continue;
            }
        };
        if text.is_empty() {
            continue;
        }
        let event = match event_from_line(text) {
            Ok(e) => e,
            Err(e) => {
                report.rejected.push(reject(e.to_string()));
                continue;
            }
        };
        let digest = event.digest()?;
        if seen.contains(&digest) {
            report.duplicates.push(line_no);
            continue;
        }
        let signed = match generate_evidence(params, keypair, &event) {
            Ok(s) => s,
            Err(e) => {
                report.rejected.push(reject(e.to_string()));
                continue;
            }
        };
        events.put(&event)?;
        log.append_record(&signed)?;
        index.append(&digest)?;
        seen.insert(digest);
        report.accepted += 1;
    }
    Ok(report)
}
