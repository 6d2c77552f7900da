//! Anchoring of tips and roots to an external append-only sink.
//!
//! The reference sink is a local file:
//! `"CSAN" ∥ version u16` then records of
//! `sequence u64 ∥ label_len u16 ∥ label ∥ digest[32] ∥ written_at_us u64`,
//! all big-endian. Sinks are single-writer; concurrent writers must be
//! serialized by the caller.

use std::fs::{File, OpenOptions};
use std::io::{ErrorKind, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::hash::Digest;
use crate::wire::{put_u16, put_u64, Reader};

pub const ANCHOR_MAGIC: &[u8; 4] = b"CSAN";
pub const ANCHOR_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorRecord {
    pub sequence: u64,
    pub label: String,
    pub digest: Digest,
    pub written_at_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorReceipt {
    pub sink_id: String,
    pub sequence: u64,
    pub digest: Digest,
    pub label: String,
    pub written_at_us: u64,
}

pub trait AnchorSink {
    fn sink_id(&self) -> String;

    /// Sequence number the next fresh anchor will receive.
    fn next_sequence(&self) -> u64;

    /// Appends `value` at `sequence`. Re-anchoring the same digest at an
    /// existing sequence returns the original receipt; a different digest is
    /// a [`Error::SequenceConflict`] and nothing is written.
    fn append_at(&mut self, sequence: u64, value: Digest, label: &str) -> Result<AnchorReceipt>;

    /// Reads back from durable storage.
    fn read(&self, sequence: u64) -> Result<Option<AnchorRecord>>;

    fn records(&self) -> Result<Vec<AnchorRecord>>;
}

/// Anchors `value` at the sink's next sequence number.
pub fn anchor(sink: &mut dyn AnchorSink, value: Digest, label: &str) -> Result<AnchorReceipt> {
    let seq = sink.next_sequence();
    sink.append_at(seq, value, label)
}

pub struct FileAnchorSink {
    path: PathBuf,
    file: File,
    records: Vec<AnchorRecord>,
}

fn unavailable(path: &Path, e: std::io::Error) -> Error {
    Error::SinkUnavailable(format!("{}: {e}", path.display()))
}

fn now_us() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_micros() as u64)
        .unwrap_or(0)
}

impl FileAnchorSink {
    /// Opens an existing sink or creates an empty one.
    pub fn open(path: impl AsRef<Path>) -> Result<FileAnchorSink> {
        let path = path.as_ref().to_path_buf();
        let file = match OpenOptions::new()
            .read(true)
            .append(true)
            .create_new(true)
            .open(&path)
        {
            Ok(mut f) => {
                let mut header = ANCHOR_MAGIC.to_vec();
                put_u16(&mut header, ANCHOR_VERSION);
                f.write_all(&header).map_err(|e| unavailable(&path, e))?;
                f.sync_all().map_err(|e| unavailable(&path, e))?;
                f
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => OpenOptions::new()
                .read(true)
                .append(true)
                .open(&path)
                .map_err(|e| unavailable(&path, e))?,
            Err(e) => return Err(unavailable(&path, e)),
        };
        let records = load(&path)?;
        Ok(FileAnchorSink {
            path,
            file,
            records,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

fn load(path: &Path) -> Result<Vec<AnchorRecord>> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| unavailable(path, e))?;
    parse(&bytes).map_err(|e| Error::CorruptFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn parse(bytes: &[u8]) -> Result<Vec<AnchorRecord>> {
    let mut r = Reader::new(bytes, "anchor file");
    r.magic(ANCHOR_MAGIC, ANCHOR_VERSION)?;
    let mut out: Vec<AnchorRecord> = Vec::new();
    while r.remaining() > 0 {
        let sequence = r.u64()?;
        if sequence != out.len() as u64 {
            return Err(Error::decode(
                "anchor file",
                format!("sequence {sequence} at position {}", out.len()),
            ));
        }
        let len = r.u16()? as usize;
        let label = std::str::from_utf8(r.take(len)?)
            .map_err(|e| Error::decode("anchor file", e.to_string()))?
            .to_string();
        let digest = r.digest()?;
        let written_at_us = r.u64()?;
        out.push(AnchorRecord {
            sequence,
            label,
            digest,
            written_at_us,
        });
    }
    Ok(out)
}

impl AnchorSink for FileAnchorSink {
    fn sink_id(&self) -> String {
        format!("file:{}", self.path.display())
    }

    fn next_sequence(&self) -> u64 {
        self.records.len() as u64
    }

    fn append_at(&mut self, sequence: u64, value: Digest, label: &str) -> Result<AnchorReceipt> {
        let next = self.next_sequence();
        if sequence < next {
            let existing = &self.records[sequence as usize];
            if existing.digest != value {
                return Err(Error::SequenceConflict {
                    sequence,
                    existing: existing.digest,
                    attempted: value,
                });
            }
            return Ok(AnchorReceipt {
                sink_id: self.sink_id(),
                sequence,
                digest: existing.digest,
                label: existing.label.clone(),
                written_at_us: existing.written_at_us,
            });
        }
        if sequence > next {
            return Err(Error::SequenceGap {
                expected: next,
                got: sequence,
            });
        }
        if label.len() > u16::MAX as usize {
            return Err(Error::OversizeComponent {
                component: "anchor label",
                len: label.len(),
                max: u16::MAX as usize,
            });
        }
        let written_at_us = now_us();
        let mut rec = Vec::with_capacity(50 + label.len());
        put_u64(&mut rec, sequence);
        put_u16(&mut rec, label.len() as u16);
        rec.extend_from_slice(label.as_bytes());
        rec.extend_from_slice(value.as_bytes());
        put_u64(&mut rec, written_at_us);
        self.file
            .write_all(&rec)
            .and_then(|_| self.file.sync_data())
            .map_err(|e| unavailable(&self.path, e))?;
        self.records.push(AnchorRecord {
            sequence,
            label: label.to_string(),
            digest: value,
            written_at_us,
        });
        Ok(AnchorReceipt {
            sink_id: self.sink_id(),
            sequence,
            digest: value,
            label: label.to_string(),
            written_at_us,
        })
    }

    fn read(&self, sequence: u64) -> Result<Option<AnchorRecord>> {
        Ok(self.records()?.into_iter().nth(sequence as usize))
    }

    fn records(&self) -> Result<Vec<AnchorRecord>> {
        load(&self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_then_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csan");
        let mut sink = FileAnchorSink::open(&path).unwrap();
        let r = anchor(&mut sink, Digest([7; 32]), "chain").unwrap();
        assert_eq!(r.sequence, 0);
        assert_eq!(sink.read(0).unwrap().unwrap().digest, Digest([7; 32]));
        drop(sink);
        let again = FileAnchorSink::open(&path).unwrap();
        assert_eq!(again.read(0).unwrap().unwrap().label, "chain");
        assert_eq!(again.next_sequence(), 1);
    }

    #[test]
    fn sequences_strictly_increase() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = FileAnchorSink::open(dir.path().join("a")).unwrap();
        let a = anchor(&mut sink, Digest([1; 32]), "x").unwrap();
        let b = anchor(&mut sink, Digest([1; 32]), "x").unwrap();
        assert!(b.sequence > a.sequence);
    }

    #[test]
    fn conflicting_reanchor_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a");
        let mut sink = FileAnchorSink::open(&path).unwrap();
        anchor(&mut sink, Digest([1; 32]), "x").unwrap();
        let len = std::fs::metadata(&path).unwrap().len();
        assert!(matches!(
            sink.append_at(0, Digest([2; 32]), "x"),
            Err(Error::SequenceConflict { sequence: 0, .. })
        ));
        assert_eq!(std::fs::metadata(&path).unwrap().len(), len);
        assert_eq!(sink.append_at(0, Digest([1; 32]), "x").unwrap().sequence, 0);
        assert!(matches!(
            sink.append_at(5, Digest([2; 32]), "x"),
            Err(Error::SequenceGap {
                expected: 1,
                got: 5
            })
        ));
    }

    #[test]
    fn byte_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a");
        let mut sink = FileAnchorSink::open(&path).unwrap();
        let r = anchor(&mut sink, Digest([9; 32]), "ab").unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let mut want = b"CSAN\x00\x01".to_vec();
        want.extend_from_slice(&0u64.to_be_bytes());
        want.extend_from_slice(&[0, 2]);
        want.extend_from_slice(b"ab");
        want.extend_from_slice(&[9; 32]);
        want.extend_from_slice(&r.written_at_us.to_be_bytes());
        assert_eq!(bytes, want);
    }

    #[test]
    fn corrupt_file_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a");
        std::fs::write(&path, b"XXXX\x00\x01").unwrap();
        assert!(matches!(
            FileAnchorSink::open(&path),
            Err(Error::CorruptFile { .. })
        ));
    }

    #[test]
    fn unreachable_sink() {
        assert!(matches!(
            FileAnchorSink::open("/nonexistent-dir/for/sure/a.csan"),
            Err(Error::SinkUnavailable(_))
        ));
    }
}
