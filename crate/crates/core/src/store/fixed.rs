//! Header + fixed-size records, shared by the evidence log and sidecar index.

use std::fs::{File, OpenOptions};
use std::io::{ErrorKind, Read, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Whether each append is flushed to stable storage before returning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Durability {
    #[default]
    Sync,
    /// Appends reach the OS only; call `sync` explicitly. Benchmark mode.
    Buffered,
}

pub(crate) struct FixedFile {
    path: PathBuf,
    file: File,
    header_len: u64,
    record_size: u64,
    count: u64,
    tail: u64,
    durability: Durability,
}

impl FixedFile {
    pub(crate) fn create(
        path: &Path,
        header: &[u8],
        record_size: usize,
        durability: Durability,
    ) -> Result<FixedFile> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create_new(true)
            .open(path)?;
        file.write_all(header)?;
        file.sync_all()?;
        Ok(FixedFile {
            path: path.to_path_buf(),
            file,
            header_len: header.len() as u64,
            record_size: record_size as u64,
            count: 0,
            tail: 0,
            durability,
        })
    }

    /// Opens an existing file. `parse_header` receives the leading bytes
    /// and returns `(header_len, record_size, extra)`.
    pub(crate) fn open<T>(
        path: &Path,
        durability: Durability,
        parse_header: impl FnOnce(&[u8]) -> Result<(usize, usize, T)>,
    ) -> Result<(FixedFile, T)> {
        let mut file = OpenOptions::new().read(true).append(true).open(path)?;
        let len = file.metadata()?.len();
        let mut head = vec![0u8; len.min(16 * 1024) as usize];
        file.read_exact(&mut head)?;
        let (header_len, record_size, extra) =
            parse_header(&head).map_err(|e| Error::CorruptFile {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
        let body = len - header_len as u64;
        let record_size = record_size as u64;
        Ok((
            FixedFile {
                path: path.to_path_buf(),
                file,
                header_len: header_len as u64,
                record_size,
                count: body / record_size,
                tail: body % record_size,
                durability,
            },
            extra,
        ))
    }

    pub(crate) fn path(&self) -> &Path {
        &self.path
    }

    pub(crate) fn count(&self) -> u64 {
        self.count
    }

    pub(crate) fn header_len(&self) -> u64 {
        self.header_len
    }

    pub(crate) fn record_size(&self) -> u64 {
        self.record_size
    }

    pub(crate) fn partial_tail(&self) -> u64 {
        self.tail
    }

    pub(crate) fn append(&mut self, record: &[u8]) -> Result<u64> {
        debug_assert_eq!(record.len() as u64, self.record_size);
        if self.tail != 0 {
            return Err(Error::CorruptRecord(self.count));
        }
        self.file.write_all(record)?;
        if self.durability == Durability::Sync {
            self.file.sync_data()?;
        }
        self.count += 1;
        Ok(self.count - 1)
    }

    pub(crate) fn read(&self, index: u64, buf: &mut [u8]) -> Result<()> {
        if index >= self.count {
            if index == self.count && self.tail != 0 {
                return Err(Error::CorruptRecord(index));
            }
            return Err(Error::IndexOutOfRange {
                index,
                len: self.count,
            });
        }
        let off = self.header_len + index * self.record_size;
        match self.file.read_exact_at(buf, off) {
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => Err(Error::CorruptRecord(index)),
            other => Ok(other?),
        }
    }

    /// Reads records `[start, start + n)` into one buffer.
    pub(crate) fn read_range(&self, start: u64, n: u64) -> Result<Vec<u8>> {
        if start + n > self.count {
            return Err(Error::IndexOutOfRange {
                index: start + n,
                len: self.count,
            });
        }
        let mut buf = vec![0u8; (n * self.record_size) as usize];
        self.file
            .read_exact_at(&mut buf, self.header_len + start * self.record_size)?;
        Ok(buf)
    }

    pub(crate) fn sync(&mut self) -> Result<()> {
        self.file.sync_data()?;
        Ok(())
    }

    /// Drops a trailing partial record left by an interrupted append.
    pub(crate) fn truncate_tail(&mut self) -> Result<()> {
        if self.tail != 0 {
            self.file
                .set_len(self.header_len + self.count * self.record_size)?;
            self.file.sync_all()?;
            self.tail = 0;
        }
        Ok(())
    }
}
