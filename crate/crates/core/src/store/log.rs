use std::path::Path;

use crate::error::{Error, Result};
use crate::item::SignedEvidence;
use crate::params::Params;
use crate::wire::{put_u16, Reader};

use super::fixed::{Durability, FixedFile};

pub const LOG_MAGIC: &[u8; 4] = b"CSEL";
pub const LOG_VERSION: u16 = 1;

/// `"CSEL" ∥ version u16 ∥ params serialization ∥ records`, each record
/// exactly `params.record_size()` bytes. Record j lives at
/// `header_len + j·record_size`.
pub struct EvidenceLog {
    inner: FixedFile,
    params: Params,
}

impl EvidenceLog {
    /// Creates a new, empty log; fails if `path` exists.
    pub fn create(path: impl AsRef<Path>, params: &Params, durability: Durability) -> Result<Self> {
        let mut header = LOG_MAGIC.to_vec();
        put_u16(&mut header, LOG_VERSION);
        header.extend_from_slice(params.to_bytes());
        Ok(EvidenceLog {
            inner: FixedFile::create(path.as_ref(), &header, params.record_size(), durability)?,
            params: params.clone(),
        })
    }

    pub fn open(path: impl AsRef<Path>, durability: Durability) -> Result<Self> {
        let (inner, params) = FixedFile::open(path.as_ref(), durability, |head| {
            let mut r = Reader::new(head, "evidence log header");
            r.magic(LOG_MAGIC, LOG_VERSION)?;
            let (params, used) = Params::decode_prefix(&head[r.position()..])?;
            Ok((r.position() + used, params.record_size(), params))
        })?;
        Ok(EvidenceLog { inner, params })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn path(&self) -> &Path {
        self.inner.path()
    }

    pub fn record_count(&self) -> u64 {
        self.inner.count()
    }

    pub fn header_len(&self) -> u64 {
        self.inner.header_len()
    }

    pub fn record_size(&self) -> u64 {
        self.inner.record_size()
    }

    /// Bytes of a trailing incomplete record, if an append was interrupted.
    pub fn partial_tail(&self) -> u64 {
        self.inner.partial_tail()
    }

    /// Appends one record; returns its index. The file grows by exactly
    /// `record_size` bytes.
    pub fn append_record(&mut self, signed: &SignedEvidence) -> Result<u64> {
        if signed.params_digest != self.params.digest() {
            return Err(Error::ParamsMismatch {
                expected: self.params.digest(),
                got: signed.params_digest,
            });
        }
        let bytes = signed.to_record_bytes(&self.params)?;
        self.inner.append(&bytes)
    }

    pub fn read_record(&self, index: u64) -> Result<SignedEvidence> {
        let mut buf = vec![0u8; self.params.record_size()];
        self.inner.read(index, &mut buf)?;
        SignedEvidence::from_record_bytes(&self.params, &buf)
    }

    /// Records `[start, start + n)`.
    pub fn read_range(&self, start: u64, n: u64) -> Result<Vec<SignedEvidence>> {
        let buf = self.inner.read_range(start, n)?;
        buf.chunks_exact(self.params.record_size())
            .map(|c| SignedEvidence::from_record_bytes(&self.params, c))
            .collect()
    }

    /// Every complete record.
    pub fn read_all(&self) -> Result<Vec<SignedEvidence>> {
        self.read_range(0, self.record_count())
    }

    pub fn sync(&mut self) -> Result<()> {
        self.inner.sync()
    }

    pub fn truncate_partial_tail(&mut self) -> Result<()> {
        self.inner.truncate_tail()
    }
}
