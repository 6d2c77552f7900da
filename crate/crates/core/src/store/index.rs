use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::hash::{Digest, DIGEST_LEN};
use crate::wire::{put_u16, Reader};

use super::fixed::{Durability, FixedFile};

pub const INDEX_MAGIC: &[u8; 4] = b"CSIX";
pub const INDEX_VERSION: u16 = 1;

/// Sidecar path for a log: `<log>.idx`.
pub fn sidecar_path(log_path: &Path) -> PathBuf {
    let mut os = log_path.as_os_str().to_owned();
    os.push(".idx");
    PathBuf::from(os)
}

/// Position-indexed event digests: entry j is H(canonical_encode(E_j)) for
/// the event behind log record j.
pub struct SidecarIndex {
    inner: FixedFile,
}

impl SidecarIndex {
    pub fn create(path: impl AsRef<Path>, durability: Durability) -> Result<Self> {
        let mut header = INDEX_MAGIC.to_vec();
        put_u16(&mut header, INDEX_VERSION);
        Ok(SidecarIndex {
            inner: FixedFile::create(path.as_ref(), &header, DIGEST_LEN, durability)?,
        })
    }

    pub fn open(path: impl AsRef<Path>, durability: Durability) -> Result<Self> {
        let (inner, ()) = FixedFile::open(path.as_ref(), durability, |head| {
            let mut r = Reader::new(head, "sidecar index header");
            r.magic(INDEX_MAGIC, INDEX_VERSION)?;
            Ok((r.position(), DIGEST_LEN, ()))
        })?;
        Ok(SidecarIndex { inner })
    }

    pub fn len(&self) -> u64 {
        self.inner.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn partial_tail(&self) -> u64 {
        self.inner.partial_tail()
    }

    pub fn append(&mut self, event_digest: &Digest) -> Result<u64> {
        self.inner.append(event_digest.as_bytes())
    }

    pub fn get(&self, index: u64) -> Result<Digest> {
        let mut buf = [0u8; DIGEST_LEN];
        self.inner.read(index, &mut buf)?;
        Ok(Digest(buf))
    }

    pub fn read_range(&self, start: u64, n: u64) -> Result<Vec<Digest>> {
        Ok(self
            .inner
            .read_range(start, n)?
            .chunks_exact(DIGEST_LEN)
            .map(|c| Digest::from_slice(c).unwrap())
            .collect())
    }

    pub fn read_all(&self) -> Result<Vec<Digest>> {
        self.read_range(0, self.len())
    }

    pub fn sync(&mut self) -> Result<()> {
        self.inner.sync()
    }

    pub fn truncate_partial_tail(&mut self) -> Result<()> {
        self.inner.truncate_tail()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_get_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = sidecar_path(&dir.path().join("ev.csel"));
        assert!(path.to_string_lossy().ends_with("ev.csel.idx"));
        let mut idx = SidecarIndex::create(&path, Durability::Buffered).unwrap();
        for i in 0..5u8 {
            assert_eq!(idx.append(&Digest([i; 32])).unwrap(), i as u64);
        }
        drop(idx);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 6 + 5 * 32);
        let idx = SidecarIndex::open(&path, Durability::Sync).unwrap();
        assert_eq!(idx.get(3).unwrap(), Digest([3; 32]));
        assert_eq!(idx.read_all().unwrap().len(), 5);
        assert!(idx.get(5).is_err());
    }
}
