use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use crate::encoding::{canonical_decode, canonical_encode, Event};
use crate::error::{Error, Result};
use crate::hash::{hash, Digest};

use super::fixed::Durability;

/// Content-addressed event store: `<root>/<hex[0..2]>/<hex[2..4]>/<hex>`
/// holds the canonical bytes of the event whose digest is `hex`.
pub struct EventStore {
    root: PathBuf,
    durability: Durability,
}

impl EventStore {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl AsRef<Path>, durability: Durability) -> Result<Self> {
        fs::create_dir_all(root.as_ref())?;
        Ok(EventStore {
            root: root.as_ref().to_path_buf(),
            durability,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, digest: &Digest) -> PathBuf {
        let h = digest.to_hex();
        self.root.join(&h[0..2]).join(&h[2..4]).join(h)
    }

    pub fn contains(&self, digest: &Digest) -> bool {
        self.path_for(digest).is_file()
    }

    /// Stores `event`; returns its digest and whether it was newly written.
    pub fn put(&self, event: &Event) -> Result<(Digest, bool)> {
        let bytes = canonical_encode(event)?;
        let digest = hash(&bytes);
        let path = self.path_for(&digest);
        if path.is_file() {
            return Ok((digest, false));
        }
        let dir = path.parent().unwrap();
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{}.tmp", digest.to_hex()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            if self.durability == Durability::Sync {
                f.sync_all()?;
            }
        }
        fs::rename(&tmp, &path)?;
        Ok((digest, true))
    }

    /// Loads and re-verifies the event stored under `digest`.
    pub fn get(&self, digest: &Digest) -> Result<Option<Event>> {
        let path = self.path_for(digest);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |reason: String| Error::CorruptFile {
            path: path.display().to_string(),
            reason,
        };
        if hash(&bytes) != *digest {
            return Err(corrupt("content does not match its address".into()));
        }
        canonical_decode(&bytes)
            .map(Some)
            .map_err(|e| corrupt(e.to_string()))
    }
}
