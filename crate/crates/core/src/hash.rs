//! Suite hash (SHA-256) and the λ-bit digest type.
//!
//! Every call through [`hash`] or [`hash_parts`] bumps a per-thread counter so
//! that cost claims ("k hashes per generate") are testable directly.

use std::cell::Cell;
use std::fmt;

use sha2::{Digest as _, Sha256};

/// Field width in bytes for suite v1 (λ = 256 bits).
pub const DIGEST_LEN: usize = 32;

/// A λ-bit string: evidence field, chain tip, Merkle node or fingerprint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Digest> {
        <[u8; DIGEST_LEN]>::try_from(bytes).ok().map(Digest)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0u8; DIGEST_LEN]
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Parses exactly 64 lowercase or uppercase hex characters.
    pub fn from_hex(s: &str) -> Option<Digest> {
        if s.len() != DIGEST_LEN * 2 {
            return None;
        }
        let mut out = [0u8; DIGEST_LEN];
        hex::decode_to_slice(s, &mut out).ok()?;
        Some(Digest(out))
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl From<[u8; DIGEST_LEN]> for Digest {
    fn from(bytes: [u8; DIGEST_LEN]) -> Self {
        Digest(bytes)
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

thread_local! {
    static HASH_CALLS: Cell<u64> = const { Cell::new(0) };
}

fn bump() {
    HASH_CALLS.with(|c| c.set(c.get() + 1));
}

/// H(data). Counts as one hash evaluation.
pub fn hash(data: &[u8]) -> Digest {
    bump();
    Digest(Sha256::digest(data).into())
}

/// H(p_0 ∥ p_1 ∥ …) without materializing the concatenation. Counts as one
/// hash evaluation.
pub fn hash_parts(parts: &[&[u8]]) -> Digest {
    bump();
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    Digest(h.finalize().into())
}

/// Total suite-hash evaluations performed on the calling thread so far.
pub fn hash_calls() -> u64 {
    HASH_CALLS.with(|c| c.get())
}

/// Measures hash evaluations on the current thread between `start` and
/// `count`.
#[derive(Debug, Clone, Copy)]
pub struct HashCounter {
    start: u64,
}

impl HashCounter {
    pub fn start() -> Self {
        HashCounter {
            start: hash_calls(),
        }
    }

    pub fn count(&self) -> u64 {
        hash_calls() - self.start
    }
}
