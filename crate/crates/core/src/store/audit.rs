use crate::error::{Error, Result};
use crate::evidence::{verify_batch, BatchEntry, Parallelism, RejectReason, VerifyOutcome};
use crate::keys::PublicKey;
use crate::link::chain::{extend_chain, ChainTip};
use crate::link::merkle::{leaf_hash, MerkleRoot, MerkleTree};
use crate::params::Params;

use super::{EventStore, EvidenceLog, SidecarIndex};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// One verdict per complete record, by index.
    pub verdicts: Vec<VerifyOutcome>,
    pub chain: ChainTip,
    /// `None` for an empty log.
    pub merkle: Option<MerkleRoot>,
    /// Stray bytes after the last complete record.
    pub partial_tail: u64,
}

impl AuditReport {
    pub fn all_accept(&self) -> bool {
        self.verdicts.iter().all(VerifyOutcome::is_accept)
    }

    pub fn rejections(&self) -> impl Iterator<Item = (u64, RejectReason)> + '_ {
        self.verdicts
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.reject_reason().map(|r| (i as u64, r)))
    }
}

/// Verifies every record against the event its sidecar entry names, and
/// recomputes the chain tip and Merkle root over all items.
pub fn audit_scan(
    params: &Params,
    public_key: &PublicKey,
    log: &EvidenceLog,
    index: &SidecarIndex,
    events: &EventStore,
    parallelism: Parallelism,
) -> Result<AuditReport> {
    if log.params().digest() != params.digest() {
        return Err(Error::ParamsMismatch {
            expected: params.digest(),
            got: log.params().digest(),
        });
    }
    let total = log.record_count();
    if index.len() < total {
        return Err(Error::MissingEvent(index.len()));
    }
    let mut verdicts = Vec::with_capacity(total as usize);
    let mut chain = ChainTip::EMPTY;
    let mut leaves = Vec::with_capacity(total as usize);
    let mut start = 0;
    while start < total {
        let n = CHUNK.min(total - start);
        let records = log.read_range(start, n)?;
        let digests = index.read_range(start, n)?;
        let loaded = digests
            .iter()
            .enumerate()
            .map(|(j, d)| events.get(d)?.ok_or(Error::MissingEvent(start + j as u64)))
            .collect::<Result<Vec<_>>>()?;
        let entries: Vec<_> = records
            .iter()
            .zip(&loaded)
            .map(|(signed, event)| BatchEntry {
                public_key,
                event,
                signed,
            })
            .collect();
        verdicts.extend(verify_batch(params, &entries, parallelism));
        for r in &records {
            chain = extend_chain(params, chain, &r.item)?;
            leaves.push(leaf_hash(&r.item.serialize(params)?));
        }
        start += n;
    }
    let merkle = if leaves.is_empty() {
        None
    } else {
        Some(MerkleTree::from_leaves(leaves)?.root())
    };
    Ok(AuditReport {
        verdicts,
        chain,
        merkle,
        partial_tail: log.partial_tail(),
    })
}
