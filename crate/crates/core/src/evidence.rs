//! Hash-and-sign generation, verification and batch verification.

use std::fmt;

use rayon::prelude::*;

use crate::encoding::{write_phi, Event};
use crate::error::{Error, Result};
use crate::hash::{hash, Digest};
use crate::item::{EvidenceItem, SignedEvidence};
use crate::keys::{KeyPair, PublicKey};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// First field (in index order) whose recomputed hash differs.
    FieldMismatch(usize),
    BadSignature,
    Malformed,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::FieldMismatch(i) => write!(f, "field_mismatch({i})"),
            RejectReason::BadSignature => f.write_str("bad_signature"),
            RejectReason::Malformed => f.write_str("malformed"),
        }
    }
}

/// Verification result. An accept never carries a reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerifyOutcome {
    Accept,
    Reject(RejectReason),
}

impl VerifyOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            VerifyOutcome::Accept => Verdict::Accept,
            VerifyOutcome::Reject(_) => Verdict::Reject,
        }
    }

    pub fn reject_reason(&self) -> Option<RejectReason> {
        match self {
            VerifyOutcome::Accept => None,
            VerifyOutcome::Reject(r) => Some(*r),
        }
    }

    pub fn is_accept(&self) -> bool {
        matches!(self, VerifyOutcome::Accept)
    }
}

fn compute_fields(params: &Params, event: &Event) -> Vec<Digest> {
    let mut buf = Vec::with_capacity(256);
    (0..params.field_count())
        .map(|i| {
            write_phi(params, i, event, &mut buf);
            hash(&buf)
        })
        .collect()
}

fn signing_payload(params: &Params, item: &EvidenceItem) -> Vec<u8> {
    let mut msg = Vec::with_capacity(32 + params.item_size());
    msg.extend_from_slice(params.digest().as_bytes());
    for f in item.fields() {
        msg.extend_from_slice(f.as_bytes());
    }
    msg
}

/// f_i = H(φ_i(E)) for every index, then σ = Sign(params_digest ∥ item).
/// Exactly k suite-hash evaluations and one signature.
pub fn generate_evidence(
    params: &Params,
    keypair: &KeyPair,
    event: &Event,
) -> Result<SignedEvidence> {
    event.validate()?;
    let item = EvidenceItem::new(compute_fields(params, event));
    let signature = keypair.sign(&signing_payload(params, &item));
    Ok(SignedEvidence {
        item,
        signature,
        signer_fingerprint: keypair.fingerprint(),
        params_digest: params.digest(),
    })
}

fn precheck(params: &Params, event: &Event, signed: &SignedEvidence) -> bool {
    signed.item.len() == params.field_count()
        && signed.params_digest == params.digest()
        && event.validate().is_ok()
}

/// A record naming a different signer counts as a signature failure.
fn signature_ok(params: &Params, public_key: &PublicKey, signed: &SignedEvidence) -> bool {
    signed.signer_fingerprint == public_key.fingerprint()
        && public_key.verify(&signing_payload(params, &signed.item), &signed.signature)
}

/// Recomputes every field in index order, rejecting at the first mismatch,
/// then checks the signature. Never errors: malformed input is a reject.
pub fn verify_evidence(
    params: &Params,
    public_key: &PublicKey,
    event: &Event,
    signed: &SignedEvidence,
) -> VerifyOutcome {
    if !precheck(params, event, signed) {
        return VerifyOutcome::Reject(RejectReason::Malformed);
    }
    let mut buf = Vec::with_capacity(256);
    for (i, stored) in signed.item.fields().iter().enumerate() {
        write_phi(params, i, event, &mut buf);
        if hash(&buf) != *stored {
            return VerifyOutcome::Reject(RejectReason::FieldMismatch(i));
        }
    }
    if !signature_ok(params, public_key, signed) {
        return VerifyOutcome::Reject(RejectReason::BadSignature);
    }
    VerifyOutcome::Accept
}

/// Same as [`verify_evidence`] but takes raw public-key bytes; an
/// unparseable key is `Reject(Malformed)`. Parsing the key costs one extra
/// hash (its fingerprint).
pub fn verify_evidence_raw(
    params: &Params,
    public_key: &[u8],
    event: &Event,
    signed: &SignedEvidence,
) -> VerifyOutcome {
    match PublicKey::from_bytes(public_key) {
        Ok(pk) => verify_evidence(params, &pk, event, signed),
        Err(_) => VerifyOutcome::Reject(RejectReason::Malformed),
    }
}

/// Forensic verification: every field is checked, and the signature is
/// checked regardless of field results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullScan {
    pub mismatched_fields: Vec<usize>,
    pub signature_valid: bool,
    pub malformed: bool,
}

impl FullScan {
    /// Verdict consistent with [`verify_evidence`].
    pub fn outcome(&self) -> VerifyOutcome {
        if self.malformed {
            VerifyOutcome::Reject(RejectReason::Malformed)
        } else if let Some(&i) = self.mismatched_fields.first() {
            VerifyOutcome::Reject(RejectReason::FieldMismatch(i))
        } else if !self.signature_valid {
            VerifyOutcome::Reject(RejectReason::BadSignature)
        } else {
            VerifyOutcome::Accept
        }
    }
}

pub fn verify_evidence_full_scan(
    params: &Params,
    public_key: &PublicKey,
    event: &Event,
    signed: &SignedEvidence,
) -> FullScan {
    if !precheck(params, event, signed) {
        return FullScan {
            mismatched_fields: Vec::new(),
            signature_valid: false,
            malformed: true,
        };
    }
    let fresh = compute_fields(params, event);
    FullScan {
        mismatched_fields: fresh
            .iter()
            .zip(signed.item.fields())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect(),
        signature_valid: signature_ok(params, public_key, signed),
        malformed: false,
    }
}

/// One entry of a verification batch.
#[derive(Debug, Clone, Copy)]
pub struct BatchEntry<'a> {
    pub public_key: &'a PublicKey,
    pub event: &'a Event,
    pub signed: &'a SignedEvidence,
}

/// Degree-of-parallelism hint for batch work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// All available cores.
    #[default]
    Available,
    Threads(usize),
}

impl Parallelism {
    pub fn threads(&self) -> usize {
        match self {
            Parallelism::Available => std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            Parallelism::Threads(n) => (*n).max(1),
        }
    }

    /// Runs `op` on a pool of the hinted size (inline when the hint is 1).
    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> Result<R> {
        let n = self.threads();
        if n == 1 {
            return Ok(op());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Storage(std::io::Error::other(e)))?;
        Ok(pool.install(op))
    }
}

/// Verdicts positionally aligned with `entries`, identical to mapping
/// [`verify_evidence`] sequentially regardless of `parallelism`.
pub fn verify_batch(
    params: &Params,
    entries: &[BatchEntry<'_>],
    parallelism: Parallelism,
) -> Vec<VerifyOutcome> {
    let run = || {
        entries
            .par_iter()
            .map(|e| verify_evidence(params, e.public_key, e.event, e.signed))
            .collect::<Vec<_>>()
    };
    match parallelism.install(run) {
        Ok(v) => v,
        // Pool construction failed (thread spawn refused): verify inline.
        Err(_) => entries
            .iter()
            .map(|e| verify_evidence(params, e.public_key, e.event, e.signed))
            .collect(),
    }
}
