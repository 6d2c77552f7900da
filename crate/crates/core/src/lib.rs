//! Constant-size cryptographic evidence for auditable workflows.
//!
//! Each workflow [`Event`] is committed to by an [`EvidenceItem`] of exactly
//! k fields of 256 bits, f_i = H(φ_i(E)), signed with Ed25519 over
//! `params_digest ∥ item`. Items compose into hash chains and Merkle trees
//! whose tips and roots can be anchored in an append-only sink, and are
//! stored as fixed-size records in an [`store::EvidenceLog`].
//!
//! ```
//! use csev::{generate_evidence, verify_evidence, KeyPair, Params};
//! # use csev::bench::SyntheticWorkload;
//! let params = Params::with_default_roles(8).unwrap();
//! let keys = KeyPair::from_seed(&[7; 32]);
//! let event = SyntheticWorkload::new(1, 64).next_event();
//! let signed = generate_evidence(&params, &keys, &event).unwrap();
//! assert_eq!(signed.item.serialize(&params).unwrap().len(), 256);
//! assert!(verify_evidence(&params, keys.public_key(), &event, &signed).is_accept());
//! ```

pub mod bench;
pub mod encoding;
pub mod error;
pub mod evidence;
pub mod hash;
pub mod item;
pub mod keys;
pub mod link;
pub mod params;
pub mod store;
mod wire;

pub use encoding::{canonical_encode, phi, Event, Extension, FieldRole};
pub use error::{Error, Result};
pub use evidence::{
    generate_evidence, verify_batch, verify_evidence, BatchEntry, Parallelism, RejectReason,
    Verdict, VerifyOutcome,
};
pub use hash::{hash, Digest, HashCounter};
pub use item::{serialize_item, EvidenceItem, SignedEvidence};
pub use keys::{KeyPair, PublicKey};
pub use params::{default_roles, Params, SuiteId};
