//! Composition of evidence items: hash chains, Merkle trees and anchoring.

pub mod anchor;
pub mod chain;
pub mod merkle;

pub use anchor::{anchor, AnchorReceipt, AnchorRecord, AnchorSink, FileAnchorSink};
pub use chain::{extend_chain, link_chain, ChainTip};
pub use merkle::{
    link_merkle, prove_inclusion, verify_inclusion, MerkleProof, MerkleRoot, MerkleTree, Side,
};
