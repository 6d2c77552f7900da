//! Binary Merkle tree over serialized evidence items.
//!
//! Leaves are H(0x00 ∥ item), internal nodes H(0x01 ∥ left ∥ right). Levels
//! are built bottom-up; an unpaired last node is promoted to the next level
//! unchanged. This yields the same roots as the RFC 6962 split rule.

use crate::error::{Error, Result};
use crate::evidence::Verdict;
use crate::hash::{hash_parts, Digest};
use crate::item::EvidenceItem;
use crate::params::Params;
use crate::wire::{put_u16, put_u64, Reader};

const LEAF_PREFIX: [u8; 1] = [0x00];
const NODE_PREFIX: [u8; 1] = [0x01];

pub const PROOF_MAGIC: &[u8; 4] = b"CSMP";
pub const PROOF_VERSION: u16 = 1;
const MAX_PATH: usize = 64;

pub fn leaf_hash(item_bytes: &[u8]) -> Digest {
    hash_parts(&[&LEAF_PREFIX, item_bytes])
}

pub fn node_hash(left: &Digest, right: &Digest) -> Digest {
    hash_parts(&[&NODE_PREFIX, left.as_bytes(), right.as_bytes()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MerkleRoot {
    pub root: Digest,
    pub tree_size: u64,
}

/// Which side of the running node the sibling sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleProof {
    pub leaf_index: u64,
    pub path: Vec<(Digest, Side)>,
    pub root: Digest,
    pub tree_size: u64,
}

/// All levels of a tree, leaves first. Keeps the nodes so that many proofs
/// can be produced from one build.
#[derive(Debug, Clone)]
pub struct MerkleTree {
    levels: Vec<Vec<Digest>>,
}

impl MerkleTree {
    pub fn build<'a>(
        params: &Params,
        items: impl IntoIterator<Item = &'a EvidenceItem>,
    ) -> Result<MerkleTree> {
        let leaves = items
            .into_iter()
            .map(|it| Ok(leaf_hash(&it.serialize(params)?)))
            .collect::<Result<Vec<_>>>()?;
        MerkleTree::from_leaves(leaves)
    }

    pub fn from_leaves(leaves: Vec<Digest>) -> Result<MerkleTree> {
        if leaves.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut levels = vec![leaves];
        while levels.last().unwrap().len() > 1 {
            let next = levels
                .last()
                .unwrap()
                .chunks(2)
                .map(|pair| match pair {
                    [l, r] => node_hash(l, r),
                    [single] => *single,
                    _ => unreachable!(),
                })
                .collect();
            levels.push(next);
        }
        Ok(MerkleTree { levels })
    }

    pub fn tree_size(&self) -> u64 {
        self.levels[0].len() as u64
    }

    pub fn root(&self) -> MerkleRoot {
        MerkleRoot {
            root: self.levels.last().unwrap()[0],
            tree_size: self.tree_size(),
        }
    }

    pub fn prove(&self, index: u64) -> Result<MerkleProof> {
        if index >= self.tree_size() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.tree_size(),
            });
        }
        let mut path = Vec::new();
        let mut pos = index as usize;
        for level in &self.levels[..self.levels.len() - 1] {
            if pos % 2 == 1 {
                path.push((level[pos - 1], Side::Left));
            } else if pos + 1 < level.len() {
                path.push((level[pos + 1], Side::Right));
            }
            pos /= 2;
        }
        Ok(MerkleProof {
            leaf_index: index,
            path,
            root: self.root().root,
            tree_size: self.tree_size(),
        })
    }
}

/// Root over all items; n leaf hashes plus n − 1 internal hashes.
pub fn link_merkle(params: &Params, items: &[EvidenceItem]) -> Result<MerkleRoot> {
    Ok(MerkleTree::build(params, items)?.root())
}

pub fn prove_inclusion(params: &Params, items: &[EvidenceItem], index: u64) -> Result<MerkleProof> {
    MerkleTree::build(params, items)?.prove(index)
}

/// Sibling sides a proof for `index` in a tree of `size` leaves must carry.
fn expected_sides(index: u64, size: u64) -> Vec<Side> {
    let mut sides = Vec::new();
    let (mut pos, mut len) = (index, size);
    while len > 1 {
        if pos % 2 == 1 {
            sides.push(Side::Left);
        } else if pos + 1 < len {
            sides.push(Side::Right);
        }
        pos /= 2;
        len = len.div_ceil(2);
    }
    sides
}

/// Accepts iff the proof's shape matches (leaf_index, tree_size) and folding
/// the path from the item's leaf reproduces `proof.root`.
pub fn verify_inclusion(params: &Params, item: &EvidenceItem, proof: &MerkleProof) -> Verdict {
    let Ok(bytes) = item.serialize(params) else {
        return Verdict::Reject;
    };
    if proof.tree_size == 0 || proof.leaf_index >= proof.tree_size || proof.path.len() > MAX_PATH {
        return Verdict::Reject;
    }
    let sides = expected_sides(proof.leaf_index, proof.tree_size);
    if sides.len() != proof.path.len() || sides.iter().zip(&proof.path).any(|(s, (_, p))| s != p) {
        return Verdict::Reject;
    }
    let computed = proof
        .path
        .iter()
        .fold(leaf_hash(&bytes), |acc, (sib, side)| match side {
            Side::Left => node_hash(sib, &acc),
            Side::Right => node_hash(&acc, sib),
        });
    if computed == proof.root {
        Verdict::Accept
    } else {
        Verdict::Reject
    }
}

impl MerkleProof {
    /// "CSMP" ∥ version u16 ∥ leaf_index u64 ∥ tree_size u64 ∥ root ∥
    /// path length u16 ∥ (side byte ∥ sibling)*. Side byte 0 = left, 1 = right.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(58 + self.path.len() * 33);
        out.extend_from_slice(PROOF_MAGIC);
        put_u16(&mut out, PROOF_VERSION);
        put_u64(&mut out, self.leaf_index);
        put_u64(&mut out, self.tree_size);
        out.extend_from_slice(self.root.as_bytes());
        put_u16(&mut out, self.path.len() as u16);
        for (d, side) in &self.path {
            out.push(match side {
                Side::Left => 0,
                Side::Right => 1,
            });
            out.extend_from_slice(d.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<MerkleProof> {
        let mut r = Reader::new(bytes, "merkle proof");
        r.magic(PROOF_MAGIC, PROOF_VERSION)?;
        let leaf_index = r.u64()?;
        let tree_size = r.u64()?;
        let root = r.digest()?;
        let n = r.u16()? as usize;
        if n > MAX_PATH {
            return Err(Error::decode("merkle proof", format!("path length {n}")));
        }
        let mut path = Vec::with_capacity(n);
        for _ in 0..n {
            let side = match r.u8()? {
                0 => Side::Left,
                1 => Side::Right,
                b => return Err(Error::decode("merkle proof", format!("side byte {b}"))),
            };
            path.push((r.digest()?, side));
        }
        r.finish()?;
        Ok(MerkleProof {
            leaf_index,
            path,
            root,
            tree_size,
        })
    }
}
