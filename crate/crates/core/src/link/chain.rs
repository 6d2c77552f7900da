use crate::error::{Error, Result};
use crate::hash::{hash_parts, Digest};
use crate::item::EvidenceItem;
use crate::params::Params;

/// ℓ_n and n. The empty chain is (0^λ, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ChainTip {
    pub tip: Digest,
    pub length: u64,
}

impl ChainTip {
    pub const EMPTY: ChainTip = ChainTip {
        tip: Digest::ZERO,
        length: 0,
    };

    /// The zero-length invariant: length 0 exactly when tip is all-zero.
    /// A non-empty chain reaching 0^λ would need a SHA-256 preimage.
    pub fn is_well_formed(&self) -> bool {
        (self.length == 0) == self.tip.is_zero()
    }
}

/// ℓ_{n+1} = H(ℓ_n ∥ item bytes). One hash evaluation.
pub fn extend_chain(params: &Params, tip: ChainTip, item: &EvidenceItem) -> Result<ChainTip> {
    let bytes = item.serialize(params)?;
    let length = tip.length.checked_add(1).ok_or(Error::LengthOverflow)?;
    Ok(ChainTip {
        tip: hash_parts(&[tip.tip.as_bytes(), &bytes]),
        length,
    })
}

/// Left fold of [`extend_chain`] from [`ChainTip::EMPTY`]; n hashes.
pub fn link_chain<'a>(
    params: &Params,
    items: impl IntoIterator<Item = &'a EvidenceItem>,
) -> Result<ChainTip> {
    items
        .into_iter()
        .try_fold(ChainTip::EMPTY, |tip, item| extend_chain(params, tip, item))
}
