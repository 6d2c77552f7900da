//! The constant-size evidence item and its signed, stored form.

use crate::error::{Error, Result};
use crate::hash::{Digest, DIGEST_LEN};
use crate::params::{Params, SIGNATURE_LEN};

/// Exactly k λ-bit fields, in the order of `Params::field_roles`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvidenceItem {
    fields: Vec<Digest>,
}

impl EvidenceItem {
    pub fn new(fields: Vec<Digest>) -> Self {
        EvidenceItem { fields }
    }

    pub fn fields(&self) -> &[Digest] {
        &self.fields
    }

    pub fn field(&self, index: usize) -> Option<&Digest> {
        self.fields.get(index)
    }

    pub fn fields_mut(&mut self) -> &mut [Digest] {
        &mut self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub(crate) fn check(&self, params: &Params) -> Result<()> {
        if self.fields.len() != params.field_count() {
            return Err(Error::MalformedItem(format!(
                "{} fields, params require {}",
                self.fields.len(),
                params.field_count()
            )));
        }
        Ok(())
    }

    /// f_0 ∥ … ∥ f_{k-1}, exactly k·λ/8 bytes.
    pub fn serialize(&self, params: &Params) -> Result<Vec<u8>> {
        self.check(params)?;
        let mut out = Vec::with_capacity(params.item_size());
        self.write_to(&mut out);
        Ok(out)
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        for f in &self.fields {
            out.extend_from_slice(f.as_bytes());
        }
    }

    pub fn deserialize(params: &Params, bytes: &[u8]) -> Result<EvidenceItem> {
        if bytes.len() != params.item_size() {
            return Err(Error::MalformedItem(format!(
                "{} bytes, params require {}",
                bytes.len(),
                params.item_size()
            )));
        }
        Ok(EvidenceItem {
            fields: bytes
                .chunks_exact(DIGEST_LEN)
                .map(|c| Digest::from_slice(c).unwrap())
                .collect(),
        })
    }
}

/// Free-function form of [`EvidenceItem::serialize`].
pub fn serialize_item(params: &Params, item: &EvidenceItem) -> Result<Vec<u8>> {
    item.serialize(params)
}

/// Evidence item, signature and signer fingerprint: the fixed-size record.
///
/// `params_digest` names the parameter set the evidence was produced under.
/// It is not part of the record bytes; a log supplies it from its header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedEvidence {
    pub item: EvidenceItem,
    pub signature: [u8; SIGNATURE_LEN],
    pub signer_fingerprint: Digest,
    pub params_digest: Digest,
}

impl SignedEvidence {
    /// item ∥ signature ∥ fingerprint, exactly `params.record_size()` bytes.
    pub fn to_record_bytes(&self, params: &Params) -> Result<Vec<u8>> {
        self.item.check(params)?;
        let mut out = Vec::with_capacity(params.record_size());
        self.item.write_to(&mut out);
        out.extend_from_slice(&self.signature);
        out.extend_from_slice(self.signer_fingerprint.as_bytes());
        debug_assert_eq!(out.len(), params.record_size());
        Ok(out)
    }

    pub fn from_record_bytes(params: &Params, bytes: &[u8]) -> Result<SignedEvidence> {
        if bytes.len() != params.record_size() {
            return Err(Error::MalformedItem(format!(
                "record has {} bytes, params require {}",
                bytes.len(),
                params.record_size()
            )));
        }
        let (item_bytes, rest) = bytes.split_at(params.item_size());
        let (sig, fp) = rest.split_at(SIGNATURE_LEN);
        Ok(SignedEvidence {
            item: EvidenceItem::deserialize(params, item_bytes)?,
            signature: sig.try_into().unwrap(),
            signer_fingerprint: Digest::from_slice(fp).unwrap(),
            params_digest: params.digest(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(k: usize) -> EvidenceItem {
        EvidenceItem::new((0..k).map(|i| Digest([i as u8; 32])).collect())
    }

    #[test]
    fn k8_serializes_to_256_bytes() {
        let p = Params::with_default_roles(8).unwrap();
        let bytes = item(8).serialize(&p).unwrap();
        assert_eq!(bytes.len(), 256);
        assert_eq!(&bytes[32..64], &[1u8; 32]);
    }

    #[test]
    fn wrong_field_count_is_malformed() {
        let p = Params::with_default_roles(8).unwrap();
        assert!(matches!(
            serialize_item(&p, &item(7)),
            Err(Error::MalformedItem(_))
        ));
        assert!(EvidenceItem::deserialize(&p, &[0u8; 255]).is_err());
    }

    #[test]
    fn item_round_trip() {
        let p = Params::with_default_roles(8).unwrap();
        let it = item(8);
        let back = EvidenceItem::deserialize(&p, &it.serialize(&p).unwrap()).unwrap();
        assert_eq!(back, it);
    }

    #[test]
    fn record_layout() {
        let p = Params::with_default_roles(8).unwrap();
        let s = SignedEvidence {
            item: item(8),
            signature: [0xAA; 64],
            signer_fingerprint: Digest([0xBB; 32]),
            params_digest: p.digest(),
        };
        let bytes = s.to_record_bytes(&p).unwrap();
        assert_eq!(bytes.len(), 352);
        assert_eq!(&bytes[256..320], &[0xAA; 64]);
        assert_eq!(&bytes[320..], &[0xBB; 32]);
        assert_eq!(SignedEvidence::from_record_bytes(&p, &bytes).unwrap(), s);
    }
}
