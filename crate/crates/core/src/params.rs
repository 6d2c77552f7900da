//! Public parameters: field count, field width, role registry and suite.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::encoding::FieldRole;
use crate::error::{Error, Result};
use crate::hash::{hash, Digest, DIGEST_LEN};
use crate::wire::{put_lp, put_u16, Reader};

pub const PARAMS_MAGIC: &[u8; 4] = b"CSEV";
pub const PARAMS_VERSION: u16 = 1;

pub const MIN_FIELDS: usize = 1;
pub const MAX_FIELDS: usize = 64;
pub const DEFAULT_FIELDS: usize = 8;

/// Ed25519 signature length under suite v1.
pub const SIGNATURE_LEN: usize = 64;

const MAX_LABEL: usize = 64;

/// Hash + signature suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    /// SHA-256 + Ed25519, λ = 256.
    V1,
}

impl SuiteId {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteId::V1 => "v1",
        }
    }

    pub fn field_bits(&self) -> usize {
        match self {
            SuiteId::V1 => DIGEST_LEN * 8,
        }
    }

    pub fn signature_len(&self) -> usize {
        match self {
            SuiteId::V1 => SIGNATURE_LEN,
        }
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" => Ok(SuiteId::V1),
            other => Err(Error::UnsupportedSuite(other.to_string())),
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Role assignment used when the caller does not supply one: the eight
/// canonical roles in order, then `extension` for every index past 8.
pub fn default_roles(field_count: usize) -> Vec<FieldRole> {
    const BASE: [FieldRole; 8] = [
        FieldRole::Context,
        FieldRole::Inputs,
        FieldRole::Outputs,
        FieldRole::Config,
        FieldRole::Environment,
        FieldRole::Link,
        FieldRole::TimeActor,
        FieldRole::Extension,
    ];
    (0..field_count)
        .map(|i| BASE.get(i).copied().unwrap_or(FieldRole::Extension))
        .collect()
}

/// Immutable public parameters. Construct with [`Params::setup`] or
/// [`Params::from_bytes`]; the digest is always recomputed, never trusted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    roles: Vec<FieldRole>,
    suite: SuiteId,
    encoded: Vec<u8>,
    digest: Digest,
}

impl Params {
    pub fn setup(field_count: usize, suite_id: &str, field_roles: &[FieldRole]) -> Result<Params> {
        let suite: SuiteId = suite_id.parse()?;
        if !(MIN_FIELDS..=MAX_FIELDS).contains(&field_count) {
            return Err(Error::InvalidFieldCount(field_count));
        }
        if field_roles.len() != field_count {
            return Err(Error::RoleCountMismatch {
                expected: field_count,
                got: field_roles.len(),
            });
        }
        let mut seen = HashSet::new();
        for role in field_roles {
            // extension is the overflow role and may repeat; the index byte
            // in each field message keeps repeated extension fields distinct.
            if *role != FieldRole::Extension && !seen.insert(*role) {
                return Err(Error::DuplicateRole(*role));
            }
        }
        let encoded = encode(field_count, suite, field_roles);
        let digest = hash(&encoded);
        Ok(Params {
            roles: field_roles.to_vec(),
            suite,
            encoded,
            digest,
        })
    }

    /// `setup` with [`default_roles`] and suite v1.
    pub fn with_default_roles(field_count: usize) -> Result<Params> {
        Params::setup(
            field_count,
            SuiteId::V1.as_str(),
            &default_roles(field_count),
        )
    }

    /// Parses a serialization produced by [`Params::to_bytes`] from the
    /// front of `bytes`, returning the params and the number of bytes used.
    pub fn decode_prefix(bytes: &[u8]) -> Result<(Params, usize)> {
        let mut r = Reader::new(bytes, "params");
        r.magic(PARAMS_MAGIC, PARAMS_VERSION)?;
        let k = r.u8()? as usize;
        let width = r.u16()? as usize;
        let suite: SuiteId = r.lp_str(MAX_LABEL)?.parse()?;
        if width * 8 != suite.field_bits() {
            return Err(Error::InvalidParams(format!(
                "field width {width} bytes does not match suite {suite}"
            )));
        }
        let mut roles = Vec::with_capacity(k);
        for _ in 0..k {
            roles.push(r.lp_str(MAX_LABEL)?.parse::<FieldRole>()?);
        }
        let used = r.position();
        let params = Params::setup(k, suite.as_str(), &roles)?;
        debug_assert_eq!(params.encoded, bytes[..used]);
        Ok((params, used))
    }

    /// Parses a complete params serialization; trailing bytes are an error.
    pub fn from_bytes(bytes: &[u8]) -> Result<Params> {
        let (p, used) = Params::decode_prefix(bytes)?;
        if used != bytes.len() {
            return Err(Error::InvalidParams(format!(
                "{} trailing bytes",
                bytes.len() - used
            )));
        }
        Ok(p)
    }

    pub fn to_bytes(&self) -> &[u8] {
        &self.encoded
    }

    pub fn field_count(&self) -> usize {
        self.roles.len()
    }

    pub fn field_bits(&self) -> usize {
        self.suite.field_bits()
    }

    pub fn field_bytes(&self) -> usize {
        self.field_bits() / 8
    }

    pub fn field_roles(&self) -> &[FieldRole] {
        &self.roles
    }

    pub fn role(&self, index: usize) -> Option<FieldRole> {
        self.roles.get(index).copied()
    }

    pub fn suite(&self) -> SuiteId {
        self.suite
    }

    pub fn digest(&self) -> Digest {
        self.digest
    }

    /// k·λ/8: the serialized size of one evidence item.
    pub fn item_size(&self) -> usize {
        self.field_count() * self.field_bytes()
    }

    /// Item ∥ signature ∥ signer fingerprint.
    pub fn record_size(&self) -> usize {
        self.item_size() + self.suite.signature_len() + DIGEST_LEN
    }
}

fn encode(k: usize, suite: SuiteId, roles: &[FieldRole]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + roles.len() * 12);
    out.extend_from_slice(PARAMS_MAGIC);
    put_u16(&mut out, PARAMS_VERSION);
    out.push(k as u8);
    put_u16(&mut out, (suite.field_bits() / 8) as u16);
    put_lp(&mut out, suite.as_str().as_bytes());
    for role in roles {
        put_lp(&mut out, role.as_str().as_bytes());
    }
    out
}
