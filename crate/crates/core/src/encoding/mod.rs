//! Event model, canonical serialization and the per-field encoders φ_i.

mod line;
mod phi;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

pub use line::{event_from_line, event_to_line};
pub(crate) use phi::write_phi;
pub use phi::{max_phi_len, phi};

use crate::error::{Error, Result};
use crate::hash::{hash, Digest, DIGEST_LEN};
use crate::wire::{put_lp, put_u32, put_u64, Reader};

pub const MAX_ID_LEN: usize = 256;
pub const MAX_ACTOR_LEN: usize = 1024;
pub const MAX_REFS: usize = 1 << 16;
pub const MAX_EXTENSIONS: usize = 64;
pub const MAX_EXTENSION_TAG_LEN: usize = 256;
pub const MAX_EXTENSION_VALUE_LEN: usize = 4096;

/// Semantic role of an evidence field. Each role has one fixed encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldRole {
    Context,
    Inputs,
    Outputs,
    Config,
    Environment,
    Link,
    TimeActor,
    Extension,
}

impl FieldRole {
    pub const ALL: [FieldRole; 8] = [
        FieldRole::Context,
        FieldRole::Inputs,
        FieldRole::Outputs,
        FieldRole::Config,
        FieldRole::Environment,
        FieldRole::Link,
        FieldRole::TimeActor,
        FieldRole::Extension,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FieldRole::Context => "context",
            FieldRole::Inputs => "inputs",
            FieldRole::Outputs => "outputs",
            FieldRole::Config => "config",
            FieldRole::Environment => "environment",
            FieldRole::Link => "link",
            FieldRole::TimeActor => "time_actor",
            FieldRole::Extension => "extension",
        }
    }

    /// Domain-separation byte prefixed to every field message.
    pub fn tag_byte(&self) -> u8 {
        match self {
            FieldRole::Context => 0x01,
            FieldRole::Inputs => 0x02,
            FieldRole::Outputs => 0x03,
            FieldRole::Config => 0x04,
            FieldRole::Environment => 0x05,
            FieldRole::Link => 0x06,
            FieldRole::TimeActor => 0x07,
            FieldRole::Extension => 0x08,
        }
    }
}

impl FromStr for FieldRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FieldRole::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown field role {s:?}")))
    }
}

impl fmt::Display for FieldRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Extension {
    pub tag: String,
    pub value: Vec<u8>,
}

/// A structured workflow event. Large inputs and outputs enter only as
/// pre-computed digests.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub event_id: Vec<u8>,
    pub workflow_id: Vec<u8>,
    pub actor: String,
    /// Microseconds since the Unix epoch, supplied by the caller.
    pub timestamp: u64,
    pub config_digest: Digest,
    pub input_refs: Vec<Digest>,
    pub output_refs: Vec<Digest>,
    /// Opaque environment digest, e.g. H(measurement ∥ config) from a TEE.
    pub env_digest: Digest,
    /// Prior audit state; all-zero when there is none.
    pub prev_link: Digest,
    pub extensions: Vec<Extension>,
}

fn bounded(component: &'static str, len: usize, max: usize) -> Result<()> {
    if len > max {
        return Err(Error::OversizeComponent {
            component,
            len,
            max,
        });
    }
    Ok(())
}

impl Event {
    pub fn validate(&self) -> Result<()> {
        for (component, id) in [
            ("event_id", &self.event_id),
            ("workflow_id", &self.workflow_id),
        ] {
            if id.is_empty() {
                return Err(Error::EmptyComponent { component });
            }
            bounded(component, id.len(), MAX_ID_LEN)?;
        }
        bounded("actor", self.actor.len(), MAX_ACTOR_LEN)?;
        bounded("input_refs", self.input_refs.len(), MAX_REFS)?;
        bounded("output_refs", self.output_refs.len(), MAX_REFS)?;
        bounded("extensions", self.extensions.len(), MAX_EXTENSIONS)?;
        let mut tags = HashSet::with_capacity(self.extensions.len());
        for ext in &self.extensions {
            bounded("extension tag", ext.tag.len(), MAX_EXTENSION_TAG_LEN)?;
            bounded("extension value", ext.value.len(), MAX_EXTENSION_VALUE_LEN)?;
            if !tags.insert(ext.tag.as_str()) {
                return Err(Error::DuplicateExtensionTag(ext.tag.clone()));
            }
        }
        Ok(())
    }

    /// H(canonical_encode(self)): the content address used by the event store.
    pub fn digest(&self) -> Result<Digest> {
        Ok(hash(&canonical_encode(self)?))
    }
}

pub(crate) fn write_digests(out: &mut Vec<u8>, refs: &[Digest]) {
    put_u32(out, refs.len() as u32);
    for r in refs {
        out.extend_from_slice(r.as_bytes());
    }
}

pub(crate) fn write_extensions(out: &mut Vec<u8>, exts: &[Extension]) {
    put_u32(out, exts.len() as u32);
    for e in exts {
        put_lp(out, e.tag.as_bytes());
        put_lp(out, &e.value);
    }
}

/// Deterministic, injective serialization of an event. Variable-length
/// components carry a 4-byte big-endian length, lists a 4-byte count.
pub fn canonical_encode(event: &Event) -> Result<Vec<u8>> {
    event.validate()?;
    let mut out = Vec::with_capacity(
        64 + event.actor.len()
            + (event.input_refs.len() + event.output_refs.len() + 3) * DIGEST_LEN,
    );
    put_lp(&mut out, &event.event_id);
    put_lp(&mut out, &event.workflow_id);
    put_lp(&mut out, event.actor.as_bytes());
    put_u64(&mut out, event.timestamp);
    out.extend_from_slice(event.config_digest.as_bytes());
    write_digests(&mut out, &event.input_refs);
    write_digests(&mut out, &event.output_refs);
    out.extend_from_slice(event.env_digest.as_bytes());
    out.extend_from_slice(event.prev_link.as_bytes());
    write_extensions(&mut out, &event.extensions);
    Ok(out)
}

fn read_digests(r: &mut Reader<'_>) -> Result<Vec<Digest>> {
    let n = r.u32()? as usize;
    if n > MAX_REFS {
        return Err(Error::OversizeComponent {
            component: "refs",
            len: n,
            max: MAX_REFS,
        });
    }
    (0..n).map(|_| r.digest()).collect()
}

/// Inverse of [`canonical_encode`]; rejects trailing bytes and any event
/// that would fail validation.
pub fn canonical_decode(bytes: &[u8]) -> Result<Event> {
    let mut r = Reader::new(bytes, "event");
    let event_id = r.lp(MAX_ID_LEN)?.to_vec();
    let workflow_id = r.lp(MAX_ID_LEN)?.to_vec();
    let actor = r.lp_str(MAX_ACTOR_LEN)?.to_string();
    let timestamp = r.u64()?;
    let config_digest = r.digest()?;
    let input_refs = read_digests(&mut r)?;
    let output_refs = read_digests(&mut r)?;
    let env_digest = r.digest()?;
    let prev_link = r.digest()?;
    let n = r.u32()? as usize;
    bounded("extensions", n, MAX_EXTENSIONS)?;
    let mut extensions = Vec::with_capacity(n);
    for _ in 0..n {
        let tag = r.lp_str(MAX_EXTENSION_TAG_LEN)?.to_string();
        let value = r.lp(MAX_EXTENSION_VALUE_LEN)?.to_vec();
        extensions.push(Extension { tag, value });
    }
    r.finish()?;
    let event = Event {
        event_id,
        workflow_id,
        actor,
        timestamp,
        config_digest,
        input_refs,
        output_refs,
        env_digest,
        prev_link,
        extensions,
    };
    event.validate()?;
    Ok(event)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn golden_event() -> Event {
        Event {
            event_id: b"evt-0001".to_vec(),
            workflow_id: b"trial-42".to_vec(),
            actor: "alice@site-3".to_string(),
            timestamp: 1_700_000_000_000_000,
            config_digest: Digest([0x11; 32]),
            input_refs: vec![Digest([0x21; 32]), Digest([0x22; 32])],
            output_refs: vec![Digest([0x31; 32])],
            env_digest: Digest([0x41; 32]),
            prev_link: Digest::ZERO,
            extensions: vec![Extension {
                tag: "policy".to_string(),
                value: b"v7".to_vec(),
            }],
        }
    }

    #[test]
    fn golden_canonical_bytes() {
        // Layout assembled by hand from the framing rules.
        let mut want = Vec::new();
        want.extend_from_slice(&[0, 0, 0, 8]);
        want.extend_from_slice(b"evt-0001");
        want.extend_from_slice(&[0, 0, 0, 8]);
        want.extend_from_slice(b"trial-42");
        want.extend_from_slice(&[0, 0, 0, 12]);
        want.extend_from_slice(b"alice@site-3");
        want.extend_from_slice(&1_700_000_000_000_000u64.to_be_bytes());
        want.extend_from_slice(&[0x11; 32]);
        want.extend_from_slice(&[0, 0, 0, 2]);
        want.extend_from_slice(&[0x21; 32]);
        want.extend_from_slice(&[0x22; 32]);
        want.extend_from_slice(&[0, 0, 0, 1]);
        want.extend_from_slice(&[0x31; 32]);
        want.extend_from_slice(&[0x41; 32]);
        want.extend_from_slice(&[0; 32]);
        want.extend_from_slice(&[0, 0, 0, 1, 0, 0, 0, 6]);
        want.extend_from_slice(b"policy");
        want.extend_from_slice(&[0, 0, 0, 2]);
        want.extend_from_slice(b"v7");
        let got = canonical_encode(&golden_event()).unwrap();
        assert_eq!(got, want);
        assert_eq!(
            hex::encode(&got),
            include_str!("../../tests/data/golden_event.hex").trim()
        );
    }

    #[test]
    fn equal_events_encode_identically() {
        assert_eq!(
            canonical_encode(&golden_event()).unwrap(),
            canonical_encode(&golden_event().clone()).unwrap()
        );
    }

    #[test]
    fn one_extension_byte_changes_encoding() {
        let mut e = golden_event();
        e.extensions[0].value[1] ^= 1;
        assert_ne!(
            canonical_encode(&e).unwrap(),
            canonical_encode(&golden_event()).unwrap()
        );
    }

    #[test]
    fn decode_inverts_encode() {
        let bytes = canonical_encode(&golden_event()).unwrap();
        assert_eq!(canonical_decode(&bytes).unwrap(), golden_event());
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(canonical_decode(&longer).is_err());
        assert!(canonical_decode(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn limits_enforced() {
        let mut e = golden_event();
        e.event_id = vec![1; MAX_ID_LEN + 1];
        assert!(matches!(
            canonical_encode(&e),
            Err(Error::OversizeComponent {
                component: "event_id",
                ..
            })
        ));
        let mut e = golden_event();
        e.workflow_id.clear();
        assert!(matches!(
            canonical_encode(&e),
            Err(Error::EmptyComponent {
                component: "workflow_id"
            })
        ));
        let mut e = golden_event();
        e.extensions.push(e.extensions[0].clone());
        assert!(matches!(
            canonical_encode(&e),
            Err(Error::DuplicateExtensionTag(_))
        ));
        let mut e = golden_event();
        e.input_refs = vec![Digest::ZERO; MAX_REFS + 1];
        assert!(canonical_encode(&e).is_err());
    }

    #[test]
    fn role_names_round_trip() {
        for r in FieldRole::ALL {
            assert_eq!(r.as_str().parse::<FieldRole>().unwrap(), r);
        }
        assert!("bogus".parse::<FieldRole>().is_err());
    }
}
