//! Line-delimited ingestion records: one JSON object per line, keys named
//! after the `Event` fields, digests as 64 lowercase hex characters and
//! binary fields as standard base64.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::{Event, Extension};
use crate::error::{Error, Result};
use crate::hash::Digest;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtensionLine {
    tag: String,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventLine {
    event_id: String,
    workflow_id: String,
    actor: String,
    timestamp: u64,
    config_digest: String,
    input_refs: Vec<String>,
    output_refs: Vec<String>,
    env_digest: String,
    prev_link: String,
    extensions: Vec<ExtensionLine>,
}

fn digest(component: &str, s: &str) -> Result<Digest> {
    if s.len() != 64 {
        return Err(Error::InvalidDigestWidth {
            component: component.to_string(),
            len: s.len() / 2,
        });
    }
    if !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(Error::decode(
            "event line",
            format!("{component}: not lowercase hex"),
        ));
    }
    Ok(Digest::from_hex(s).unwrap())
}

fn b64(component: &str, s: &str) -> Result<Vec<u8>> {
    B64.decode(s)
        .map_err(|e| Error::decode("event line", format!("{component}: {e}")))
}

/// Parses and validates one ingestion line.
pub fn event_from_line(line: &str) -> Result<Event> {
    let raw: EventLine =
        serde_json::from_str(line).map_err(|e| Error::decode("event line", e.to_string()))?;
    let refs = |name: &str, v: &[String]| -> Result<Vec<Digest>> {
        v.iter()
            .enumerate()
            .map(|(i, s)| digest(&format!("{name}[{i}]"), s))
            .collect()
    };
    let event = Event {
        event_id: b64("event_id", &raw.event_id)?,
        workflow_id: b64("workflow_id", &raw.workflow_id)?,
        actor: raw.actor,
        timestamp: raw.timestamp,
        config_digest: digest("config_digest", &raw.config_digest)?,
        input_refs: refs("input_refs", &raw.input_refs)?,
        output_refs: refs("output_refs", &raw.output_refs)?,
        env_digest: digest("env_digest", &raw.env_digest)?,
        prev_link: digest("prev_link", &raw.prev_link)?,
        extensions: raw
            .extensions
            .into_iter()
            .map(|e| {
                Ok(Extension {
                    value: b64("extensions.value", &e.value)?,
                    tag: e.tag,
                })
            })
            .collect::<Result<_>>()?,
    };
    event.validate()?;
    Ok(event)
}

/// Renders an event as a single ingestion line (no trailing newline).
pub fn event_to_line(event: &Event) -> String {
    let raw = EventLine {
        event_id: B64.encode(&event.event_id),
        workflow_id: B64.encode(&event.workflow_id),
        actor: event.actor.clone(),
        timestamp: event.timestamp,
        config_digest: event.config_digest.to_hex(),
        input_refs: event.input_refs.iter().map(Digest::to_hex).collect(),
        output_refs: event.output_refs.iter().map(Digest::to_hex).collect(),
        env_digest: event.env_digest.to_hex(),
        prev_link: event.prev_link.to_hex(),
        extensions: event
            .extensions
            .iter()
            .map(|e| ExtensionLine {
                tag: e.tag.clone(),
                value: B64.encode(&e.value),
            })
            .collect(),
    };
    serde_json::to_string(&raw).expect("event line serializes")
}
