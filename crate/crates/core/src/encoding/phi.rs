use super::{
    write_digests, write_extensions, Event, FieldRole, MAX_ACTOR_LEN, MAX_EXTENSIONS,
    MAX_EXTENSION_TAG_LEN, MAX_EXTENSION_VALUE_LEN, MAX_ID_LEN, MAX_REFS,
};
use crate::error::{Error, Result};
use crate::hash::DIGEST_LEN;
use crate::params::Params;
use crate::wire::{put_lp, put_u64};

/// m_i = role byte ∥ index byte ∥ params_digest ∥ role payload.
pub fn phi(params: &Params, index: usize, event: &Event) -> Result<Vec<u8>> {
    if index >= params.field_count() {
        return Err(Error::IndexOutOfRange {
            index: index as u64,
            len: params.field_count() as u64,
        });
    }
    event.validate()?;
    let mut out = Vec::new();
    write_phi(params, index, event, &mut out);
    Ok(out)
}

/// Unchecked body of [`phi`]: `index < k` and a validated event are the
/// caller's responsibility. Clears `out` first.
pub(crate) fn write_phi(params: &Params, index: usize, event: &Event, out: &mut Vec<u8>) {
    let role = params.field_roles()[index];
    out.clear();
    out.push(role.tag_byte());
    out.push(index as u8);
    out.extend_from_slice(params.digest().as_bytes());
    match role {
        FieldRole::Context => {
            put_lp(out, &event.workflow_id);
            put_lp(out, &event.event_id);
        }
        FieldRole::Inputs => write_digests(out, &event.input_refs),
        FieldRole::Outputs => write_digests(out, &event.output_refs),
        FieldRole::Config => out.extend_from_slice(event.config_digest.as_bytes()),
        FieldRole::Environment => out.extend_from_slice(event.env_digest.as_bytes()),
        FieldRole::Link => out.extend_from_slice(event.prev_link.as_bytes()),
        FieldRole::TimeActor => {
            put_u64(out, event.timestamp);
            put_lp(out, event.actor.as_bytes());
        }
        FieldRole::Extension => write_extensions(out, &event.extensions),
    }
}

/// Upper bound on |φ_i(E)| over every valid event and every role.
pub fn max_phi_len() -> usize {
    let prefix = 2 + DIGEST_LEN;
    let context = 2 * (4 + MAX_ID_LEN);
    let refs = 4 + MAX_REFS * DIGEST_LEN;
    let time_actor = 8 + 4 + MAX_ACTOR_LEN;
    let ext = 4 + MAX_EXTENSIONS * (8 + MAX_EXTENSION_TAG_LEN + MAX_EXTENSION_VALUE_LEN);
    prefix
        + [context, refs, time_actor, ext, DIGEST_LEN]
            .into_iter()
            .max()
            .unwrap()
}
