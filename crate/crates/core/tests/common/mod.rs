#![allow(dead_code)]

use csev::{Digest, Event, Extension, KeyPair, Params};

pub fn hex_file(s: &str) -> Vec<u8> {
    hex::decode(s.trim()).unwrap()
}

pub fn params8() -> Params {
    Params::with_default_roles(8).unwrap()
}

/// Seed 0x00..0x1f.
pub fn golden_keypair() -> KeyPair {
    let seed: [u8; 32] = std::array::from_fn(|i| i as u8);
    KeyPair::from_seed(&seed)
}

pub fn golden_event() -> Event {
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

use proptest::prelude::*;
use rand::{Rng, RngCore};

fn arb_digest() -> impl Strategy<Value = Digest> {
    any::<[u8; 32]>().prop_map(Digest)
}

pub fn arb_event() -> impl Strategy<Value = Event> {
    (
        prop::collection::vec(any::<u8>(), 1..40),
        prop::collection::vec(any::<u8>(), 1..40),
        "[a-z0-9@._-]{0,24}",
        any::<u64>(),
        arb_digest(),
        prop::collection::vec(arb_digest(), 0..5),
        prop::collection::vec(arb_digest(), 0..5),
        arb_digest(),
        arb_digest(),
        prop::collection::btree_map(
            "[a-z]{1,8}",
            prop::collection::vec(any::<u8>(), 0..16),
            0..4,
        ),
    )
        .prop_map(
            |(eid, wid, actor, ts, cfg, ins, outs, env, prev, ext)| Event {
                event_id: eid,
                workflow_id: wid,
                actor,
                timestamp: ts,
                config_digest: cfg,
                input_refs: ins,
                output_refs: outs,
                env_digest: env,
                prev_link: prev,
                extensions: ext
                    .into_iter()
                    .map(|(tag, value)| Extension { tag, value })
                    .collect(),
            },
        )
}

pub fn rand_digest(rng: &mut impl RngCore) -> Digest {
    let mut d = [0u8; 32];
    rng.fill_bytes(&mut d);
    Digest(d)
}

pub fn rand_bytes(rng: &mut impl RngCore, lo: usize, hi: usize) -> Vec<u8> {
    let n = rng.gen_range(lo..hi);
    let mut v = vec![0u8; n];
    rng.fill_bytes(&mut v);
    v
}

pub fn rand_event(rng: &mut impl RngCore) -> Event {
    let n_in = rng.gen_range(0..4);
    let n_out = rng.gen_range(0..4);
    let n_ext = rng.gen_range(0..3);
    Event {
        event_id: rand_bytes(rng, 1, 24),
        workflow_id: rand_bytes(rng, 1, 24),
        actor: format!("actor-{}", rng.gen::<u32>()),
        timestamp: rng.gen(),
        config_digest: rand_digest(rng),
        input_refs: (0..n_in).map(|_| rand_digest(rng)).collect(),
        output_refs: (0..n_out).map(|_| rand_digest(rng)).collect(),
        env_digest: rand_digest(rng),
        prev_link: rand_digest(rng),
        extensions: (0..n_ext)
            .map(|i| Extension {
                tag: format!("t{i}"),
                value: rand_bytes(rng, 0, 8),
            })
            .collect(),
    }
}

/// Component names used by [`mutate_one`], paired with the field role that
/// covers them under the default role assignment.
pub const COMPONENTS: [(&str, csev::FieldRole); 10] = [
    ("event_id", csev::FieldRole::Context),
    ("workflow_id", csev::FieldRole::Context),
    ("actor", csev::FieldRole::TimeActor),
    ("timestamp", csev::FieldRole::TimeActor),
    ("config_digest", csev::FieldRole::Config),
    ("input_refs", csev::FieldRole::Inputs),
    ("output_refs", csev::FieldRole::Outputs),
    ("env_digest", csev::FieldRole::Environment),
    ("prev_link", csev::FieldRole::Link),
    ("extensions", csev::FieldRole::Extension),
];

/// Returns a copy of `e` differing in exactly the component `which`.
pub fn mutate_one(rng: &mut impl RngCore, e: &Event, which: usize) -> Event {
    let mut m = e.clone();
    match which {
        0 => m.event_id.push(rng.gen()),
        1 => m.workflow_id[0] ^= rng.gen_range(1..=255),
        2 => m.actor.push('x'),
        3 => m.timestamp ^= 1 << rng.gen_range(0..64),
        4 => m.config_digest.0[rng.gen_range(0..32)] ^= 1 << rng.gen_range(0..8),
        5 => {
            if m.input_refs.is_empty() || rng.gen() {
                m.input_refs.push(rand_digest(rng));
            } else {
                let i = rng.gen_range(0..m.input_refs.len());
                m.input_refs[i].0[0] ^= 0x01;
            }
        }
        6 => {
            if m.output_refs.is_empty() || rng.gen() {
                m.output_refs.push(rand_digest(rng));
            } else {
                m.output_refs.pop();
            }
        }
        7 => m.env_digest.0[31] ^= 0x80,
        8 => m.prev_link.0[rng.gen_range(0..32)] ^= 1,
        9 => m.extensions.push(Extension {
            tag: "fresh".to_string(),
            value: vec![rng.gen()],
        }),
        _ => unreachable!(),
    }
    m
}
