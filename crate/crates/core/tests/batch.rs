mod common;

use common::*;
use csev::bench::SyntheticWorkload;
use csev::{generate_evidence, verify_batch, verify_evidence, BatchEntry, Parallelism};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn batch_matches_sequential_under_every_hint() {
    let p = params8();
    let kp = golden_keypair();
    let mut rng = StdRng::seed_from_u64(77);
    let events = SyntheticWorkload::new(3, 24).events(10_000);
    let mut signed: Vec<_> = events
        .iter()
        .map(|e| generate_evidence(&p, &kp, e).unwrap())
        .collect();
    let mut tampered = 0;
    for s in signed.iter_mut() {
        if rng.gen_ratio(1, 100) {
            tampered += 1;
            if rng.gen() {
                s.signature[rng.gen_range(0..64)] ^= 1 << rng.gen_range(0..8);
            } else {
                let f = rng.gen_range(0..8);
                s.item.fields_mut()[f].0[rng.gen_range(0..32)] ^= 1 << rng.gen_range(0..8);
            }
        }
    }
    assert!(tampered > 50);
    let entries: Vec<_> = events
        .iter()
        .zip(&signed)
        .map(|(event, signed)| BatchEntry {
            public_key: kp.public_key(),
            event,
            signed,
        })
        .collect();
    let sequential: Vec<_> = entries
        .iter()
        .map(|b| verify_evidence(&p, b.public_key, b.event, b.signed))
        .collect();
    assert_eq!(
        sequential.iter().filter(|o| !o.is_accept()).count(),
        tampered
    );
    for hint in [
        Parallelism::Threads(1),
        Parallelism::Threads(2),
        Parallelism::Available,
    ] {
        assert_eq!(verify_batch(&p, &entries, hint), sequential, "{hint:?}");
    }
}
