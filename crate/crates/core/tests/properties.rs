mod common;

use common::*;
use csev::encoding::{canonical_decode, event_from_line, event_to_line};
use csev::link::{extend_chain, link_chain, ChainTip};
use csev::{
    canonical_encode, generate_evidence, verify_evidence, Digest, EvidenceItem, KeyPair,
    SignedEvidence,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sha2::{Digest as _, Sha256};
use std::collections::HashSet;

fn rand_item(rng: &mut StdRng, k: usize) -> EvidenceItem {
    EvidenceItem::new((0..k).map(|_| rand_digest(rng)).collect())
}

proptest! {
    #[test]
    fn canonical_decode_inverts_encode(e in arb_event()) {
        let bytes = canonical_encode(&e).unwrap();
        prop_assert_eq!(canonical_decode(&bytes).unwrap(), e);
    }

    #[test]
    fn ingestion_line_round_trip(e in arb_event()) {
        prop_assert_eq!(event_from_line(&event_to_line(&e)).unwrap(), e);
    }

    #[test]
    fn distinct_events_encode_distinctly(a in arb_event(), b in arb_event()) {
        prop_assume!(a != b);
        prop_assert_ne!(canonical_encode(&a).unwrap(), canonical_encode(&b).unwrap());
    }

    #[test]
    fn generate_verify_round_trip(e in arb_event(), seed in any::<[u8; 32]>()) {
        let p = params8();
        let kp = KeyPair::from_seed(&seed);
        let s = generate_evidence(&p, &kp, &e).unwrap();
        prop_assert_eq!(s.item.serialize(&p).unwrap().len(), 256);
        prop_assert_eq!(s.to_record_bytes(&p).unwrap().len(), 352);
        prop_assert!(verify_evidence(&p, kp.public_key(), &e, &s).is_accept());
    }

    #[test]
    fn record_bytes_round_trip(fields in prop::collection::vec(any::<[u8; 32]>(), 8), sig in prop::collection::vec(any::<u8>(), 64), fp in any::<[u8; 32]>()) {
        let p = params8();
        let s = SignedEvidence {
            item: EvidenceItem::new(fields.into_iter().map(Digest).collect()),
            signature: sig.try_into().unwrap(),
            signer_fingerprint: Digest(fp),
            params_digest: p.digest(),
        };
        let back = SignedEvidence::from_record_bytes(&p, &s.to_record_bytes(&p).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn chain_is_left_fold_of_extend(len in 0usize..1000, seed in any::<u64>()) {
        let p = params8();
        let mut rng = StdRng::seed_from_u64(seed);
        let items: Vec<_> = (0..len).map(|_| rand_item(&mut rng, 8)).collect();
        let folded = items.iter().try_fold(ChainTip::EMPTY, |t, it| extend_chain(&p, t, it)).unwrap();
        prop_assert_eq!(link_chain(&p, &items).unwrap(), folded);
        // independent route: raw SHA-256 over ℓ ∥ item bytes
        let mut tip = [0u8; 32];
        for it in &items {
            let mut h = Sha256::new();
            h.update(tip);
            for f in it.fields() { h.update(f.as_bytes()); }
            tip = h.finalize().into();
        }
        prop_assert_eq!(folded.tip, Digest(tip));
        prop_assert_eq!(folded.length, len as u64);
        prop_assert!(folded.is_well_formed());
    }

    #[test]
    fn split_fold_matches(len in 1usize..200, cut in 0usize..200, seed in any::<u64>()) {
        let p = params8();
        let cut = cut % (len + 1);
        let mut rng = StdRng::seed_from_u64(seed);
        let items: Vec<_> = (0..len).map(|_| rand_item(&mut rng, 8)).collect();
        let head = link_chain(&p, &items[..cut]).unwrap();
        let whole = items[cut..].iter().try_fold(head, |t, it| extend_chain(&p, t, it)).unwrap();
        prop_assert_eq!(whole, link_chain(&p, &items).unwrap());
    }
}

#[test]
fn single_component_mutations_change_encoding() {
    let mut rng = StdRng::seed_from_u64(0xE1);
    for trial in 0..10_000 {
        let e = rand_event(&mut rng);
        let which = trial % COMPONENTS.len();
        let m = mutate_one(&mut rng, &e, which);
        assert_ne!(
            canonical_encode(&e).unwrap(),
            canonical_encode(&m).unwrap(),
            "component {}",
            COMPONENTS[which].0
        );
    }
}

#[test]
fn seeded_keygen_is_stable_and_fresh_keys_never_repeat() {
    let a = KeyPair::keygen(Some(&[3; 32])).unwrap();
    let b = KeyPair::keygen(Some(&[3; 32])).unwrap();
    assert_eq!(a.public_key(), b.public_key());
    let mut seen = HashSet::new();
    for _ in 0..1000 {
        let kp = KeyPair::keygen(None).unwrap();
        assert!(seen.insert(*kp.public_key().as_bytes()));
    }
}

#[test]
fn independent_ed25519_accepts_our_signatures() {
    // Cross-check with a signature produced by OpenSSL for the golden vector.
    let p = params8();
    let kp = golden_keypair();
    let sig: [u8; 64] = hex_file(include_str!("data/golden_signature.hex"))
        .try_into()
        .unwrap();
    let mut msg = p.digest().as_bytes().to_vec();
    msg.extend(hex_file(include_str!("data/golden_item.hex")));
    assert!(kp.public_key().verify(&msg, &sig));
    assert_eq!(kp.sign(&msg), sig);
}

#[test]
fn item_size_ignores_event_size() {
    let p = params8();
    let kp = golden_keypair();
    let mut rng = StdRng::seed_from_u64(5);
    let mut sizes = HashSet::new();
    for n_refs in [0usize, 1, 100, 10_000, 65_536] {
        let mut e = rand_event(&mut rng);
        e.input_refs = (0..n_refs).map(|_| rand_digest(&mut rng)).collect();
        e.actor = "a".repeat(rng.gen_range(0..1024));
        let s = generate_evidence(&p, &kp, &e).unwrap();
        sizes.insert((
            s.item.serialize(&p).unwrap().len(),
            s.to_record_bytes(&p).unwrap().len(),
        ));
    }
    assert_eq!(sizes.into_iter().collect::<Vec<_>>(), vec![(256, 352)]);
}
