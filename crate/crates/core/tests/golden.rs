//! Golden vectors computed once with an independent SHA-256 / Ed25519
//! implementation (Python hashlib + OpenSSL) and frozen under tests/data.

mod common;

use common::*;
use csev::link::merkle::leaf_hash;
use csev::link::{link_chain, link_merkle};
use csev::{canonical_encode, generate_evidence, verify_evidence, Digest, VerifyOutcome};

#[test]
fn params_serialization_matches_oracle() {
    let p = params8();
    assert_eq!(
        p.to_bytes(),
        &hex_file(include_str!("data/golden_params.hex"))[..]
    );
    assert_eq!(
        p.digest().to_hex(),
        "e3880b6c02d7e88dfe56b6f30de330a0e0569258410dbe6c669c5c19d87f845e"
    );
}

#[test]
fn canonical_event_digest_matches_oracle() {
    let bytes = canonical_encode(&golden_event()).unwrap();
    assert_eq!(bytes, hex_file(include_str!("data/golden_event.hex")));
    assert_eq!(
        golden_event().digest().unwrap().to_hex(),
        "eaec14370cf04f8266167c1161d3d1f8fb4774a922dda635a00251a05900146d"
    );
}

#[test]
fn keypair_matches_oracle() {
    let kp = golden_keypair();
    assert_eq!(
        kp.public_key().as_bytes().to_vec(),
        hex_file(include_str!("data/golden_public_key.hex"))
    );
    assert_eq!(
        kp.fingerprint().to_hex(),
        "56475aa75463474c0285df5dbf2bcab73da651358839e9b77481b2eab107708c"
    );
}

#[test]
fn generated_evidence_matches_oracle() {
    let p = params8();
    let kp = golden_keypair();
    let s = generate_evidence(&p, &kp, &golden_event()).unwrap();
    assert_eq!(
        s.item.serialize(&p).unwrap(),
        hex_file(include_str!("data/golden_item.hex"))
    );
    assert_eq!(
        s.signature.to_vec(),
        hex_file(include_str!("data/golden_signature.hex"))
    );
    assert_eq!(s.signer_fingerprint, kp.fingerprint());
    assert_eq!(
        verify_evidence(&p, kp.public_key(), &golden_event(), &s),
        VerifyOutcome::Accept
    );
}

#[test]
fn one_step_chain_and_leaf_match_oracle() {
    let p = params8();
    let s = generate_evidence(&p, &golden_keypair(), &golden_event()).unwrap();
    let tip = link_chain(&p, [&s.item]).unwrap();
    assert_eq!(
        tip.tip,
        Digest::from_hex("d52ee21d48105e6e3c30d1bb80367bbf73d0c5d7f59cc06d4f3da9c200e88026")
            .unwrap()
    );
    let leaf = Digest::from_hex("8ecc778466403a90f32137c99287f4c6ba2e949a05b77891d821d57eb27d753c")
        .unwrap();
    assert_eq!(leaf_hash(&s.item.serialize(&p).unwrap()), leaf);
    assert_eq!(link_merkle(&p, &[s.item]).unwrap().root, leaf);
}
