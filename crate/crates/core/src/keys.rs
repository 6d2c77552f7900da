//! Signing key material for suite v1 (Ed25519).

use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use rand_core::{OsRng, RngCore};

use crate::error::{Error, Result};
use crate::hash::{hash, Digest};
use crate::params::SIGNATURE_LEN;

pub const SEED_LEN: usize = 32;
pub const PUBLIC_KEY_LEN: usize = 32;

/// A verification key together with its fingerprint H(public_key).
#[derive(Clone, PartialEq, Eq)]
pub struct PublicKey {
    key: VerifyingKey,
    fingerprint: Digest,
}

impl PublicKey {
    pub fn from_bytes(bytes: &[u8]) -> Result<PublicKey> {
        let arr: [u8; PUBLIC_KEY_LEN] = bytes
            .try_into()
            .map_err(|_| Error::InvalidKey(format!("public key has {} bytes", bytes.len())))?;
        let key = VerifyingKey::from_bytes(&arr).map_err(|e| Error::InvalidKey(e.to_string()))?;
        Ok(PublicKey::from_verifying(key))
    }

    fn from_verifying(key: VerifyingKey) -> PublicKey {
        PublicKey {
            fingerprint: hash(key.as_bytes()),
            key,
        }
    }

    pub fn as_bytes(&self) -> &[u8; PUBLIC_KEY_LEN] {
        self.key.as_bytes()
    }

    pub fn fingerprint(&self) -> Digest {
        self.fingerprint
    }

    /// Strict Ed25519 verification (rejects non-canonical and small-order
    /// encodings).
    pub fn verify(&self, message: &[u8], signature: &[u8; SIGNATURE_LEN]) -> bool {
        let sig = Signature::from_bytes(signature);
        self.key.verify_strict(message, &sig).is_ok()
    }
}

impl std::fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PublicKey({})", hex::encode(self.as_bytes()))
    }
}

pub struct KeyPair {
    signing: SigningKey,
    public: PublicKey,
}

impl KeyPair {
    /// Deterministic key pair from a 32-byte seed, or fresh OS entropy when
    /// `seed` is `None`.
    pub fn keygen(seed: Option<&[u8]>) -> Result<KeyPair> {
        match seed {
            Some(s) => {
                let arr: [u8; SEED_LEN] = s.try_into().map_err(|_| Error::InvalidSeed(s.len()))?;
                Ok(KeyPair::from_seed(&arr))
            }
            None => KeyPair::generate(),
        }
    }

    pub fn generate() -> Result<KeyPair> {
        let mut seed = [0u8; SEED_LEN];
        OsRng
            .try_fill_bytes(&mut seed)
            .map_err(|e| Error::EntropyUnavailable(e.to_string()))?;
        Ok(KeyPair::from_seed(&seed))
    }

    pub fn from_seed(seed: &[u8; SEED_LEN]) -> KeyPair {
        let signing = SigningKey::from_bytes(seed);
        let public = PublicKey::from_verifying(signing.verifying_key());
        KeyPair { signing, public }
    }

    /// The 32-byte secret seed.
    pub fn secret_key(&self) -> &[u8; SEED_LEN] {
        self.signing.as_bytes()
    }

    pub fn public_key(&self) -> &PublicKey {
        &self.public
    }

    pub fn fingerprint(&self) -> Digest {
        self.public.fingerprint
    }

    pub fn sign(&self, message: &[u8]) -> [u8; SIGNATURE_LEN] {
        self.signing.sign(message).to_bytes()
    }
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_keygen_is_deterministic() {
        let a = KeyPair::keygen(Some(&[7u8; 32])).unwrap();
        let b = KeyPair::keygen(Some(&[7u8; 32])).unwrap();
        assert_eq!(a.public_key(), b.public_key());
        assert_eq!(a.secret_key(), b.secret_key());
    }

    #[test]
    fn fresh_keys_differ() {
        let a = KeyPair::keygen(None).unwrap();
        let b = KeyPair::keygen(None).unwrap();
        assert_ne!(a.public_key(), b.public_key());
    }

    #[test]
    fn bad_seed_length() {
        assert!(matches!(
            KeyPair::keygen(Some(&[0u8; 31])),
            Err(Error::InvalidSeed(31))
        ));
    }

    #[test]
    fn fingerprint_is_hash_of_public_key() {
        let kp = KeyPair::from_seed(&[1u8; 32]);
        assert_eq!(kp.fingerprint(), hash(kp.public_key().as_bytes()));
        let pk = PublicKey::from_bytes(kp.public_key().as_bytes()).unwrap();
        assert_eq!(pk.fingerprint(), kp.fingerprint());
    }

    #[test]
    fn sign_verify_round_trip() {
        let kp = KeyPair::from_seed(&[2u8; 32]);
        let sig = kp.sign(b"message");
        assert!(kp.public_key().verify(b"message", &sig));
        assert!(!kp.public_key().verify(b"messagf", &sig));
    }

    #[test]
    fn public_key_wrong_length() {
        assert!(PublicKey::from_bytes(&[0u8; 31]).is_err());
    }
}
