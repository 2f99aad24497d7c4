//! The keyed unforgeable-tag role. Two instantiations, selected by what
//! the key registry holds for the consumer: a shared-key MAC or a
//! signature. Routers never touch either; only consumers create tags and
//! only producers verify them.

use bytes::Bytes;

use crate::group::{SchnorrKeypair, SchnorrPublic};
use crate::hmac::hmac_sha256;

/// Tagging key held by a consumer.
#[derive(Debug, Clone)]
pub enum TagKey {
    /// Shared secret with the producer (HMAC-SHA256).
    Mac(Bytes),
    /// Consumer signing keypair (Schnorr).
    Sig(SchnorrKeypair),
}

/// Verification key held by a producer.
#[derive(Debug, Clone)]
pub enum TagVerifier {
    Mac(Bytes),
    Sig(SchnorrPublic),
}

/// Tags a byte string under the consumer's key. Deterministic for both
/// instantiations.
pub fn compute_tag(key: &TagKey, msg: &[u8]) -> Bytes {
    match key {
        TagKey::Mac(k) => Bytes::copy_from_slice(&hmac_sha256(k, msg)),
        TagKey::Sig(kp) => Bytes::copy_from_slice(&kp.sign(msg)),
    }
}

pub fn verify_tag(verifier: &TagVerifier, msg: &[u8], tag: &[u8]) -> bool {
    match verifier {
        TagVerifier::Mac(k) => hmac_sha256(k, msg)[..] == *tag,
        TagVerifier::Sig(pk) => pk.verify(msg, tag),
    }
}

impl TagKey {
    /// The matching verification key.
    pub fn verifier(&self) -> TagVerifier {
        match self {
            TagKey::Mac(k) => TagVerifier::Mac(k.clone()),
            TagKey::Sig(kp) => TagVerifier::Sig(kp.public.clone()),
        }
    }
}
