//! Consumer-specific data (CrSD) construction and verification.
//!
//! Producers that want per-request or per-consumer accounting need the
//! data consumers attach to interests to be unforgeable, replay-resistant
//! and optionally anonymous to everyone but the producer. This crate
//! provides the pieces:
//!
//! * [`Crsd`] / [`SecCrsd`]: identity blobs and their authenticated form
//!   (identity, fresh nonce, timestamp, keyed tag bound to the interest
//!   name).
//! * [`make_a_crsd`] / [`open_a_crsd`]: randomized encryption of a
//!   `SecCrsd` under the producer's public key, with a shared-key variant
//!   for consumers that cannot afford public-key operations.
//! * [`ReplayWindow`]: tumbling-window nonce tracking on the producer
//!   side.
//! * [`collision_probability`]: exact birthday-bound probability that a
//!   set of random nonces collides.
//! * [`KeyRegistry`]: a local key file standing in for offline key
//!   distribution.
//!
//! Crypto primitives are abstract roles with concrete, self-contained
//! instantiations: HMAC-SHA256 for shared-key tags, Schnorr over a
//! 1536-bit MODP group for signature-style tags, and hashed-ElGamal
//! hybrid encryption (same group) for the anonymizing layer. All
//! randomness comes from caller-provided RNGs, so everything is
//! reproducible under a fixed seed.

mod collision;
mod crsd;
mod group;
mod hmac;
mod pkenc;
mod registry;
mod replay;
mod symenc;
mod tag;

pub use collision::collision_probability;
pub use crsd::{
    make_a_crsd, make_a_crsd_sym, make_sec_crsd, open_a_crsd, open_a_crsd_sym, verify_sec_crsd,
    ACrsd, AcrsdScheme, Crsd, CrsdForm, CrsdPayload, DistinctTag, SecCrsd, DEFAULT_NONCE_BITS,
};
pub use group::{Group, SchnorrKeypair, SchnorrPublic};
pub use hmac::hmac_sha256;
pub use pkenc::{pk_decrypt, pk_encrypt, pk_keygen, EncKeypair};
pub use registry::{KeyRegistry, RegistryError, TagScheme};
pub use replay::{ReplayWindow, DEFAULT_WINDOW_TICKS};
pub use symenc::{sym_decrypt, sym_encrypt};
pub use tag::{compute_tag, verify_tag, TagKey, TagVerifier};

/// Failure of a cryptographic operation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("no key registered for this party")]
    UnknownKey,
    #[error("decryption failed")]
    DecryptFailure,
    #[error("malformed blob: {0}")]
    Malformed(&'static str),
}

/// Why a producer rejected a piece of consumer-specific data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Reject {
    /// The keyed tag does not verify for the bound name.
    BadTag,
    /// The timestamp falls outside the acceptable window.
    StaleTimestamp,
    /// The nonce was already accepted within the window.
    Replay,
}

impl Reject {
    pub fn as_str(self) -> &'static str {
        match self {
            Reject::BadTag => "bad_tag",
            Reject::StaleTimestamp => "stale_timestamp",
            Reject::Replay => "replay",
        }
    }
}
