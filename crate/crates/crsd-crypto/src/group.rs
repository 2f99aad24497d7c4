//! Prime-order subgroup arithmetic for the tag-signature and encryption
//! roles: the 1536-bit MODP group (RFC 3526, group 5). The modulus is a
//! safe prime, so g = 4 generates the quadratic-residue subgroup of prime
//! order q = (p - 1) / 2.

use std::sync::LazyLock;

use num_bigint::BigUint;
use num_traits::One;
use rand_core::RngCore;
use sha2::{Digest, Sha256};

const MODP_1536_HEX: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74",
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437",
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05",
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB",
    "9ED529077096966D670C354E4ABC9804F1746C08CA237327FFFFFFFFFFFFFFFF",
);

/// Serialized field-element width in bytes.
pub const ELEMENT_BYTES: usize = 192;

/// Multiplicative group modulo a safe prime, restricted to the
/// quadratic-residue subgroup of order `q`.
pub struct Group {
    pub p: BigUint,
    pub q: BigUint,
    pub g: BigUint,
}

static MODP_1536: LazyLock<Group> = LazyLock::new(|| {
    let p = BigUint::parse_bytes(MODP_1536_HEX.as_bytes(), 16).expect("static prime");
    let q = (&p - BigUint::one()) >> 1;
    Group {
        p,
        q,
        g: BigUint::from(4u32),
    }
});

impl Group {
    pub fn modp_1536() -> &'static Group {
        &MODP_1536
    }

    /// Uniform-ish scalar in `[1, q)`.
    pub fn random_scalar(&self, rng: &mut dyn RngCore) -> BigUint {
        let mut buf = [0u8; ELEMENT_BYTES];
        rng.fill_bytes(&mut buf);
        let r = BigUint::from_bytes_be(&buf);
        (r % (&self.q - BigUint::one())) + BigUint::one()
    }

    pub fn pow_g(&self, exp: &BigUint) -> BigUint {
        self.g.modpow(exp, &self.p)
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.p)
    }

    /// Fixed-width big-endian encoding of a field element.
    pub fn element_bytes(&self, x: &BigUint) -> [u8; ELEMENT_BYTES] {
        let raw = x.to_bytes_be();
        let mut out = [0u8; ELEMENT_BYTES];
        out[ELEMENT_BYTES - raw.len()..].copy_from_slice(&raw);
        out
    }
}

/// Schnorr verification key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchnorrPublic {
    pub pk: BigUint,
}

/// Schnorr signing keypair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchnorrKeypair {
    pub sk: BigUint,
    pub public: SchnorrPublic,
}

const CHALLENGE_BYTES: usize = 32;
/// Serialized signature width: 32-byte challenge plus 192-byte response.
pub const SIGNATURE_BYTES: usize = CHALLENGE_BYTES + ELEMENT_BYTES;

impl SchnorrKeypair {
    pub fn generate(rng: &mut dyn RngCore) -> Self {
        let grp = Group::modp_1536();
        let sk = grp.random_scalar(rng);
        let pk = grp.pow_g(&sk);
        SchnorrKeypair {
            sk,
            public: SchnorrPublic { pk },
        }
    }

    /// Deterministic Schnorr signature: the per-signature scalar is derived
    /// from the secret key and the message, so signing needs no RNG.
    pub fn sign(&self, msg: &[u8]) -> [u8; SIGNATURE_BYTES] {
        let grp = Group::modp_1536();
        let k_seed = Sha256::new()
            .chain_update(b"schnorr-k")
            .chain_update(grp.element_bytes(&self.sk))
            .chain_update(msg)
            .finalize();
        let mut k = BigUint::from_bytes_be(&k_seed) % &grp.q;
        if k == BigUint::ZERO {
            k = BigUint::one();
        }
        let r = grp.pow_g(&k);
        let e_bytes = challenge(grp, &r, msg);
        let e = BigUint::from_bytes_be(&e_bytes);
        let s = (k + &self.sk * e) % &grp.q;
        let mut out = [0u8; SIGNATURE_BYTES];
        out[..CHALLENGE_BYTES].copy_from_slice(&e_bytes);
        out[CHALLENGE_BYTES..].copy_from_slice(&grp.element_bytes(&s));
        out
    }
}

impl SchnorrPublic {
    pub fn verify(&self, msg: &[u8], sig: &[u8]) -> bool {
        if sig.len() != SIGNATURE_BYTES {
            return false;
        }
        let grp = Group::modp_1536();
        let e_bytes = &sig[..CHALLENGE_BYTES];
        let e = BigUint::from_bytes_be(e_bytes);
        let s = BigUint::from_bytes_be(&sig[CHALLENGE_BYTES..]);
        if s >= grp.q {
            return false;
        }
        // R' = g^s * pk^(-e); pk has order q, so -e is q - (e mod q).
        let neg_e = &grp.q - (e % &grp.q);
        let r = (grp.pow_g(&s) * grp.pow(&self.pk, &neg_e)) % &grp.p;
        challenge(grp, &r, msg)[..] == *e_bytes
    }
}

fn challenge(grp: &Group, r: &BigUint, msg: &[u8]) -> [u8; CHALLENGE_BYTES] {
    Sha256::new()
        .chain_update(b"schnorr-e")
        .chain_update(grp.element_bytes(r))
        .chain_update(msg)
        .finalize()
        .into()
}
