//! Randomized public-key encryption role: hashed-ElGamal hybrid over the
//! MODP group. A fresh ephemeral exponent per encryption makes ciphertexts
//! of equal plaintexts pairwise distinct (the CPA contract the anonymity
//! argument rests on); an HMAC over the body rejects tampering and
//! wrong-key decryption.

use num_bigint::BigUint;
use rand_core::RngCore;
use sha2::{Digest, Sha256};

use crate::group::{Group, ELEMENT_BYTES};
use crate::hmac::hmac_sha256;
use crate::CryptoError;

/// ElGamal keypair for the anonymizing layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncKeypair {
    pub pk: BigUint,
    pub sk: BigUint,
}

pub fn pk_keygen(rng: &mut dyn RngCore) -> EncKeypair {
    let grp = Group::modp_1536();
    let sk = grp.random_scalar(rng);
    let pk = grp.pow_g(&sk);
    EncKeypair { pk, sk }
}

const MAC_BYTES: usize = 32;

/// Ciphertext layout: `u16 len(u) | u | u16 len(body) | body | mac(32)`.
pub fn pk_encrypt(pk: &BigUint, plaintext: &[u8], rng: &mut dyn RngCore) -> Vec<u8> {
    let grp = Group::modp_1536();
    let y = grp.random_scalar(rng);
    let u = grp.pow_g(&y);
    let shared = grp.pow(pk, &y);
    let u_bytes = grp.element_bytes(&u);
    let (ke, km) = derive_keys(&u_bytes, &grp.element_bytes(&shared));
    let body = xor_stream(&ke, plaintext);
    let mut out = Vec::with_capacity(2 + ELEMENT_BYTES + 2 + body.len() + MAC_BYTES);
    out.extend_from_slice(&(u_bytes.len() as u16).to_be_bytes());
    out.extend_from_slice(&u_bytes);
    out.extend_from_slice(&(body.len() as u16).to_be_bytes());
    out.extend_from_slice(&body);
    let mac_input = [&u_bytes[..], &body].concat();
    out.extend_from_slice(&hmac_sha256(&km, &mac_input));
    out
}

pub fn pk_decrypt(sk: &BigUint, ciphertext: &[u8]) -> Result<Vec<u8>, CryptoError> {
    let grp = Group::modp_1536();
    let (u_bytes, rest) = split_field(ciphertext)?;
    let (body, rest) = split_field(rest)?;
    if rest.len() != MAC_BYTES {
        return Err(CryptoError::Malformed("ciphertext mac"));
    }
    let u = BigUint::from_bytes_be(u_bytes);
    if u == BigUint::ZERO || u >= grp.p {
        return Err(CryptoError::Malformed("ciphertext group element"));
    }
    let shared = grp.pow(&u, sk);
    let mut u_fixed = [0u8; ELEMENT_BYTES];
    if u_bytes.len() != ELEMENT_BYTES {
        return Err(CryptoError::Malformed("ciphertext group element"));
    }
    u_fixed.copy_from_slice(u_bytes);
    let (ke, km) = derive_keys(&u_fixed, &grp.element_bytes(&shared));
    let mac_input = [u_bytes, body].concat();
    if hmac_sha256(&km, &mac_input)[..] != *rest {
        return Err(CryptoError::DecryptFailure);
    }
    Ok(xor_stream(&ke, body))
}

fn derive_keys(u: &[u8], shared: &[u8]) -> ([u8; 32], [u8; 32]) {
    let ke = Sha256::new()
        .chain_update(b"hybrid-enc")
        .chain_update(u)
        .chain_update(shared)
        .finalize()
        .into();
    let km = Sha256::new()
        .chain_update(b"hybrid-mac")
        .chain_update(u)
        .chain_update(shared)
        .finalize()
        .into();
    (ke, km)
}

/// SHA256-based counter-mode keystream XOR.
pub(crate) fn xor_stream(key: &[u8; 32], data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len());
    for (i, chunk) in data.chunks(32).enumerate() {
        let block: [u8; 32] = Sha256::new()
            .chain_update(key)
            .chain_update((i as u64).to_be_bytes())
            .finalize()
            .into();
        out.extend(chunk.iter().zip(block.iter()).map(|(d, k)| d ^ k));
    }
    out
}

pub(crate) fn split_field(bytes: &[u8]) -> Result<(&[u8], &[u8]), CryptoError> {
    if bytes.len() < 2 {
        return Err(CryptoError::Malformed("truncated length word"));
    }
    let len = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
    if bytes.len() - 2 < len {
        return Err(CryptoError::Malformed("truncated field"));
    }
    Ok((&bytes[2..2 + len], &bytes[2 + len..]))
}
