//! Shared-key variant of the anonymizing encryption: randomized symmetric
//! encryption under a secret shared between one consumer and the producer.
//! Cheaper than the public-key form, but the ciphertext must carry a
//! cleartext key tag so the producer can pick the right secret, which
//! lets an observer link interests that share a tag. Consumer anonymity
//! is preserved; unlinkability is not. See `docs/formats.md`.

use rand_core::RngCore;
use sha2::{Digest, Sha256};

use crate::hmac::hmac_sha256;
use crate::pkenc::{split_field, xor_stream};
use crate::CryptoError;

const IV_BYTES: usize = 16;
const MAC_BYTES: usize = 32;

/// Layout: `iv(16) | u16 len(body) | body | mac(32)`. The key tag is not
/// part of this layer; the payload carriage prepends it.
pub fn sym_encrypt(key: &[u8], plaintext: &[u8], rng: &mut dyn RngCore) -> Vec<u8> {
    let mut iv = [0u8; IV_BYTES];
    rng.fill_bytes(&mut iv);
    let (ke, km) = derive_keys(key, &iv);
    let body = xor_stream(&ke, plaintext);
    let mut out = Vec::with_capacity(IV_BYTES + 2 + body.len() + MAC_BYTES);
    out.extend_from_slice(&iv);
    out.extend_from_slice(&(body.len() as u16).to_be_bytes());
    out.extend_from_slice(&body);
    let mac_input = [&iv[..], &body].concat();
    out.extend_from_slice(&hmac_sha256(&km, &mac_input));
    out
}

pub fn sym_decrypt(key: &[u8], ciphertext: &[u8]) -> Result<Vec<u8>, CryptoError> {
    if ciphertext.len() < IV_BYTES {
        return Err(CryptoError::Malformed("truncated iv"));
    }
    let iv = &ciphertext[..IV_BYTES];
    let (body, rest) = split_field(&ciphertext[IV_BYTES..])?;
    if rest.len() != MAC_BYTES {
        return Err(CryptoError::Malformed("ciphertext mac"));
    }
    let (ke, km) = derive_keys(key, iv);
    let mac_input = [iv, body].concat();
    if hmac_sha256(&km, &mac_input)[..] != *rest {
        return Err(CryptoError::DecryptFailure);
    }
    Ok(xor_stream(&ke, body))
}

fn derive_keys(key: &[u8], iv: &[u8]) -> ([u8; 32], [u8; 32]) {
    let ke = Sha256::new()
        .chain_update(b"sym-enc")
        .chain_update(key)
        .chain_update(iv)
        .finalize()
        .into();
    let km = Sha256::new()
        .chain_update(b"sym-mac")
        .chain_update(key)
        .chain_update(iv)
        .finalize()
        .into();
    (ke, km)
}
