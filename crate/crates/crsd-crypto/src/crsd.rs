//! Consumer-specific data blobs and the interest-payload carriage format.
//!
//! A consumer picks one of three payload kinds depending on the accounting
//! its producer requires:
//!
//! * [`DistinctTag`]: bare nonce + timestamp, enough to tell apart
//!   requests that routers may have duplicated.
//! * [`SecCrsd`]: identity + nonce + timestamp, authenticated by a keyed
//!   tag bound to the interest name, so it can be neither forged nor
//!   reused under another name.
//! * [`ACrsd`]: a `SecCrsd` under randomized encryption, readable only
//!   by the producer.
//!
//! Routers copy these blobs verbatim from interest payloads into pInt
//! cdata; all parsing and verification happens at the producer.

use bytes::Bytes;
use ccn_core::{encode_name, Name, Tick};
use num_bigint::BigUint;
use rand_core::RngCore;

use crate::pkenc::{pk_decrypt, pk_encrypt, split_field};
use crate::replay::ReplayWindow;
use crate::symenc::{sym_decrypt, sym_encrypt};
use crate::tag::{compute_tag, verify_tag, TagKey, TagVerifier};
use crate::{CryptoError, Reject};

/// Default nonce width in bits.
pub const DEFAULT_NONCE_BITS: u32 = 128;

/// What the identity field of a [`Crsd`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CrsdForm {
    /// Consumer public key or its digest; visible to the whole network.
    ConsumerKeyDigest,
    /// Group (organization, AS, region) key or digest.
    GroupKeyDigest,
    /// Producer- or third-party-assigned pseudonym.
    Pseudonym,
    /// No identity at all; only the nonce matters.
    NonceOnly,
}

impl CrsdForm {
    pub fn to_byte(self) -> u8 {
        match self {
            CrsdForm::ConsumerKeyDigest => 0,
            CrsdForm::GroupKeyDigest => 1,
            CrsdForm::Pseudonym => 2,
            CrsdForm::NonceOnly => 3,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(CrsdForm::ConsumerKeyDigest),
            1 => Some(CrsdForm::GroupKeyDigest),
            2 => Some(CrsdForm::Pseudonym),
            3 => Some(CrsdForm::NonceOnly),
            _ => None,
        }
    }
}

/// Consumer-specific data: an identity of one of the four forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crsd {
    pub form: CrsdForm,
    pub identity: Bytes,
}

impl Crsd {
    pub fn new(form: CrsdForm, identity: Bytes) -> Result<Self, CryptoError> {
        match form {
            CrsdForm::NonceOnly if !identity.is_empty() => {
                Err(CryptoError::Malformed("nonce-only crsd carries no identity"))
            }
            _ if form != CrsdForm::NonceOnly && identity.is_empty() => {
                Err(CryptoError::Malformed("identity must not be empty"))
            }
            _ => Ok(Crsd { form, identity }),
        }
    }

    pub fn nonce_only() -> Self {
        Crsd {
            form: CrsdForm::NonceOnly,
            identity: Bytes::new(),
        }
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.push(self.form.to_byte());
        out.extend_from_slice(&(self.identity.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.identity);
    }

    fn decode_from(bytes: &[u8]) -> Result<(Self, &[u8]), CryptoError> {
        let (&form, rest) = bytes
            .split_first()
            .ok_or(CryptoError::Malformed("truncated crsd"))?;
        let form = CrsdForm::from_byte(form).ok_or(CryptoError::Malformed("bad crsd form"))?;
        let (identity, rest) = split_field(rest)?;
        Ok((
            Crsd::new(form, Bytes::copy_from_slice(identity))?,
            rest,
        ))
    }
}

/// Secure consumer-specific data: identity, fresh nonce, timestamp, and a
/// keyed tag over all of it plus the interest name the blob is bound to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecCrsd {
    pub crsd: Crsd,
    pub nonce: Bytes,
    pub timestamp: Tick,
    pub tag: Bytes,
}

impl SecCrsd {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.crsd.encode_into(&mut out);
        out.extend_from_slice(&(self.nonce.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.nonce);
        out.extend_from_slice(&self.timestamp.to_be_bytes());
        out.extend_from_slice(&(self.tag.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.tag);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CryptoError> {
        let (crsd, rest) = Crsd::decode_from(bytes)?;
        let (nonce, rest) = split_field(rest)?;
        if rest.len() < 8 {
            return Err(CryptoError::Malformed("truncated timestamp"));
        }
        let timestamp = u64::from_be_bytes(rest[..8].try_into().unwrap());
        let (tag, rest) = split_field(&rest[8..])?;
        if !rest.is_empty() {
            return Err(CryptoError::Malformed("trailing bytes"));
        }
        Ok(SecCrsd {
            crsd,
            nonce: Bytes::copy_from_slice(nonce),
            timestamp,
            tag: Bytes::copy_from_slice(tag),
        })
    }

    /// The byte string the keyed tag covers: the crsd, nonce and timestamp
    /// encodings, then the wire encoding of the bound interest name.
    pub fn tag_input(crsd: &Crsd, nonce: &[u8], timestamp: Tick, name: &Name) -> Vec<u8> {
        let mut out = Vec::new();
        crsd.encode_into(&mut out);
        out.extend_from_slice(&(nonce.len() as u16).to_be_bytes());
        out.extend_from_slice(nonce);
        out.extend_from_slice(&timestamp.to_be_bytes());
        out.extend_from_slice(&encode_name(name));
        out
    }
}

/// Draws a nonce of exactly `bits` bits (high bits of the leading byte are
/// masked off when `bits` is not a multiple of eight).
fn draw_nonce(bits: u32, rng: &mut dyn RngCore) -> Bytes {
    assert!(bits >= 1, "nonce must have at least one bit");
    let nbytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes];
    rng.fill_bytes(&mut buf);
    let extra = (nbytes as u32 * 8 - bits) as u8;
    if extra > 0 {
        buf[0] &= 0xFF >> extra;
    }
    Bytes::from(buf)
}

/// Builds a [`SecCrsd`] for an interest with the given name: fresh nonce,
/// current clock as timestamp, and a tag binding everything to the name.
pub fn make_sec_crsd(
    crsd: &Crsd,
    name: &Name,
    key: &TagKey,
    nonce_bits: u32,
    clock: Tick,
    rng: &mut dyn RngCore,
) -> SecCrsd {
    let nonce = draw_nonce(nonce_bits, rng);
    let input = SecCrsd::tag_input(crsd, &nonce, clock, name);
    SecCrsd {
        crsd: crsd.clone(),
        nonce,
        timestamp: clock,
        tag: compute_tag(key, &input),
    }
}

/// Producer-side verification: the tag must verify for the stated name,
/// the timestamp must fall inside the replay window's acceptable range,
/// and the nonce must be new within that window. Accepting records the
/// nonce.
pub fn verify_sec_crsd(
    s: &SecCrsd,
    name: &Name,
    verifier: &TagVerifier,
    window: &mut ReplayWindow,
    clock: Tick,
) -> Result<(), Reject> {
    let input = SecCrsd::tag_input(&s.crsd, &s.nonce, s.timestamp, name);
    if !verify_tag(verifier, &input, &s.tag) {
        return Err(Reject::BadTag);
    }
    window.check_and_record(&s.nonce, s.timestamp, clock)
}

/// Which encryption backs an [`ACrsd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcrsdScheme {
    /// Hashed-ElGamal under the producer's public key.
    PublicKey,
    /// Randomized symmetric encryption under a consumer-producer shared
    /// key, selected by a cleartext key tag.
    SharedKey,
}

const SCHEME_PK: u8 = 0x01;
const SCHEME_SYM: u8 = 0x02;

/// Anonymous consumer-specific data: an encrypted [`SecCrsd`]. The first
/// ciphertext byte selects the scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ACrsd {
    pub ciphertext: Bytes,
}

impl ACrsd {
    pub fn scheme(&self) -> Result<AcrsdScheme, CryptoError> {
        match self.ciphertext.first() {
            Some(&SCHEME_PK) => Ok(AcrsdScheme::PublicKey),
            Some(&SCHEME_SYM) => Ok(AcrsdScheme::SharedKey),
            _ => Err(CryptoError::Malformed("bad acrsd scheme byte")),
        }
    }
}

/// Encrypts a [`SecCrsd`] under the producer's public key. Randomized:
/// repeated calls on the same input yield distinct ciphertexts.
pub fn make_a_crsd(s: &SecCrsd, pk: &BigUint, rng: &mut dyn RngCore) -> ACrsd {
    let mut out = vec![SCHEME_PK];
    out.extend_from_slice(&pk_encrypt(pk, &s.encode(), rng));
    ACrsd {
        ciphertext: Bytes::from(out),
    }
}

/// Shared-key variant: prepends the cleartext key tag the producer uses
/// to locate the secret.
pub fn make_a_crsd_sym(s: &SecCrsd, key_tag: &[u8], key: &[u8], rng: &mut dyn RngCore) -> ACrsd {
    let mut out = vec![SCHEME_SYM];
    out.extend_from_slice(&(key_tag.len() as u16).to_be_bytes());
    out.extend_from_slice(key_tag);
    out.extend_from_slice(&sym_encrypt(key, &s.encode(), rng));
    ACrsd {
        ciphertext: Bytes::from(out),
    }
}

/// Opens a public-key [`ACrsd`] with the producer secret key.
pub fn open_a_crsd(a: &ACrsd, sk: &BigUint) -> Result<SecCrsd, CryptoError> {
    match a.scheme()? {
        AcrsdScheme::PublicKey => SecCrsd::decode(&pk_decrypt(sk, &a.ciphertext[1..])?),
        AcrsdScheme::SharedKey => Err(CryptoError::Malformed("shared-key acrsd")),
    }
}

/// Opens a shared-key [`ACrsd`]; `lookup` maps the cleartext key tag to
/// the shared secret.
pub fn open_a_crsd_sym(
    a: &ACrsd,
    lookup: impl FnOnce(&[u8]) -> Option<Bytes>,
) -> Result<SecCrsd, CryptoError> {
    match a.scheme()? {
        AcrsdScheme::SharedKey => {
            let (tag, rest) = split_field(&a.ciphertext[1..])?;
            let key = lookup(tag).ok_or(CryptoError::UnknownKey)?;
            SecCrsd::decode(&sym_decrypt(&key, rest)?)
        }
        AcrsdScheme::PublicKey => Err(CryptoError::Malformed("public-key acrsd")),
    }
}

/// Bare nonce + timestamp, the payload for distinct accounting (and the
/// blind-nonce default for everything else).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctTag {
    pub nonce: Bytes,
    pub timestamp: Tick,
}

impl DistinctTag {
    pub fn generate(nonce_bits: u32, clock: Tick, rng: &mut dyn RngCore) -> Self {
        DistinctTag {
            nonce: draw_nonce(nonce_bits, rng),
            timestamp: clock,
        }
    }
}

const KIND_DISTINCT: u8 = 0x01;
const KIND_SEC: u8 = 0x02;
const KIND_ANON: u8 = 0x03;

/// Everything an interest payload (and therefore a pInt cdata entry) can
/// carry. The first byte selects the kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrsdPayload {
    Distinct(DistinctTag),
    Sec(SecCrsd),
    Anon(ACrsd),
}

impl CrsdPayload {
    pub fn encode(&self) -> Bytes {
        let mut out = Vec::new();
        match self {
            CrsdPayload::Distinct(d) => {
                out.push(KIND_DISTINCT);
                out.extend_from_slice(&(d.nonce.len() as u16).to_be_bytes());
                out.extend_from_slice(&d.nonce);
                out.extend_from_slice(&d.timestamp.to_be_bytes());
            }
            CrsdPayload::Sec(s) => {
                out.push(KIND_SEC);
                out.extend_from_slice(&s.encode());
            }
            CrsdPayload::Anon(a) => {
                out.push(KIND_ANON);
                out.extend_from_slice(&a.ciphertext);
            }
        }
        Bytes::from(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CryptoError> {
        let (&kind, rest) = bytes
            .split_first()
            .ok_or(CryptoError::Malformed("empty payload"))?;
        match kind {
            KIND_DISTINCT => {
                let (nonce, rest) = split_field(rest)?;
                let arr: [u8; 8] = rest
                    .try_into()
                    .map_err(|_| CryptoError::Malformed("distinct timestamp"))?;
                Ok(CrsdPayload::Distinct(DistinctTag {
                    nonce: Bytes::copy_from_slice(nonce),
                    timestamp: u64::from_be_bytes(arr),
                }))
            }
            KIND_SEC => Ok(CrsdPayload::Sec(SecCrsd::decode(rest)?)),
            KIND_ANON => Ok(CrsdPayload::Anon(ACrsd {
                ciphertext: Bytes::copy_from_slice(rest),
            })),
            _ => Err(CryptoError::Malformed("bad payload kind")),
        }
    }
}
