//! Local key registry: stands in for offline key distribution. Loaded
//! from a line-oriented text file (see `docs/formats.md`):
//!
//! ```text
//! producer <prefix-lci> pk=<hex> [sk=<hex>]
//! mac <consumer-hex> <prefix-lci> key=<hex>
//! sig <consumer-hex> pk=<hex> [sk=<hex>]
//! sym <tag-hex> <consumer-hex> key=<hex>
//! ```
//!
//! Secret halves (`sk=`, MAC keys, shared keys) live in the same file;
//! a real deployment would split consumer and producer views, which is
//! out of scope here.

use std::collections::BTreeMap;
use std::path::Path;

use bytes::Bytes;
use ccn_core::{Name, NamePrefix};
use num_bigint::BigUint;
use rand_core::RngCore;

use crate::group::{SchnorrKeypair, SchnorrPublic};
use crate::pkenc::pk_keygen;
use crate::tag::{TagKey, TagVerifier};

/// Which tag instantiation consumers use for secure consumer-specific
/// data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagScheme {
    /// Shared-key MAC: cheap, needs a priori key distribution.
    #[default]
    Mac,
    /// Signature: no shared secret, but costlier to make and verify.
    Sig,
}

impl TagScheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mac" => Some(TagScheme::Mac),
            "sig" => Some(TagScheme::Sig),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct ProducerKeys {
    pk: BigUint,
    sk: Option<BigUint>,
}

#[derive(Debug, Clone)]
struct SigKeys {
    pk: SchnorrPublic,
    sk: Option<BigUint>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum RegistryError {
    #[error("cannot read keys file: {0}")]
    Io(String),
    #[error("keys file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// All provisioned keys, indexed by producer prefix and consumer id.
#[derive(Debug, Clone, Default)]
pub struct KeyRegistry {
    producers: BTreeMap<NamePrefix, ProducerKeys>,
    mac_keys: BTreeMap<(Bytes, NamePrefix), Bytes>,
    sig_keys: BTreeMap<Bytes, SigKeys>,
    sym_keys: BTreeMap<Bytes, (Bytes, Bytes)>, // tag -> (consumer, key)
    sym_by_consumer: BTreeMap<Bytes, Bytes>,   // consumer -> tag
}

impl KeyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Deterministically provisions a full key set for one producer prefix
    /// and a list of consumer ids.
    pub fn generate(
        rng: &mut dyn RngCore,
        prefix: &NamePrefix,
        consumers: &[Bytes],
        scheme: TagScheme,
    ) -> Self {
        let mut reg = KeyRegistry::new();
        let kp = pk_keygen(rng);
        reg.producers.insert(
            prefix.clone(),
            ProducerKeys {
                pk: kp.pk,
                sk: Some(kp.sk),
            },
        );
        for c in consumers {
            match scheme {
                TagScheme::Mac => {
                    let mut key = vec![0u8; 32];
                    rng.fill_bytes(&mut key);
                    reg.mac_keys
                        .insert((c.clone(), prefix.clone()), Bytes::from(key));
                }
                TagScheme::Sig => {
                    let kp = SchnorrKeypair::generate(rng);
                    reg.sig_keys.insert(
                        c.clone(),
                        SigKeys {
                            pk: kp.public,
                            sk: Some(kp.sk),
                        },
                    );
                }
            }
            let mut tag = vec![0u8; 8];
            rng.fill_bytes(&mut tag);
            let mut key = vec![0u8; 32];
            rng.fill_bytes(&mut key);
            let tag = Bytes::from(tag);
            reg.sym_keys
                .insert(tag.clone(), (c.clone(), Bytes::from(key)));
            reg.sym_by_consumer.insert(c.clone(), tag);
        }
        reg
    }

    pub fn producer_pk(&self, prefix: &NamePrefix) -> Option<&BigUint> {
        self.producers.get(prefix).map(|p| &p.pk)
    }

    pub fn producer_sk(&self, prefix: &NamePrefix) -> Option<&BigUint> {
        self.producers.get(prefix).and_then(|p| p.sk.as_ref())
    }

    /// The tagging key a consumer uses toward a producer: its shared MAC
    /// key when one is provisioned, else its signing keypair.
    pub fn tag_key(&self, consumer: &Bytes, prefix: &NamePrefix) -> Option<TagKey> {
        if let Some(k) = self.mac_keys.get(&(consumer.clone(), prefix.clone())) {
            return Some(TagKey::Mac(k.clone()));
        }
        let sig = self.sig_keys.get(consumer)?;
        let sk = sig.sk.clone()?;
        Some(TagKey::Sig(SchnorrKeypair {
            sk,
            public: sig.pk.clone(),
        }))
    }

    /// The matching verification key on the producer side.
    pub fn verifier(&self, consumer: &Bytes, prefix: &NamePrefix) -> Option<TagVerifier> {
        if let Some(k) = self.mac_keys.get(&(consumer.clone(), prefix.clone())) {
            return Some(TagVerifier::Mac(k.clone()));
        }
        self.sig_keys
            .get(consumer)
            .map(|s| TagVerifier::Sig(s.pk.clone()))
    }

    pub fn sym_for_consumer(&self, consumer: &Bytes) -> Option<(Bytes, Bytes)> {
        let tag = self.sym_by_consumer.get(consumer)?;
        let (_, key) = self.sym_keys.get(tag)?;
        Some((tag.clone(), key.clone()))
    }

    pub fn sym_by_tag(&self, tag: &[u8]) -> Option<Bytes> {
        self.sym_keys.get(tag).map(|(_, k)| k.clone())
    }

    pub fn from_file(path: &Path) -> Result<Self, RegistryError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| RegistryError::Io(format!("{path:?}: {e}")))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut reg = KeyRegistry::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let role = parts.next().unwrap();
            let fields: Vec<&str> = parts.collect();
            let err = |msg: &str| RegistryError::Parse {
                line,
                msg: msg.to_string(),
            };
            match role {
                "producer" => {
                    let prefix = Name::parse(fields.first().ok_or_else(|| err("missing prefix"))?)
                        .map_err(|e| err(&e.to_string()))?;
                    let pk = kv_biguint(&fields, "pk").ok_or_else(|| err("missing pk="))?;
                    let sk = kv_biguint(&fields, "sk");
                    reg.producers.insert(prefix, ProducerKeys { pk, sk });
                }
                "mac" => {
                    let consumer =
                        hex_bytes(fields.first().ok_or_else(|| err("missing consumer id"))?)
                            .ok_or_else(|| err("bad consumer hex"))?;
                    let prefix = Name::parse(fields.get(1).ok_or_else(|| err("missing prefix"))?)
                        .map_err(|e| err(&e.to_string()))?;
                    let key = kv_bytes(&fields, "key").ok_or_else(|| err("missing key="))?;
                    reg.mac_keys.insert((consumer, prefix), key);
                }
                "sig" => {
                    let consumer =
                        hex_bytes(fields.first().ok_or_else(|| err("missing consumer id"))?)
                            .ok_or_else(|| err("bad consumer hex"))?;
                    let pk = kv_biguint(&fields, "pk").ok_or_else(|| err("missing pk="))?;
                    let sk = kv_biguint(&fields, "sk");
                    reg.sig_keys.insert(
                        consumer,
                        SigKeys {
                            pk: SchnorrPublic { pk },
                            sk,
                        },
                    );
                }
                "sym" => {
                    let tag = hex_bytes(fields.first().ok_or_else(|| err("missing key tag"))?)
                        .ok_or_else(|| err("bad tag hex"))?;
                    let consumer =
                        hex_bytes(fields.get(1).ok_or_else(|| err("missing consumer id"))?)
                            .ok_or_else(|| err("bad consumer hex"))?;
                    let key = kv_bytes(&fields, "key").ok_or_else(|| err("missing key="))?;
                    reg.sym_keys.insert(tag.clone(), (consumer.clone(), key));
                    reg.sym_by_consumer.insert(consumer, tag);
                }
                other => return Err(err(&format!("unknown role '{other}'"))),
            }
        }
        Ok(reg)
    }

    /// Serializes the registry in the file format `parse` accepts.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from("# key registry\n");
        for (prefix, pk) in &self.producers {
            out.push_str(&format!(
                "producer {} pk={}",
                prefix.to_lci(),
                hex::encode(pk.pk.to_bytes_be())
            ));
            if let Some(sk) = &pk.sk {
                out.push_str(&format!(" sk={}", hex::encode(sk.to_bytes_be())));
            }
            out.push('\n');
        }
        for ((consumer, prefix), key) in &self.mac_keys {
            out.push_str(&format!(
                "mac {} {} key={}\n",
                hex::encode(consumer),
                prefix.to_lci(),
                hex::encode(key)
            ));
        }
        for (consumer, sig) in &self.sig_keys {
            out.push_str(&format!(
                "sig {} pk={}",
                hex::encode(consumer),
                hex::encode(sig.pk.pk.to_bytes_be())
            ));
            if let Some(sk) = &sig.sk {
                out.push_str(&format!(" sk={}", hex::encode(sk.to_bytes_be())));
            }
            out.push('\n');
        }
        for (tag, (consumer, key)) in &self.sym_keys {
            out.push_str(&format!(
                "sym {} {} key={}\n",
                hex::encode(tag),
                hex::encode(consumer),
                hex::encode(key)
            ));
        }
        out
    }
}

fn kv<'a>(fields: &[&'a str], key: &str) -> Option<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

fn kv_bytes(fields: &[&str], key: &str) -> Option<Bytes> {
    kv(fields, key).and_then(hex_bytes)
}

fn kv_biguint(fields: &[&str], key: &str) -> Option<BigUint> {
    kv(fields, key).and_then(|h| hex::decode(h).ok().map(|b| BigUint::from_bytes_be(&b)))
}

fn hex_bytes(s: &str) -> Option<Bytes> {
    hex::decode(s).ok().map(Bytes::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generate_serialize_parse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let prefix = Name::parse("lci:/acme").unwrap();
        let consumers = vec![Bytes::from_static(b"cr1"), Bytes::from_static(b"cr2")];
        let reg = KeyRegistry::generate(&mut rng, &prefix, &consumers, TagScheme::Mac);
        let text = reg.to_file_string();
        let parsed = KeyRegistry::parse(&text).unwrap();

        assert_eq!(parsed.producer_pk(&prefix), reg.producer_pk(&prefix));
        assert_eq!(parsed.producer_sk(&prefix), reg.producer_sk(&prefix));
        for c in &consumers {
            assert!(parsed.tag_key(c, &prefix).is_some());
            assert!(parsed.verifier(c, &prefix).is_some());
            let (tag, key) = parsed.sym_for_consumer(c).unwrap();
            assert_eq!(parsed.sym_by_tag(&tag), Some(key));
        }
    }

    #[test]
    fn sig_scheme_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let prefix = Name::parse("lci:/p").unwrap();
        let consumers = vec![Bytes::from_static(b"c")];
        let reg = KeyRegistry::generate(&mut rng, &prefix, &consumers, TagScheme::Sig);
        let parsed = KeyRegistry::parse(&reg.to_file_string()).unwrap();
        let key = parsed.tag_key(&consumers[0], &prefix).unwrap();
        let verifier = parsed.verifier(&consumers[0], &prefix).unwrap();
        let tag = crate::compute_tag(&key, b"msg");
        assert!(crate::verify_tag(&verifier, b"msg", &tag));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = KeyRegistry::parse("producer lci:/a\n").unwrap_err();
        match err {
            RegistryError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected: {other}"),
        }
        let err = KeyRegistry::parse("\n# ok\nbogus x\n").unwrap_err();
        match err {
            RegistryError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn unknown_parties_return_none() {
        let reg = KeyRegistry::new();
        let prefix = Name::parse("lci:/p").unwrap();
        assert!(reg.producer_pk(&prefix).is_none());
        assert!(reg.tag_key(&Bytes::from_static(b"c"), &prefix).is_none());
    }
}
