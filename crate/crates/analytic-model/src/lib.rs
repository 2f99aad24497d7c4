//! Closed-form oracle for the single-path comparison of the three
//! accounting schemes, and for the per-link byte overhead pInts impose.
//!
//! Scenario: one consumer behind a line of routers to one producer, with
//! the requested content cached at router `R_c`. Messages are counted at
//! two measurement links:
//!
//! * `p_l`: messages crossing the consumer-facing link (both
//!   directions), per `gamma` total requests;
//! * `p_r`: messages crossing the producer-facing link.
//!
//! With the cache at the first-hop router:
//!
//! * encryption-based accounting sends two interest/content exchanges per
//!   request (content + decryption key, the key leg end-to-end), so
//!   `(p_l, p_r) = (4g, 2g)` for `g` requests;
//! * pInt-based accounting sends one exchange plus one pInt upstream:
//!   `(2g, g)`, exactly half of the encryption scheme on both links;
//! * with no caches at all every request is a full round trip:
//!   `(2g, 2g)`.
//!
//! The simulator is validated against these numbers exactly.

use bytes::Bytes;
use ccn_core::{encoded_len, AcctFlag, ContentObject, Message, Name, PInt};

/// Accounting scheme under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Encrypted content, uncacheable decryption keys fetched per request.
    Encryption,
    /// Push-interest accounting over cached content.
    Pint,
    /// No router caches (every interest reaches the producer).
    Cacheless,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Encryption => "ENCRYPTION",
            Scheme::Pint => "PINT",
            Scheme::Cacheless => "CACHELESS",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ENCRYPTION" => Some(Scheme::Encryption),
            "PINT" => Some(Scheme::Pint),
            "CACHELESS" => Some(Scheme::Cacheless),
            _ => None,
        }
    }
}

/// One-direction path message counts for `gamma` requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeCounts {
    pub p_l: u64,
    pub p_r: u64,
    pub gamma: u64,
}

/// Exact message counts on the consumer-facing and producer-facing links
/// for `gamma` requests under each scheme.
pub fn message_counts(scheme: Scheme, gamma: u64) -> SchemeCounts {
    let (p_l, p_r) = match scheme {
        Scheme::Encryption => (4 * gamma, 2 * gamma),
        Scheme::Pint => (2 * gamma, gamma),
        Scheme::Cacheless => (2 * gamma, 2 * gamma),
    };
    SchemeCounts { p_l, p_r, gamma }
}

/// Inputs for the per-link overhead ratio: a line topology of
/// `total_links` links (consumer at one end, producer at the other) with
/// every request satisfied by the cache at link `cache_link_index`'s
/// upstream router. Header sizes come from the wire codec with a
/// single-component name of `name_bytes` bytes.
#[derive(Debug, Clone, Copy)]
pub struct OverheadParams {
    pub payload_bytes: usize,
    pub name_bytes: usize,
    pub origin_bytes: usize,
    pub total_links: usize,
    /// 1-based index of the consumer-side link below the caching router.
    pub cache_link_index: usize,
}

impl OverheadParams {
    pub fn new(payload_bytes: usize, total_links: usize) -> Self {
        OverheadParams {
            payload_bytes,
            name_bytes: 40,
            origin_bytes: 8,
            total_links,
            cache_link_index: 1,
        }
    }
}

fn synthetic_name(name_bytes: usize) -> Name {
    assert!(
        (1..=255).contains(&name_bytes),
        "synthetic name must fit one component"
    );
    Name::new(vec![vec![b'n'; name_bytes]]).unwrap()
}

/// Wire size of the pInt that reports one cache hit on aggregate-flagged
/// content.
pub fn pint_wire_size(name_bytes: usize, origin_bytes: usize) -> usize {
    let pint = PInt::new(
        synthetic_name(name_bytes),
        AcctFlag::Aggregate,
        Bytes::from(vec![b'r'; origin_bytes]),
        1,
        vec![],
    )
    .unwrap();
    encoded_len(&Message::PInt(pint))
}

/// Wire size of a content object with the given payload and an empty
/// validation field.
pub fn content_wire_size(name_bytes: usize, payload_bytes: usize) -> usize {
    let co = ContentObject::new(
        synthetic_name(name_bytes),
        Bytes::from(vec![0u8; payload_bytes]),
        AcctFlag::Aggregate,
        1,
        Bytes::new(),
    )
    .unwrap();
    encoded_len(&Message::Content(co))
}

/// Extra bytes a pInt adds on one link, as a fraction of the content
/// size. Zero on the links between the consumer and the cache (the pInt
/// never travels there); `size(pInt) / size(content)` on every link
/// upstream of the cache.
pub fn overhead_ratio(params: &OverheadParams, link_index: usize) -> f64 {
    assert!(
        link_index >= 1 && link_index <= params.total_links,
        "link index out of range"
    );
    if link_index <= params.cache_link_index {
        return 0.0;
    }
    pint_wire_size(params.name_bytes, params.origin_bytes) as f64
        / content_wire_size(params.name_bytes, params.payload_bytes) as f64
}

/// Total extra bytes per request across the whole path: one pInt on every
/// link upstream of the cache.
pub fn total_extra_bytes(params: &OverheadParams) -> u64 {
    let links_with_pint = params.total_links - params.cache_link_index;
    (links_with_pint * pint_wire_size(params.name_bytes, params.origin_bytes)) as u64
}
