use bytes::Bytes;

use crate::name::Name;
use crate::Tick;

/// Maximum interest payload (the consumer-specific-data carrier).
pub const MAX_INTEREST_PAYLOAD: usize = 4096;
/// Maximum content object payload accepted by the codec.
pub const MAX_CONTENT_PAYLOAD: usize = 16 * 1024 * 1024;
/// Maximum validation blob carried by a content object.
pub const MAX_VALIDATION: usize = 4096;
/// Maximum router identifier carried in a push-interest origin field.
pub const MAX_ORIGIN: usize = 255;
/// Maximum entries in a push-interest cdata list.
pub const MAX_CDATA_ENTRIES: usize = u16::MAX as usize;

/// Field-level validation failure raised by message constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MessageError {
    #[error("oversize field: {0}")]
    Oversize(&'static str),
    #[error("invalid field: {0}")]
    Invalid(&'static str),
}

/// Accounting requirement a producer stamps into a content header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum AcctFlag {
    #[default]
    None,
    Aggregate,
    Distinct,
    Individual,
}

impl AcctFlag {
    pub fn to_byte(self) -> u8 {
        match self {
            AcctFlag::None => 0,
            AcctFlag::Aggregate => 1,
            AcctFlag::Distinct => 2,
            AcctFlag::Individual => 3,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(AcctFlag::None),
            1 => Some(AcctFlag::Aggregate),
            2 => Some(AcctFlag::Distinct),
            3 => Some(AcctFlag::Individual),
            _ => None,
        }
    }

    /// True for every flag except `None`.
    pub fn is_accountable(self) -> bool {
        self != AcctFlag::None
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AcctFlag::None => "NONE",
            AcctFlag::Aggregate => "AGGREGATE",
            AcctFlag::Distinct => "DISTINCT",
            AcctFlag::Individual => "INDIVIDUAL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "NONE" => Some(AcctFlag::None),
            "AGGREGATE" => Some(AcctFlag::Aggregate),
            "DISTINCT" => Some(AcctFlag::Distinct),
            "INDIVIDUAL" => Some(AcctFlag::Individual),
            _ => None,
        }
    }
}

/// A content request. Interests never carry a source address; the optional
/// payload carries consumer-specific data toward the producer.
///
/// An empty payload is normalized to "no payload" so the codec stays
/// bijective: on the wire, payload length zero means absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interest {
    name: Name,
    payload: Option<Bytes>,
}

impl Interest {
    pub fn new(name: Name, payload: Option<Bytes>) -> Result<Self, MessageError> {
        let payload = payload.filter(|p| !p.is_empty());
        if let Some(p) = &payload {
            if p.len() > MAX_INTEREST_PAYLOAD {
                return Err(MessageError::Oversize("interest payload"));
            }
        }
        Ok(Interest { name, payload })
    }

    /// Interest with no payload.
    pub fn plain(name: Name) -> Self {
        Interest {
            name,
            payload: None,
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn payload(&self) -> Option<&Bytes> {
        self.payload.as_ref()
    }
}

/// Named data satisfying an interest by exact name match.
///
/// `expiry_time` is the producer-recommended caching duration in ticks;
/// zero forbids caching at any router.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentObject {
    name: Name,
    payload: Bytes,
    acct: AcctFlag,
    expiry_time: Tick,
    validation: Bytes,
}

impl ContentObject {
    pub fn new(
        name: Name,
        payload: Bytes,
        acct: AcctFlag,
        expiry_time: Tick,
        validation: Bytes,
    ) -> Result<Self, MessageError> {
        if payload.len() > MAX_CONTENT_PAYLOAD {
            return Err(MessageError::Oversize("content payload"));
        }
        if validation.len() > MAX_VALIDATION {
            return Err(MessageError::Oversize("validation"));
        }
        Ok(ContentObject {
            name,
            payload,
            acct,
            expiry_time,
            validation,
        })
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn payload(&self) -> &Bytes {
        &self.payload
    }

    pub fn acct(&self) -> AcctFlag {
        self.acct
    }

    pub fn expiry_time(&self) -> Tick {
        self.expiry_time
    }

    pub fn validation(&self) -> &Bytes {
        &self.validation
    }

    /// True when some router may cache this object.
    pub fn cacheable(&self) -> bool {
        self.expiry_time > 0
    }
}

/// Push interest: a stateless, never-multicast notification a router sends
/// toward a producer to report a cache hit or collapsed interests.
///
/// For `Aggregate` accounting `cdata` stays empty; for `Distinct` and
/// `Individual` it carries exactly `count` consumer-specific data blobs
/// (possibly empty ones, when the triggering interests had no payload).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PInt {
    name: Name,
    ptype: AcctFlag,
    origin: Bytes,
    count: u64,
    cdata: Vec<Bytes>,
}

impl PInt {
    pub fn new(
        name: Name,
        ptype: AcctFlag,
        origin: Bytes,
        count: u64,
        cdata: Vec<Bytes>,
    ) -> Result<Self, MessageError> {
        if ptype == AcctFlag::None {
            return Err(MessageError::Invalid("pInt type must not be NONE"));
        }
        if count == 0 {
            return Err(MessageError::Invalid("pInt count must be positive"));
        }
        if origin.is_empty() {
            return Err(MessageError::Invalid("pInt origin must not be empty"));
        }
        if origin.len() > MAX_ORIGIN {
            return Err(MessageError::Oversize("pInt origin"));
        }
        if cdata.len() > MAX_CDATA_ENTRIES {
            return Err(MessageError::Oversize("pInt cdata list"));
        }
        match ptype {
            AcctFlag::Aggregate => {
                if !cdata.is_empty() {
                    return Err(MessageError::Invalid("aggregate pInt carries no cdata"));
                }
            }
            _ => {
                if cdata.len() as u64 != count {
                    return Err(MessageError::Invalid("cdata length must equal count"));
                }
            }
        }
        for c in &cdata {
            if c.len() > MAX_INTEREST_PAYLOAD {
                return Err(MessageError::Oversize("pInt cdata entry"));
            }
        }
        Ok(PInt {
            name,
            ptype,
            origin,
            count,
            cdata,
        })
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn ptype(&self) -> AcctFlag {
        self.ptype
    }

    pub fn origin(&self) -> &Bytes {
        &self.origin
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn cdata(&self) -> &[Bytes] {
        &self.cdata
    }
}

/// Reason a producer refuses to serve an interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NackReason {
    /// Required consumer-specific data was absent.
    MissingCrsd,
    /// Consumer-specific data was present but failed verification.
    BadCrsd,
}

impl NackReason {
    pub fn to_byte(self) -> u8 {
        match self {
            NackReason::MissingCrsd => 0,
            NackReason::BadCrsd => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(NackReason::MissingCrsd),
            1 => Some(NackReason::BadCrsd),
            _ => None,
        }
    }
}

/// Negative acknowledgment echoing a rejected interest's name, with an
/// opaque blob describing the consumer-specific data the producer expects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nack {
    name: Name,
    reason: NackReason,
    requirements: Bytes,
}

impl Nack {
    pub fn new(name: Name, reason: NackReason, requirements: Bytes) -> Result<Self, MessageError> {
        if requirements.len() > MAX_VALIDATION {
            return Err(MessageError::Oversize("nack requirements"));
        }
        Ok(Nack {
            name,
            reason,
            requirements,
        })
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn reason(&self) -> NackReason {
        self.reason
    }

    pub fn requirements(&self) -> &Bytes {
        &self.requirements
    }
}

/// Any wire message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Interest(Interest),
    Content(ContentObject),
    PInt(PInt),
    Nack(Nack),
}

/// Message discriminant, handy as a metrics index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MessageKind {
    Interest = 0,
    Content = 1,
    PInt = 2,
    Nack = 3,
}

impl MessageKind {
    pub const ALL: [MessageKind; 4] = [
        MessageKind::Interest,
        MessageKind::Content,
        MessageKind::PInt,
        MessageKind::Nack,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Interest => "interest",
            MessageKind::Content => "content",
            MessageKind::PInt => "pint",
            MessageKind::Nack => "nack",
        }
    }
}

impl Message {
    pub fn name(&self) -> &Name {
        match self {
            Message::Interest(m) => m.name(),
            Message::Content(m) => m.name(),
            Message::PInt(m) => m.name(),
            Message::Nack(m) => m.name(),
        }
    }

    pub fn kind(&self) -> MessageKind {
        match self {
            Message::Interest(_) => MessageKind::Interest,
            Message::Content(_) => MessageKind::Content,
            Message::PInt(_) => MessageKind::PInt,
            Message::Nack(_) => MessageKind::Nack,
        }
    }
}
