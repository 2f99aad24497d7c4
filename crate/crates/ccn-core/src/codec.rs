//! Length-prefixed wire codec.
//!
//! Layout (all integers big-endian; full byte-level description in
//! `docs/formats.md`):
//!
//! ```text
//! message  := type-byte body          0x01 interest, 0x02 content,
//!                                     0x03 pInt, 0x04 nack
//! field    := u16 length, bytes       (short field)
//! blob32   := u32 length, bytes       (content payload only)
//! name     := u16 count, count*field  (components)
//! interest := name field(payload)             -- length 0 = no payload
//! content  := name blob32(payload) field(acct,1B)
//!             field(expiry,8B) field(validation)
//! pInt     := name field(ptype,1B) field(origin) field(count,8B)
//!             list(cdata)            -- u16 count, count*field
//! nack     := name field(reason,1B) field(requirements)
//! ```
//!
//! Encoding is a pure function of the message value; constructors enforce
//! every field limit, so `encode` is infallible. `decode` accepts exactly
//! the strings `encode` produces and rejects everything else.

use bytes::Bytes;

use crate::message::{
    AcctFlag, ContentObject, Interest, Message, MessageError, Nack, NackReason, PInt,
};
use crate::name::Name;

const TAG_INTEREST: u8 = 0x01;
const TAG_CONTENT: u8 = 0x02;
const TAG_PINT: u8 = 0x03;
const TAG_NACK: u8 = 0x04;

/// Decode failure: the input is not the encoding of any valid message.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("truncated message")]
    Truncated,
    #[error("unknown type tag {0:#04x}")]
    BadTag(u8),
    #[error("trailing bytes after message")]
    Trailing,
    #[error("length word exceeds field limit")]
    BadLength,
    #[error("malformed message: {0}")]
    Invalid(#[from] MessageError),
}

/// Encodes a bare name with the same layout it has inside messages.
/// Used wherever a name must be bound into a byte string (e.g. keyed
/// tags over consumer-specific data).
pub fn encode_name(name: &Name) -> Vec<u8> {
    let mut out = Vec::with_capacity(name.encoded_len());
    put_name(&mut out, name);
    out
}

/// Encodes a message to its canonical byte string.
pub fn encode(msg: &Message) -> Vec<u8> {
    let mut out = Vec::with_capacity(encoded_len(msg));
    match msg {
        Message::Interest(i) => {
            out.push(TAG_INTEREST);
            put_name(&mut out, i.name());
            put_field(&mut out, i.payload().map(|b| b.as_ref()).unwrap_or(&[]));
        }
        Message::Content(c) => {
            out.push(TAG_CONTENT);
            put_name(&mut out, c.name());
            put_blob32(&mut out, c.payload());
            put_field(&mut out, &[c.acct().to_byte()]);
            put_field(&mut out, &c.expiry_time().to_be_bytes());
            put_field(&mut out, c.validation());
        }
        Message::PInt(p) => {
            out.push(TAG_PINT);
            put_name(&mut out, p.name());
            put_field(&mut out, &[p.ptype().to_byte()]);
            put_field(&mut out, p.origin());
            put_field(&mut out, &p.count().to_be_bytes());
            out.extend_from_slice(&(p.cdata().len() as u16).to_be_bytes());
            for c in p.cdata() {
                put_field(&mut out, c);
            }
        }
        Message::Nack(n) => {
            out.push(TAG_NACK);
            put_name(&mut out, n.name());
            put_field(&mut out, &[n.reason().to_byte()]);
            put_field(&mut out, n.requirements());
        }
    }
    out
}

/// Encoded size in bytes, computed without materializing the encoding.
/// Always equals `encode(msg).len()`.
pub fn encoded_len(msg: &Message) -> usize {
    match msg {
        Message::Interest(i) => {
            1 + i.name().encoded_len() + 2 + i.payload().map(|p| p.len()).unwrap_or(0)
        }
        Message::Content(c) => {
            1 + c.name().encoded_len() + 4 + c.payload().len() + 3 + 10 + 2 + c.validation().len()
        }
        Message::PInt(p) => {
            1 + p.name().encoded_len()
                + 3
                + 2
                + p.origin().len()
                + 10
                + 2
                + p.cdata().iter().map(|c| 2 + c.len()).sum::<usize>()
        }
        Message::Nack(n) => 1 + n.name().encoded_len() + 3 + 2 + n.requirements().len(),
    }
}

/// Decodes one message, requiring the input to be consumed exactly.
pub fn decode(bytes: &[u8]) -> Result<Message, DecodeError> {
    let mut r = Reader::new(bytes);
    let tag = r.take_u8()?;
    let msg = match tag {
        TAG_INTEREST => {
            let name = read_name(&mut r)?;
            let payload = r.read_field()?;
            let payload = (!payload.is_empty()).then(|| Bytes::copy_from_slice(payload));
            Message::Interest(Interest::new(name, payload)?)
        }
        TAG_CONTENT => {
            let name = read_name(&mut r)?;
            let payload = Bytes::copy_from_slice(r.read_blob32()?);
            let acct = read_enum_byte(&mut r, AcctFlag::from_byte)?;
            let expiry = read_u64_field(&mut r)?;
            let validation = Bytes::copy_from_slice(r.read_field()?);
            Message::Content(ContentObject::new(name, payload, acct, expiry, validation)?)
        }
        TAG_PINT => {
            let name = read_name(&mut r)?;
            let ptype = read_enum_byte(&mut r, AcctFlag::from_byte)?;
            let origin = Bytes::copy_from_slice(r.read_field()?);
            let count = read_u64_field(&mut r)?;
            let n = r.take_u16()? as usize;
            let mut cdata = Vec::with_capacity(n.min(1024));
            for _ in 0..n {
                cdata.push(Bytes::copy_from_slice(r.read_field()?));
            }
            Message::PInt(PInt::new(name, ptype, origin, count, cdata)?)
        }
        TAG_NACK => {
            let name = read_name(&mut r)?;
            let reason = read_enum_byte(&mut r, NackReason::from_byte)?;
            let requirements = Bytes::copy_from_slice(r.read_field()?);
            Message::Nack(Nack::new(name, reason, requirements)?)
        }
        other => return Err(DecodeError::BadTag(other)),
    };
    if !r.is_empty() {
        return Err(DecodeError::Trailing);
    }
    Ok(msg)
}

fn put_field(out: &mut Vec<u8>, bytes: &[u8]) {
    debug_assert!(bytes.len() <= u16::MAX as usize);
    out.extend_from_slice(&(bytes.len() as u16).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn put_blob32(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn put_name(out: &mut Vec<u8>, name: &Name) {
    out.extend_from_slice(&(name.component_count() as u16).to_be_bytes());
    for c in name.components() {
        put_field(out, c);
    }
}

fn read_name(r: &mut Reader<'_>) -> Result<Name, DecodeError> {
    let n = r.take_u16()? as usize;
    let mut components = Vec::with_capacity(n.min(crate::name::MAX_COMPONENTS));
    for _ in 0..n {
        components.push(r.read_field()?.to_vec());
    }
    Ok(Name::new(components)?)
}

fn read_enum_byte<T>(r: &mut Reader<'_>, from: fn(u8) -> Option<T>) -> Result<T, DecodeError> {
    let f = r.read_field()?;
    if f.len() != 1 {
        return Err(DecodeError::BadLength);
    }
    from(f[0]).ok_or(DecodeError::BadLength)
}

fn read_u64_field(r: &mut Reader<'_>) -> Result<u64, DecodeError> {
    let f = r.read_field()?;
    let arr: [u8; 8] = f.try_into().map_err(|_| DecodeError::BadLength)?;
    Ok(u64::from_be_bytes(arr))
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn is_empty(&self) -> bool {
        self.pos == self.buf.len()
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.buf.len() - self.pos < n {
            return Err(DecodeError::Truncated);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn take_u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn take_u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn take_u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn read_field(&mut self) -> Result<&'a [u8], DecodeError> {
        let len = self.take_u16()? as usize;
        self.take(len)
    }

    fn read_blob32(&mut self) -> Result<&'a [u8], DecodeError> {
        let len = self.take_u32()? as usize;
        self.take(len)
    }
}
