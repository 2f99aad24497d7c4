//! Core types for a content-centric data plane: hierarchical names,
//! the four wire messages (interest, content object, push interest, NACK),
//! a bit-exact length-prefixed codec, and longest-prefix matching.
//!
//! Everything here is an immutable value after construction; constructors
//! validate all field limits so the codec itself never has to fail on the
//! encode side. The byte-level wire layout is documented in
//! `docs/formats.md` at the repository root.

mod codec;
mod lpm;
mod message;
mod name;

pub use codec::{decode, encode, encode_name, encoded_len, DecodeError};
pub use lpm::{longest_prefix_match, PrefixTable};
pub use message::{
    AcctFlag, ContentObject, Interest, Message, MessageError, MessageKind, Nack, NackReason, PInt,
};
pub use name::{Name, NamePrefix, MAX_COMPONENTS, MAX_COMPONENT_LEN, MAX_NAME_ENCODED_LEN};

/// Simulation time, in ticks. One tick is nominally one millisecond.
pub type Tick = u64;

/// Opaque router identifier carried in push-interest `origin` fields,
/// e.g. a key digest or an administratively assigned byte string.
pub type RouterId = bytes::Bytes;
