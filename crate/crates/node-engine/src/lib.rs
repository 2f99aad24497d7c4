//! Per-node forwarding engine.
//!
//! A node owns three structures: a content store (exact-match cache with
//! expiry and optional LRU capacity), a pending-interest table that
//! collapses same-name interests onto one upstream transmission, and a
//! FIB routed by longest-prefix match. On top of plain forwarding, the
//! node reports accounting events for accountable content by generating
//! push interests (pInts):
//!
//! * on a cache hit, one pInt with count 1 toward the producer;
//! * when content satisfies a PIT entry with collapsed arrivals, one pInt
//!   covering exactly the arrivals that were never forwarded upstream.
//!
//! pInts are forwarded to a single FIB next hop, never multicast, and
//! leave no PIT or cache state behind.

mod node;
mod state;

pub use node::{generate_pint, NodeConfig, NodeState};
pub use state::{CsEntry, FibEntry, NodeStats, PitArrival, PitEntry};

/// Identifier of one of the node's interfaces. The simulation uses the
/// neighbor's node id, but the engine treats it as opaque.
pub type InterfaceId = u32;
