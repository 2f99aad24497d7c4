use bytes::Bytes;
use ccn_core::{ContentObject, Name, NamePrefix, Tick};

use crate::InterfaceId;

/// One cached content object. Entries with `expiry_time == 0` are never
/// created; `expires_at` is inclusive (an entry whose deadline equals the
/// clock is already gone).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsEntry {
    pub content: ContentObject,
    pub inserted_at: Tick,
    pub expires_at: Tick,
    /// LRU clock value of the last hit or insertion.
    pub(crate) last_used: u64,
}

/// One recorded interest arrival within a PIT entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitArrival {
    pub interface: InterfaceId,
    pub payload: Option<Bytes>,
    /// True for the arrival whose interest was sent upstream.
    pub forwarded: bool,
}

/// Outstanding interests for one name. With collapsing enabled exactly one
/// arrival is forwarded and the rest ride along; with collapsing disabled
/// every arrival is forwarded and none is reported as collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitEntry {
    pub name: Name,
    pub arrivals: Vec<PitArrival>,
}

impl PitEntry {
    pub fn has_interface(&self, interface: InterfaceId) -> bool {
        self.arrivals.iter().any(|a| a.interface == interface)
    }

    /// Arrivals that were collapsed rather than forwarded, in arrival
    /// order.
    pub fn collapsed(&self) -> impl Iterator<Item = &PitArrival> {
        self.arrivals.iter().filter(|a| !a.forwarded)
    }
}

/// One FIB route: a name prefix and its ordered next hops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibEntry {
    pub prefix: NamePrefix,
    pub next_hops: Vec<InterfaceId>,
}

/// Per-node event counters. "Processed" counts message arrivals handed to
/// the engine, whatever their outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeStats {
    pub interests: u64,
    pub contents: u64,
    pub pints: u64,
    pub nacks: u64,
    pub cache_hits: u64,
    pub cache_insertions: u64,
    /// Interests dropped because no FIB prefix matched.
    pub drops_no_route: u64,
    /// Content dropped because no PIT entry referenced it.
    pub drops_unsolicited: u64,
    /// pInts dropped (locally generated or forwarded) for lack of a route.
    pub pint_no_route: u64,
    /// Same-interface re-arrivals absorbed by an existing PIT entry.
    pub pit_duplicate_interface: u64,
    pub evicted_expired: u64,
    pub evicted_lru: u64,
}
