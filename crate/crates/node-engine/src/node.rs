use std::collections::BTreeMap;

use bytes::Bytes;
use ccn_core::{
    AcctFlag, ContentObject, Interest, Message, Nack, Name, PInt, PrefixTable, RouterId, Tick,
};

use crate::state::{CsEntry, FibEntry, NodeStats, PitArrival, PitEntry};
use crate::InterfaceId;

/// Forwarding knobs, fixed per node for a whole run so experiments are
/// reproducible.
#[derive(Debug, Clone)]
pub struct NodeConfig {
    /// Forward interests to every next hop of the matched FIB entry
    /// instead of the first one.
    pub multicast: bool,
    /// Collapse same-name interests onto an existing PIT entry. Disabling
    /// this forwards every interest upstream, which maximizes cache-hit
    /// pInts (one per hit) and suppresses collapsed-interest pInts.
    pub collapsing: bool,
    /// Content-store capacity; `None` is unbounded.
    pub cache_capacity: Option<usize>,
    /// When set, pInts are batched per name and flushed once per window
    /// with summed counts and concatenated cdata.
    pub batch_window: Option<Tick>,
}

impl Default for NodeConfig {
    fn default() -> Self {
        NodeConfig {
            multicast: false,
            collapsing: true,
            cache_capacity: None,
            batch_window: None,
        }
    }
}

#[derive(Debug, Clone)]
struct BatchSlot {
    ptype: AcctFlag,
    count: u64,
    cdata: Vec<Bytes>,
}

/// Mutable state of one forwarding node. Single-owner: one logical thread
/// drives a node; messages exchanged between nodes are immutable values.
#[derive(Debug, Clone)]
pub struct NodeState {
    node_id: RouterId,
    cs: BTreeMap<Name, CsEntry>,
    pit: BTreeMap<Name, PitEntry>,
    fib: PrefixTable<Vec<InterfaceId>>,
    cfg: NodeConfig,
    clock: Tick,
    lru_counter: u64,
    batches: BTreeMap<Name, BatchSlot>,
    pub stats: NodeStats,
}

impl NodeState {
    pub fn new(node_id: RouterId, cfg: NodeConfig) -> Self {
        NodeState {
            node_id,
            cs: BTreeMap::new(),
            pit: BTreeMap::new(),
            fib: PrefixTable::new(),
            cfg,
            clock: 0,
            lru_counter: 0,
            batches: BTreeMap::new(),
            stats: NodeStats::default(),
        }
    }

    pub fn node_id(&self) -> &RouterId {
        &self.node_id
    }

    pub fn install_fib(&mut self, entries: Vec<FibEntry>) {
        self.fib = entries
            .into_iter()
            .map(|e| (e.prefix, e.next_hops))
            .collect();
    }

    pub fn set_clock(&mut self, tick: Tick) {
        self.clock = tick;
    }

    pub fn clock(&self) -> Tick {
        self.clock
    }

    pub fn cs(&self) -> &BTreeMap<Name, CsEntry> {
        &self.cs
    }

    pub fn pit(&self) -> &BTreeMap<Name, PitEntry> {
        &self.pit
    }

    pub fn config(&self) -> &NodeConfig {
        &self.cfg
    }

    /// Handles an incoming interest. Exactly one of: cache hit (content
    /// back on the arrival interface, plus one pInt upstream when the
    /// content is accountable), collapse onto an existing PIT entry, or
    /// create-and-forward. Interests with no matching FIB route are
    /// dropped and counted, leaving no state.
    pub fn on_interest(
        &mut self,
        interest: Interest,
        from: InterfaceId,
    ) -> Vec<(InterfaceId, Message)> {
        self.stats.interests += 1;
        let name = interest.name().clone();

        if let Some(entry) = self.cs.get_mut(&name) {
            if entry.expires_at > self.clock {
                self.stats.cache_hits += 1;
                self.lru_counter += 1;
                entry.last_used = self.lru_counter;
                let co = entry.content.clone();
                let mut out = vec![(from, Message::Content(co.clone()))];
                if co.acct().is_accountable() {
                    let pint = generate_pint(&co, Some(&interest), None, &self.node_id, true);
                    if let Some(emit) = self.dispatch_pint(pint) {
                        out.push(emit);
                    }
                }
                return out;
            }
            // Expired but not yet swept: treat as a miss and drop it.
            self.cs.remove(&name);
            self.stats.evicted_expired += 1;
        }

        if let Some(entry) = self.pit.get_mut(&name) {
            if self.cfg.collapsing {
                if entry.has_interface(from) {
                    // Same interface re-asking while pending: nothing new
                    // to record or forward.
                    self.stats.pit_duplicate_interface += 1;
                    return vec![];
                }
                entry.arrivals.push(PitArrival {
                    interface: from,
                    payload: interest.payload().cloned(),
                    forwarded: false,
                });
                return vec![];
            }
            // Collapsing disabled: record as forwarded and send upstream.
            let hops = self.route_interest(&name, from);
            if hops.is_empty() {
                self.stats.drops_no_route += 1;
                return vec![];
            }
            self.pit
                .get_mut(&name)
                .expect("entry still present")
                .arrivals
                .push(PitArrival {
                    interface: from,
                    payload: interest.payload().cloned(),
                    forwarded: true,
                });
            return hops
                .into_iter()
                .map(|h| (h, Message::Interest(interest.clone())))
                .collect();
        }

        // PIT miss: forward along the FIB and leave an entry behind.
        let hops = self.route_interest(&name, from);
        if hops.is_empty() {
            self.stats.drops_no_route += 1;
            return vec![];
        }
        self.pit.insert(
            name.clone(),
            PitEntry {
                name,
                arrivals: vec![PitArrival {
                    interface: from,
                    payload: interest.payload().cloned(),
                    forwarded: true,
                }],
            },
        );
        hops.into_iter()
            .map(|h| (h, Message::Interest(interest.clone())))
            .collect()
    }

    /// Handles an incoming content object: unsolicited copies are dropped;
    /// otherwise the content goes out on every recorded arrival interface,
    /// one pInt reports the collapsed arrivals of accountable content, the
    /// PIT entry is flushed, and cacheable content enters the store.
    pub fn on_content(
        &mut self,
        content: ContentObject,
        _from: InterfaceId,
    ) -> Vec<(InterfaceId, Message)> {
        self.stats.contents += 1;
        let Some(entry) = self.pit.remove(content.name()) else {
            self.stats.drops_unsolicited += 1;
            return vec![];
        };
        let mut out: Vec<(InterfaceId, Message)> = entry
            .arrivals
            .iter()
            .map(|a| (a.interface, Message::Content(content.clone())))
            .collect();
        if content.acct().is_accountable() && entry.collapsed().next().is_some() {
            let pint = generate_pint(&content, None, Some(&entry), &self.node_id, false);
            if let Some(emit) = self.dispatch_pint(pint) {
                out.push(emit);
            }
        }
        if content.cacheable() {
            self.insert_cache(content);
        }
        out
    }

    /// Forwards a pInt unchanged to the first next hop of its LPM route.
    /// No PIT or cache state is touched and nothing is multicast.
    pub fn on_pint(&mut self, pint: PInt, _from: InterfaceId) -> Vec<(InterfaceId, Message)> {
        self.stats.pints += 1;
        match self.fib.lookup(pint.name()) {
            Some((_, hops)) if !hops.is_empty() => vec![(hops[0], Message::PInt(pint))],
            _ => {
                self.stats.pint_no_route += 1;
                vec![]
            }
        }
    }

    /// Routes a NACK back toward the consumers waiting on the name, like
    /// content but uncacheable and never accounted.
    pub fn on_nack(&mut self, nack: Nack, _from: InterfaceId) -> Vec<(InterfaceId, Message)> {
        self.stats.nacks += 1;
        let Some(entry) = self.pit.remove(nack.name()) else {
            self.stats.drops_unsolicited += 1;
            return vec![];
        };
        entry
            .arrivals
            .iter()
            .map(|a| (a.interface, Message::Nack(nack.clone())))
            .collect()
    }

    /// Removes every cache entry whose deadline has passed (inclusive).
    pub fn evict_expired(&mut self) -> usize {
        let clock = self.clock;
        let before = self.cs.len();
        self.cs.retain(|_, e| e.expires_at > clock);
        let evicted = before - self.cs.len();
        self.stats.evicted_expired += evicted as u64;
        evicted
    }

    /// Inserts cacheable content, evicting the least-recently-used entry
    /// when a capacity is set and reached.
    pub fn insert_cache(&mut self, content: ContentObject) {
        if !content.cacheable() {
            return;
        }
        let name = content.name().clone();
        if let Some(cap) = self.cfg.cache_capacity {
            if !self.cs.contains_key(&name) && self.cs.len() >= cap {
                if let Some(victim) = self
                    .cs
                    .iter()
                    .min_by_key(|(_, e)| e.last_used)
                    .map(|(n, _)| n.clone())
                {
                    self.cs.remove(&victim);
                    self.stats.evicted_lru += 1;
                }
            }
        }
        self.lru_counter += 1;
        let expires_at = self.clock + content.expiry_time();
        self.cs.insert(
            name,
            CsEntry {
                content,
                inserted_at: self.clock,
                expires_at,
                last_used: self.lru_counter,
            },
        );
        self.stats.cache_insertions += 1;
    }

    /// Emits all batched pInts, routed at flush time, and clears the
    /// buffer. A no-op unless batching is configured.
    pub fn flush_batches(&mut self) -> Vec<(InterfaceId, Message)> {
        let mut out = Vec::new();
        for (name, slot) in std::mem::take(&mut self.batches) {
            let pint = PInt::new(
                name,
                slot.ptype,
                self.node_id.clone(),
                slot.count,
                slot.cdata,
            )
            .expect("merged batch stays within pInt invariants");
            match self.fib.lookup(pint.name()) {
                Some((_, hops)) if !hops.is_empty() => out.push((hops[0], Message::PInt(pint))),
                _ => self.stats.pint_no_route += 1,
            }
        }
        out
    }

    pub fn has_pending_batches(&self) -> bool {
        !self.batches.is_empty()
    }

    /// Either routes a freshly generated pInt to its single upstream hop
    /// or parks it in the per-name batch buffer.
    fn dispatch_pint(&mut self, pint: PInt) -> Option<(InterfaceId, Message)> {
        if self.cfg.batch_window.is_some() {
            let slot = self
                .batches
                .entry(pint.name().clone())
                .or_insert_with(|| BatchSlot {
                    ptype: pint.ptype(),
                    count: 0,
                    cdata: Vec::new(),
                });
            debug_assert_eq!(slot.ptype, pint.ptype(), "acct flag is stable per name");
            slot.count += pint.count();
            slot.cdata.extend_from_slice(pint.cdata());
            return None;
        }
        match self.fib.lookup(pint.name()) {
            Some((_, hops)) if !hops.is_empty() => Some((hops[0], Message::PInt(pint))),
            _ => {
                self.stats.pint_no_route += 1;
                None
            }
        }
    }

    /// Next hops for an interest, excluding the interface it arrived on.
    fn route_interest(&self, name: &Name, from: InterfaceId) -> Vec<InterfaceId> {
        let Some((_, hops)) = self.fib.lookup(name) else {
            return vec![];
        };
        let usable: Vec<InterfaceId> = hops.iter().copied().filter(|h| *h != from).collect();
        if usable.is_empty() {
            return vec![];
        }
        if self.cfg.multicast {
            usable
        } else {
            vec![usable[0]]
        }
    }
}

/// Builds the pInt for a cache hit (`cache_hit == true`, with the
/// triggering interest) or for collapsed arrivals of a satisfied PIT entry
/// (`cache_hit == false`, with the entry). The pInt copies name and
/// accounting type from the content, stamps the generating router, and
/// (for distinct/individual accounting) carries one cdata blob per
/// reported interest, substituting an empty blob when an interest had no
/// payload. Aggregate pInts carry only the count.
pub fn generate_pint(
    content: &ContentObject,
    trigger_interest: Option<&Interest>,
    pit_entry: Option<&PitEntry>,
    router: &RouterId,
    cache_hit: bool,
) -> PInt {
    let ptype = content.acct();
    assert!(ptype.is_accountable(), "content must be accountable");
    let (count, cdata) = if cache_hit {
        let interest = trigger_interest.expect("cache hit carries the triggering interest");
        let cdata = match ptype {
            AcctFlag::Aggregate => vec![],
            _ => vec![interest.payload().cloned().unwrap_or_default()],
        };
        (1, cdata)
    } else {
        let entry = pit_entry.expect("collapsed pInt carries the PIT entry");
        let collapsed: Vec<&PitArrival> = entry.collapsed().collect();
        assert!(
            !collapsed.is_empty(),
            "collapsed pInt needs at least one collapsed arrival"
        );
        let count = collapsed.len() as u64;
        let cdata = match ptype {
            AcctFlag::Aggregate => vec![],
            _ => collapsed
                .iter()
                .map(|a| a.payload.clone().unwrap_or_default())
                .collect(),
        };
        (count, cdata)
    };
    PInt::new(
        content.name().clone(),
        ptype,
        router.clone(),
        count,
        cdata,
    )
    .expect("generated pInt satisfies its invariants")
}
