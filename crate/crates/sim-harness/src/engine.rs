use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::sync::Arc;

use analytic_model::Scheme;
use bytes::Bytes;
use ccn_core::{
    encoded_len, AcctFlag, ContentObject, Interest, Message, Name, PInt, Tick,
};
use crsd_crypto::{
    make_a_crsd, make_a_crsd_sym, make_sec_crsd, Crsd, CrsdForm, CrsdPayload, DistinctTag,
    KeyRegistry, TagKey,
};
use node_engine::{NodeConfig, NodeState};
use num_bigint::BigUint;
use producer_acct::{LedgerSet, Producer, ProducerConfig, ProducerStats, Response};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fib::build_fibs;
use crate::metrics::{ConsumerTotals, LinkMetrics, MetricsReport, NodeMetrics, ProducerReport};
use crate::scenario::{AdversaryBehavior, CrsdMode, Prewarm, Scenario, TrafficSpec};
use crate::topology::{Role, Topology};
use crate::ConfigError;

/// The router identifier a node stamps into pInt origin fields.
pub fn node_router_id(node: u32) -> Bytes {
    Bytes::from(format!("n{node}"))
}

/// Pool name for index `idx` under the producer prefix.
pub fn pool_name(prefix: &Name, idx: u64) -> Name {
    prefix
        .child(idx.to_string().as_bytes())
        .expect("pool name within limits")
}

/// Decryption-key name paired with a pool name (encryption scheme only).
pub fn key_name(prefix: &Name, idx: u64) -> Name {
    prefix
        .child(b"key")
        .and_then(|n| n.child(idx.to_string().as_bytes()))
        .expect("key name within limits")
}

#[derive(Debug)]
enum Event {
    Fire { consumer: u32 },
    Arrive { to: u32, from: u32, msg: Message },
    AdversaryFire,
    BatchFlush,
}

struct Queued {
    tick: Tick,
    seq: u64,
    event: Event,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        (self.tick, self.seq) == (other.tick, other.seq)
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.tick, self.seq).cmp(&(other.tick, other.seq))
    }
}

#[derive(Debug, Clone, Default)]
struct ConsumerStats {
    fires: u64,
    issued: u64,
    suppressed: u64,
    satisfied: u64,
    key_contents: u64,
    nacks: u64,
    duplicate_contents: u64,
}

struct ConsumerApp {
    next_hop: u32,
    rng: ChaCha8Rng,
    pending: BTreeSet<Name>,
    id: Bytes,
    tag_key: Option<TagKey>,
    sym: Option<(Bytes, Bytes)>,
    stats: ConsumerStats,
}

/// Producer-side glue. pInt-based accounting goes through the real
/// producer; the encryption and cacheless comparison schemes are counted
/// in a separate ledger, since their accounting signal is the key/content
/// request itself.
struct ProducerHub {
    scheme: Scheme,
    prefix: Name,
    key_prefix: Name,
    inner: Producer,
    alt_ledger: LedgerSet,
    alt_stats: ProducerStats,
    payload: Bytes,
    key_payload: Bytes,
    content_expiry: Tick,
}

impl ProducerHub {
    fn handle_interest(&mut self, interest: &Interest, clock: Tick) -> Option<Message> {
        match self.scheme {
            Scheme::Pint => match self.inner.ingest_interest(interest, clock) {
                Response::Content(co) => Some(Message::Content(co)),
                Response::Nack(nack) => Some(Message::Nack(nack)),
                Response::NotMine => None,
            },
            Scheme::Encryption => {
                if self.key_prefix.is_prefix_of(interest.name()) {
                    // the key request is the accounting signal
                    self.alt_stats.interests_received += 1;
                    let content_name = self.content_name_for_key(interest.name());
                    self.alt_ledger.record_aggregate(&content_name, 1);
                    Some(Message::Content(self.serve(interest.name(), true)))
                } else if self.prefix.is_prefix_of(interest.name()) {
                    self.alt_stats.interests_received += 1;
                    Some(Message::Content(self.serve(interest.name(), false)))
                } else {
                    self.alt_stats.foreign_names += 1;
                    None
                }
            }
            Scheme::Cacheless => {
                if self.prefix.is_prefix_of(interest.name()) {
                    self.alt_stats.interests_received += 1;
                    self.alt_ledger.record_aggregate(interest.name(), 1);
                    Some(Message::Content(self.serve(interest.name(), true)))
                } else {
                    self.alt_stats.foreign_names += 1;
                    None
                }
            }
        }
    }

    fn handle_pint(&mut self, pint: &PInt, clock: Tick) {
        match self.scheme {
            Scheme::Pint => {
                self.inner.ingest_pint(pint, clock);
            }
            _ => {
                // comparison schemes generate no pInts; count strays
                self.alt_stats.pints_received += 1;
                self.alt_stats.pint_count_sum += pint.count();
            }
        }
    }

    /// Content under the comparison schemes: plain (acct NONE) data,
    /// uncacheable when it is a key or the run is cacheless.
    fn serve(&self, name: &Name, uncacheable: bool) -> ContentObject {
        let (payload, expiry) = if uncacheable {
            (self.key_payload.clone(), 0)
        } else {
            (self.payload.clone(), self.content_expiry)
        };
        ContentObject::new(name.clone(), payload, AcctFlag::None, expiry, Bytes::new())
            .expect("published content within limits")
    }

    fn content_name_for_key(&self, key: &Name) -> Name {
        let suffix = &key.components()[self.key_prefix.component_count()..];
        let mut components = self.prefix.components().to_vec();
        components.extend_from_slice(suffix);
        Name::new(components).expect("key suffix fits the content namespace")
    }

    fn report(&self) -> ProducerReport {
        match self.scheme {
            Scheme::Pint => {
                let ledger = self.inner.ledger();
                ProducerReport {
                    stats: self.inner.stats.clone(),
                    totals: ledger.totals,
                    ledger: ledger.snapshot(),
                    individual: ledger.individual_table().clone(),
                    rejections_by_origin: ledger.rejections_by_origin().clone(),
                    reject_reasons: ledger
                        .reject_reasons()
                        .iter()
                        .map(|(r, c)| (r.as_str(), *c))
                        .collect(),
                }
            }
            _ => ProducerReport {
                stats: self.alt_stats.clone(),
                totals: self.alt_ledger.totals,
                ledger: self.alt_ledger.snapshot(),
                individual: BTreeMap::new(),
                rejections_by_origin: BTreeMap::new(),
                reject_reasons: vec![],
            },
        }
    }
}

struct AdversaryRt {
    router: u32,
    behavior: AdversaryBehavior,
    spacing: Tick,
    cap: Option<u64>,
    rng: ChaCha8Rng,
    observed: Vec<(Name, Bytes)>,
    emitted: u64,
    next_hop: u32,
    origin: Bytes,
    ptype: AcctFlag,
}

struct World<'a> {
    traffic: &'a TrafficSpec,
    topo: &'a Topology,
    prefix: Name,
    routers: BTreeMap<u32, NodeState>,
    consumers: BTreeMap<u32, ConsumerApp>,
    producer_node: u32,
    producer: ProducerHub,
    producer_pk: Option<BigUint>,
    crsd_mode: CrsdMode,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    clock: Tick,
    delays: BTreeMap<(u32, u32), Tick>,
    per_link: BTreeMap<(u32, u32), LinkMetrics>,
    adversary: Option<AdversaryRt>,
    loss_rng: ChaCha8Rng,
    lost: u64,
}

/// Mix for independent deterministic substreams per (seed, node, role).
fn substream(seed: u64, a: u64, b: u64) -> u64 {
    let mut x = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(a.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(b.wrapping_mul(0x94D0_49BB_1331_11EB));
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x
}

/// Geometric inter-arrival time (in ticks) realizing a Poisson process of
/// `rate` events per second at one event slot per tick.
fn interarrival(rng: &mut ChaCha8Rng, rate_per_sec: f64) -> Tick {
    let p = (rate_per_sec / 1000.0).min(1.0);
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.random();
    ((1.0 - u).ln() / (1.0 - p).ln()).floor() as Tick + 1
}

/// Runs one seeded simulation to completion (traffic until `duration`,
/// then a full drain) and returns its metrics.
pub fn run(scenario: &Scenario, seed: u64) -> Result<MetricsReport, ConfigError> {
    scenario.validate()?;
    let topo = &scenario.topology;
    let traffic = &scenario.traffic;
    let plan = build_fibs(topo, &topo.prefixes)?;
    let producer_node = topo.producers()[0];
    let prefix = topo
        .prefixes
        .iter()
        .find(|(n, _)| *n == producer_node)
        .expect("validated: producer serves a prefix")
        .1
        .clone();
    let key_prefix = prefix.child(b"key").expect("key namespace within limits");

    let crsd_mode = traffic.crsd_mode.resolve(traffic.scheme, traffic.acct_mode);
    let needs_keys = matches!(
        crsd_mode,
        CrsdMode::Sec | CrsdMode::AcrsdPk | CrsdMode::AcrsdSym
    ) || traffic.acct_mode == AcctFlag::Individual;

    let consumer_ids: Vec<u32> = topo.consumers();
    let consumer_names: Vec<Bytes> = consumer_ids
        .iter()
        .map(|id| Bytes::from(format!("cr{id}")))
        .collect();
    let registry = if let Some(path) = &scenario.keys_file {
        Arc::new(
            KeyRegistry::from_file(path).map_err(|e| ConfigError::new(e.to_string()))?,
        )
    } else if needs_keys {
        let mut krng = ChaCha8Rng::seed_from_u64(scenario.key_seed);
        Arc::new(KeyRegistry::generate(
            &mut krng,
            &prefix,
            &consumer_names,
            traffic.tag_scheme,
        ))
    } else {
        Arc::new(KeyRegistry::new())
    };
    if needs_keys {
        if registry.producer_sk(&prefix).is_none() {
            return Err(ConfigError::new(format!(
                "key registry has no producer entry for {}",
                prefix.to_lci()
            )));
        }
        for (id, name) in consumer_ids.iter().zip(&consumer_names) {
            if registry.tag_key(name, &prefix).is_none() {
                return Err(ConfigError::new(format!(
                    "key registry has no tagging key for consumer {id}"
                )));
            }
        }
    }
    let producer_pk = registry.producer_pk(&prefix).cloned();

    // Expiry stamped on cacheable content: configured, or "whole run"
    // (comfortably past the drain phase).
    let content_expiry = match (traffic.acct_mode, traffic.scheme) {
        (AcctFlag::Individual, _) => 0,
        (_, Scheme::Cacheless) => 0,
        _ => traffic
            .content_expiry
            .unwrap_or(traffic.duration * 4 + 1000),
    };

    let mut producer_config = ProducerConfig::new(prefix.clone(), traffic.acct_mode);
    producer_config.content_expiry = content_expiry;
    producer_config.payload_bytes = traffic.payload_bytes;
    producer_config.nonce_bits = traffic.nonce_bits;
    producer_config.dedup_window = traffic.dedup_window;
    producer_config.keep_requests_log = traffic.keep_requests_log;
    let inner_config = match traffic.scheme {
        Scheme::Pint => producer_config,
        // comparison schemes publish unaccounted content
        _ => ProducerConfig::new(prefix.clone(), AcctFlag::None),
    };
    let producer = ProducerHub {
        scheme: traffic.scheme,
        prefix: prefix.clone(),
        key_prefix: key_prefix.clone(),
        inner: Producer::new(inner_config, registry.clone())
            .map_err(|e| ConfigError::new(e.to_string()))?,
        alt_ledger: LedgerSet::new(traffic.dedup_window, traffic.dedup_window, false),
        alt_stats: ProducerStats::default(),
        payload: Bytes::from(vec![0u8; traffic.payload_bytes]),
        key_payload: Bytes::from(vec![0u8; 32]),
        content_expiry,
    };

    // routers
    let node_cfg = NodeConfig {
        multicast: traffic.multicast,
        collapsing: traffic.collapsing,
        cache_capacity: traffic.cache_capacity,
        batch_window: traffic.batch_window,
    };
    let mut routers: BTreeMap<u32, NodeState> = BTreeMap::new();
    for id in topo.routers() {
        let mut node = NodeState::new(node_router_id(id), node_cfg.clone());
        node.install_fib(plan.fibs.get(&id).cloned().unwrap_or_default());
        routers.insert(id, node);
    }

    // prewarm selected caches with the whole pool
    let prewarm_targets: Vec<u32> = match traffic.prewarm {
        Prewarm::None => vec![],
        Prewarm::Edge => topo.edge_routers(),
        Prewarm::Core => {
            let edge = topo.edge_routers();
            topo.routers()
                .into_iter()
                .filter(|r| !edge.contains(r))
                .collect()
        }
        Prewarm::All => topo.routers(),
    };
    if !prewarm_targets.is_empty() {
        let acct = match traffic.scheme {
            Scheme::Pint => traffic.acct_mode,
            _ => AcctFlag::None,
        };
        let payload = producer.payload.clone();
        for idx in 0..traffic.name_pool {
            let co = ContentObject::new(
                pool_name(&prefix, idx),
                payload.clone(),
                acct,
                content_expiry,
                Bytes::new(),
            )
            .expect("prewarm content within limits");
            for id in &prewarm_targets {
                routers.get_mut(id).unwrap().insert_cache(co.clone());
            }
        }
    }

    // consumers
    let mut consumers: BTreeMap<u32, ConsumerApp> = BTreeMap::new();
    for (id, id_bytes) in consumer_ids.iter().zip(&consumer_names) {
        let entries = plan
            .fibs
            .get(id)
            .and_then(|entries| entries.first())
            .ok_or_else(|| ConfigError::new(format!("consumer {id} has no route")))?;
        consumers.insert(
            *id,
            ConsumerApp {
                next_hop: entries.next_hops[0],
                rng: ChaCha8Rng::seed_from_u64(substream(seed, *id as u64, 1)),
                pending: BTreeSet::new(),
                id: id_bytes.clone(),
                tag_key: registry.tag_key(id_bytes, &prefix),
                sym: registry.sym_for_consumer(id_bytes),
                stats: ConsumerStats::default(),
            },
        );
    }

    // adversary
    let adversary = match &scenario.adversary {
        Some(spec) => {
            let next_hop = plan
                .fibs
                .get(&spec.router)
                .and_then(|entries| entries.first())
                .map(|e| e.next_hops[0])
                .ok_or_else(|| {
                    ConfigError::new(format!("adversary router {} has no route", spec.router))
                })?;
            Some(AdversaryRt {
                router: spec.router,
                behavior: spec.behavior,
                spacing: ((1000.0 / spec.rate_per_sec).round() as Tick).max(1),
                cap: spec.count,
                rng: ChaCha8Rng::seed_from_u64(substream(seed, spec.router as u64, 2)),
                observed: Vec::new(),
                emitted: 0,
                next_hop,
                origin: node_router_id(spec.router),
                ptype: if traffic.acct_mode.is_accountable() {
                    traffic.acct_mode
                } else {
                    AcctFlag::Individual
                },
            })
        }
        None => None,
    };

    let mut delays = BTreeMap::new();
    for (a, b, d) in &topo.links {
        delays.insert((*a, *b), *d);
        delays.insert((*b, *a), *d);
    }

    let mut world = World {
        traffic,
        topo,
        prefix,
        routers,
        consumers,
        producer_node,
        producer,
        producer_pk,
        crsd_mode,
        queue: BinaryHeap::new(),
        seq: 0,
        clock: 0,
        delays,
        per_link: BTreeMap::new(),
        adversary,
        loss_rng: ChaCha8Rng::seed_from_u64(substream(seed, 0, 3)),
        lost: 0,
    };

    // initial events
    let consumer_list: Vec<u32> = world.consumers.keys().copied().collect();
    for id in &consumer_list {
        match traffic.gamma {
            Some(gamma) => {
                for k in 0..gamma {
                    let tick = 1 + k * traffic.gamma_spacing;
                    world.push(tick, Event::Fire { consumer: *id });
                }
            }
            None => {
                let first = {
                    let app = world.consumers.get_mut(id).unwrap();
                    interarrival(&mut app.rng, traffic.rate_per_sec)
                };
                world.push(first, Event::Fire { consumer: *id });
            }
        }
    }
    if let Some(adv) = &world.adversary {
        let spacing = adv.spacing;
        world.push(spacing, Event::AdversaryFire);
    }
    if let Some(window) = traffic.batch_window {
        let mut t = window;
        while t <= traffic.duration {
            world.push(t, Event::BatchFlush);
            t += window;
        }
    }

    // main loop: traffic until `duration`, then drain in the same loop
    while let Some(Reverse(next)) = world.queue.pop() {
        world.clock = next.tick;
        world.dispatch(next.event);
    }
    // batched pInts left over at the end of traffic
    loop {
        let flushed = world.flush_all_batches();
        if !flushed {
            break;
        }
        while let Some(Reverse(next)) = world.queue.pop() {
            world.clock = next.tick;
            world.dispatch(next.event);
        }
    }

    Ok(world.into_report(seed, &plan.distance))
}

impl<'a> World<'a> {
    fn push(&mut self, tick: Tick, event: Event) {
        self.seq += 1;
        self.queue.push(Reverse(Queued {
            tick,
            seq: self.seq,
            event,
        }));
    }

    fn send(&mut self, from: u32, to: u32, msg: Message) {
        if self.traffic.loss_rate > 0.0 && self.loss_rng.random::<f64>() < self.traffic.loss_rate
        {
            self.lost += 1;
            return;
        }
        let delay = *self
            .delays
            .get(&(from, to))
            .expect("messages travel only over topology links");
        self.per_link
            .entry((from, to))
            .or_default()
            .record(msg.kind(), encoded_len(&msg));
        self.push(self.clock + delay, Event::Arrive { to, from, msg });
    }

    fn dispatch(&mut self, event: Event) {
        match event {
            Event::Fire { consumer } => self.consumer_fire(consumer),
            Event::Arrive { to, from, msg } => self.deliver(to, from, msg),
            Event::AdversaryFire => self.adversary_fire(),
            Event::BatchFlush => {
                self.flush_all_batches();
            }
        }
    }

    fn consumer_fire(&mut self, consumer: u32) {
        if self.clock > self.traffic.duration {
            return;
        }
        let clock = self.clock;
        let prefix = self.prefix.clone();
        let scheme = self.traffic.scheme;
        let pool = self.traffic.name_pool;
        let nonce_bits = self.traffic.nonce_bits;
        let crsd_mode = self.crsd_mode;
        let producer_pk = self.producer_pk.clone();

        let (messages, next_hop, reschedule) = {
            let app = self.consumers.get_mut(&consumer).unwrap();
            app.stats.fires += 1;
            let idx = app.rng.random_range(0..pool);
            let name = pool_name(&prefix, idx);
            let mut messages = Vec::new();
            if app.pending.contains(&name) {
                app.stats.suppressed += 1;
            } else {
                let payload = build_payload(app, crsd_mode, &name, nonce_bits, clock, &producer_pk);
                app.pending.insert(name.clone());
                messages
                    .push(Message::Interest(Interest::new(name, payload).expect(
                        "consumer payload within interest limits",
                    )));
                if scheme == Scheme::Encryption {
                    let kname = key_name(&prefix, idx);
                    if !app.pending.contains(&kname) {
                        app.pending.insert(kname.clone());
                        messages.push(Message::Interest(Interest::plain(kname)));
                    }
                }
            }
            app.stats.issued += messages.len() as u64;
            let reschedule = if self.traffic.gamma.is_none() {
                Some(interarrival(&mut app.rng, self.traffic.rate_per_sec))
            } else {
                None
            };
            (messages, app.next_hop, reschedule)
        };
        for msg in messages {
            self.send(consumer, next_hop, msg);
        }
        if let Some(dt) = reschedule {
            let next = self.clock + dt;
            if next <= self.traffic.duration {
                self.push(next, Event::Fire { consumer });
            }
        }
    }

    fn deliver(&mut self, to: u32, from: u32, msg: Message) {
        // a compromised router records consumer-specific data it forwards
        if let Some(adv) = &mut self.adversary {
            if adv.router == to {
                if let Message::Interest(i) = &msg {
                    if let Some(payload) = i.payload() {
                        adv.observed.push((i.name().clone(), payload.clone()));
                    }
                }
            }
        }
        match self.topo.nodes[&to] {
            Role::Router => {
                let outputs = {
                    let node = self.routers.get_mut(&to).unwrap();
                    node.set_clock(self.clock);
                    match msg {
                        Message::Interest(i) => node.on_interest(i, from),
                        Message::Content(c) => node.on_content(c, from),
                        Message::PInt(p) => node.on_pint(p, from),
                        Message::Nack(n) => node.on_nack(n, from),
                    }
                };
                for (iface, out) in outputs {
                    self.send(to, iface, out);
                }
            }
            Role::Producer => {
                let reply = match &msg {
                    Message::Interest(i) => self.producer.handle_interest(i, self.clock),
                    Message::PInt(p) => {
                        self.producer.handle_pint(p, self.clock);
                        None
                    }
                    _ => None,
                };
                if let Some(out) = reply {
                    self.send(to, from, out);
                }
            }
            Role::Consumer => {
                let key_name = self.producer.key_prefix.clone();
                let app = self.consumers.get_mut(&to).unwrap();
                match &msg {
                    Message::Content(co) => {
                        if app.pending.remove(co.name()) {
                            if key_name.is_prefix_of(co.name()) {
                                app.stats.key_contents += 1;
                            } else {
                                app.stats.satisfied += 1;
                            }
                        } else {
                            app.stats.duplicate_contents += 1;
                        }
                    }
                    Message::Nack(n) => {
                        app.pending.remove(n.name());
                        app.stats.nacks += 1;
                    }
                    _ => {}
                }
            }
        }
    }

    fn adversary_fire(&mut self) {
        let clock = self.clock;
        let duration = self.traffic.duration;
        let pool = self.traffic.name_pool;
        let prefix = self.prefix.clone();
        let Some(adv) = &mut self.adversary else {
            return;
        };
        if adv.cap.is_some_and(|cap| adv.emitted >= cap) {
            return;
        }
        let pint = match adv.behavior {
            AdversaryBehavior::ForgePint => {
                let idx = adv.rng.random_range(0..pool);
                let mut blob = vec![0u8; 40];
                adv.rng.fill_bytes(&mut blob);
                Some(
                    PInt::new(
                        pool_name(&prefix, idx),
                        adv.ptype,
                        adv.origin.clone(),
                        1,
                        vec![Bytes::from(blob)],
                    )
                    .expect("forged pInt is structurally valid"),
                )
            }
            AdversaryBehavior::ReplayCrsd => adv.observed.last().map(|(name, payload)| {
                PInt::new(
                    name.clone(),
                    adv.ptype,
                    adv.origin.clone(),
                    1,
                    vec![payload.clone()],
                )
                .expect("replayed pInt is structurally valid")
            }),
        };
        let router = adv.router;
        let next_hop = adv.next_hop;
        let mut reschedule = false;
        if let Some(pint) = pint {
            adv.emitted += 1;
            reschedule = adv.cap.is_none_or(|cap| adv.emitted < cap);
            let next = clock + adv.spacing;
            if reschedule && next <= duration {
                self.push(next, Event::AdversaryFire);
            }
            self.send(router, next_hop, Message::PInt(pint));
        } else {
            // nothing observed yet: try again shortly
            let next = clock + adv.spacing;
            if next <= duration {
                self.push(next, Event::AdversaryFire);
            }
        }
        let _ = reschedule;
    }

    /// Flushes every router's batched pInts. Returns true when anything
    /// was emitted.
    fn flush_all_batches(&mut self) -> bool {
        let ids: Vec<u32> = self.routers.keys().copied().collect();
        let mut emitted = false;
        for id in ids {
            let outputs = {
                let node = self.routers.get_mut(&id).unwrap();
                node.set_clock(self.clock);
                node.flush_batches()
            };
            for (iface, msg) in outputs {
                emitted = true;
                self.send(id, iface, msg);
            }
        }
        emitted
    }

    fn into_report(self, seed: u64, distance: &BTreeMap<u32, u32>) -> MetricsReport {
        let mut per_node = BTreeMap::new();
        for (id, node) in &self.routers {
            let s = &node.stats;
            per_node.insert(
                *id,
                NodeMetrics {
                    role: Role::Router,
                    distance: distance[id],
                    interests: s.interests,
                    contents: s.contents,
                    pints: s.pints,
                    nacks: s.nacks,
                    cache_hits: s.cache_hits,
                    drops_no_route: s.drops_no_route,
                    drops_unsolicited: s.drops_unsolicited,
                    pint_no_route: s.pint_no_route,
                    evicted_expired: s.evicted_expired,
                    evicted_lru: s.evicted_lru,
                },
            );
        }
        let mut totals = ConsumerTotals::default();
        for (id, app) in &self.consumers {
            let s = &app.stats;
            totals.fires += s.fires;
            totals.issued += s.issued;
            totals.suppressed += s.suppressed;
            totals.satisfied += s.satisfied;
            totals.key_contents += s.key_contents;
            totals.nacks += s.nacks;
            totals.duplicate_contents += s.duplicate_contents;
            per_node.insert(
                *id,
                NodeMetrics {
                    role: Role::Consumer,
                    distance: distance[id],
                    interests: 0,
                    contents: s.satisfied + s.key_contents + s.duplicate_contents,
                    pints: 0,
                    nacks: s.nacks,
                    cache_hits: 0,
                    drops_no_route: 0,
                    drops_unsolicited: 0,
                    pint_no_route: 0,
                    evicted_expired: 0,
                    evicted_lru: 0,
                },
            );
        }
        let producer_report = self.producer.report();
        per_node.insert(
            self.producer_node,
            NodeMetrics {
                role: Role::Producer,
                distance: 0,
                interests: producer_report.stats.interests_received,
                contents: 0,
                pints: producer_report.stats.pints_received,
                nacks: producer_report.stats.nacks_sent,
                cache_hits: 0,
                drops_no_route: 0,
                drops_unsolicited: 0,
                pint_no_route: 0,
                evicted_expired: 0,
                evicted_lru: 0,
            },
        );
        MetricsReport {
            seed,
            scheme: self.traffic.scheme.as_str(),
            acct: self.traffic.acct_mode,
            per_node,
            per_link: self.per_link,
            consumers: totals,
            producer: producer_report,
            adversary_emitted: self.adversary.as_ref().map(|a| a.emitted).unwrap_or(0),
            lost_messages: self.lost,
        }
    }
}

fn build_payload(
    app: &mut ConsumerApp,
    mode: CrsdMode,
    name: &Name,
    nonce_bits: u32,
    clock: Tick,
    producer_pk: &Option<BigUint>,
) -> Option<Bytes> {
    match mode {
        CrsdMode::Auto => unreachable!("mode resolved before the run"),
        CrsdMode::None => None,
        CrsdMode::Distinct => {
            let tag = DistinctTag::generate(nonce_bits, clock, &mut app.rng);
            Some(CrsdPayload::Distinct(tag).encode())
        }
        CrsdMode::Sec | CrsdMode::AcrsdPk | CrsdMode::AcrsdSym => {
            let key = app
                .tag_key
                .as_ref()
                .expect("validated: consumer has a tagging key");
            let crsd =
                Crsd::new(CrsdForm::Pseudonym, app.id.clone()).expect("pseudonym is non-empty");
            let sec = make_sec_crsd(&crsd, name, key, nonce_bits, clock, &mut app.rng);
            let payload = match mode {
                CrsdMode::Sec => CrsdPayload::Sec(sec),
                CrsdMode::AcrsdPk => {
                    let pk = producer_pk
                        .as_ref()
                        .expect("validated: producer has an encryption key");
                    CrsdPayload::Anon(make_a_crsd(&sec, pk, &mut app.rng))
                }
                CrsdMode::AcrsdSym => {
                    let (tag, key) = app
                        .sym
                        .as_ref()
                        .expect("validated: consumer has a shared key");
                    CrsdPayload::Anon(make_a_crsd_sym(&sec, tag, key, &mut app.rng))
                }
                _ => unreachable!(),
            };
            Some(payload.encode())
        }
    }
}
