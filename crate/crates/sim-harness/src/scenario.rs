use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use analytic_model::Scheme;
use ccn_core::{AcctFlag, Tick};
use crsd_crypto::TagScheme;

use crate::topology::{Role, Topology};
use crate::ConfigError;

/// Which consumer-specific data consumers attach to interests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrsdMode {
    /// Pick per accounting type: nothing for NONE, a blind nonce tag for
    /// AGGREGATE and DISTINCT, public-key anonymized data for INDIVIDUAL.
    #[default]
    Auto,
    None,
    Distinct,
    Sec,
    AcrsdPk,
    AcrsdSym,
}

impl CrsdMode {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Some(CrsdMode::Auto),
            "none" => Some(CrsdMode::None),
            "distinct" => Some(CrsdMode::Distinct),
            "sec" => Some(CrsdMode::Sec),
            "acrsd" | "acrsd-pk" => Some(CrsdMode::AcrsdPk),
            "acrsd-sym" => Some(CrsdMode::AcrsdSym),
            _ => None,
        }
    }

    /// Resolves `Auto` against the run's scheme and accounting type.
    pub fn resolve(self, scheme: Scheme, acct: AcctFlag) -> CrsdMode {
        match self {
            CrsdMode::Auto => match (scheme, acct) {
                (Scheme::Pint, AcctFlag::Aggregate | AcctFlag::Distinct) => CrsdMode::Distinct,
                (Scheme::Pint, AcctFlag::Individual) => CrsdMode::AcrsdPk,
                _ => CrsdMode::None,
            },
            other => other,
        }
    }
}

/// Which routers get their caches pre-populated with the whole name pool
/// before traffic starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Prewarm {
    #[default]
    None,
    /// Consumer-facing routers only.
    Edge,
    /// Routers with no consumer attached (content already popular
    /// upstream; lets multicast reach several warm caches at once).
    Core,
    /// Every router.
    All,
}

impl Prewarm {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(Prewarm::None),
            "edge" => Some(Prewarm::Edge),
            "core" => Some(Prewarm::Core),
            "all" => Some(Prewarm::All),
            _ => None,
        }
    }
}

/// A compromised router and what it injects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarySpec {
    pub router: u32,
    pub behavior: AdversaryBehavior,
    /// Injection events per second.
    pub rate_per_sec: f64,
    /// Stop after this many injections.
    pub count: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryBehavior {
    /// Fabricate pInts (and their consumer-specific data) for interests
    /// that never existed.
    ForgePint,
    /// Re-send consumer-specific data observed in forwarded interests
    /// inside fresh pInts.
    ReplayCrsd,
}

impl AdversaryBehavior {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forge_pint" => Some(AdversaryBehavior::ForgePint),
            "replay_crsd" => Some(AdversaryBehavior::ReplayCrsd),
            _ => None,
        }
    }
}

/// All knobs of one run apart from the seed.
#[derive(Debug, Clone)]
pub struct TrafficSpec {
    /// Poisson interest rate per consumer, per second.
    pub rate_per_sec: f64,
    /// Name pool size M; names are sampled uniformly.
    pub name_pool: u64,
    /// Traffic stops at this tick; the run drains afterwards.
    pub duration: Tick,
    pub scheme: Scheme,
    pub acct_mode: AcctFlag,
    pub collapsing: bool,
    pub multicast: bool,
    /// Fixed request count per consumer instead of Poisson arrivals.
    pub gamma: Option<u64>,
    pub gamma_spacing: Tick,
    pub crsd_mode: CrsdMode,
    pub nonce_bits: u32,
    pub batch_window: Option<Tick>,
    pub cache_capacity: Option<usize>,
    pub payload_bytes: usize,
    /// Caching duration stamped on published content; `None` means "the
    /// whole run".
    pub content_expiry: Option<Tick>,
    pub prewarm: Prewarm,
    pub tag_scheme: TagScheme,
    pub dedup_window: Tick,
    /// Per-link drop probability. Exploration only: conservation
    /// identities assume loss-free runs.
    pub loss_rate: f64,
    pub keep_requests_log: bool,
}

impl Default for TrafficSpec {
    fn default() -> Self {
        TrafficSpec {
            rate_per_sec: 100.0,
            name_pool: 10,
            duration: 1000,
            scheme: Scheme::Pint,
            acct_mode: AcctFlag::Aggregate,
            collapsing: true,
            multicast: false,
            gamma: None,
            gamma_spacing: 20,
            crsd_mode: CrsdMode::Auto,
            nonce_bits: 128,
            batch_window: None,
            cache_capacity: None,
            payload_bytes: 1_048_576,
            content_expiry: None,
            prewarm: Prewarm::None,
            tag_scheme: TagScheme::Mac,
            dedup_window: 300,
            loss_rate: 0.0,
            keep_requests_log: false,
        }
    }
}

/// A full experiment: topology, traffic, optional adversary, seeds.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: Topology,
    pub traffic: TrafficSpec,
    pub adversary: Option<AdversarySpec>,
    pub seeds: Vec<u64>,
    /// Seed for deterministic key provisioning (ignored when a keys file
    /// is given).
    pub key_seed: u64,
    pub keys_file: Option<PathBuf>,
}

impl Scenario {
    pub fn new(topology: Topology, traffic: TrafficSpec) -> Self {
        Scenario {
            topology,
            traffic,
            adversary: None,
            seeds: vec![1],
            key_seed: 7,
            keys_file: None,
        }
    }

    /// Loads a `key = value` scenario file. Paths inside the file are
    /// resolved relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<Scenario, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read scenario file {path:?}: {e}")))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Scenario::parse(&text, dir)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Scenario, ConfigError> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(ConfigError::new(format!(
                    "scenario line {}: expected key = value",
                    idx + 1
                )));
            };
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }

        let topo_spec = kv
            .remove("topology")
            .ok_or_else(|| ConfigError::new("scenario is missing 'topology ='"))?;
        let prefix = match kv.remove("prefix") {
            Some(p) => ccn_core::Name::parse(&p)
                .map_err(|e| ConfigError::new(format!("scenario key 'prefix': {e}")))?,
            None => ccn_core::Name::parse("lci:/p").unwrap(),
        };
        // built-in generators, or a topology file
        let topology = if let Some(n) = topo_spec.strip_prefix("path:") {
            let n: u32 = n
                .parse()
                .ok()
                .filter(|n| *n >= 3)
                .ok_or_else(|| ConfigError::new("path:<n> needs n >= 3"))?;
            Topology::path(n, prefix)
        } else if let Some(h) = topo_spec.strip_prefix("tree:") {
            let h: u32 = h
                .parse()
                .ok()
                .filter(|h| *h >= 2)
                .ok_or_else(|| ConfigError::new("tree:<height> needs height >= 2"))?;
            Topology::binary_tree(h, prefix)
        } else {
            Topology::from_file(&base_dir.join(topo_spec))?
        };

        let mut traffic = TrafficSpec::default();
        let mut adversary_router = None;
        let mut adversary_behavior = None;
        let mut adversary_rate = 10.0;
        let mut adversary_count = None;
        let mut seeds: Vec<u64> = vec![];
        let mut base_seed = 1u64;
        let mut repetitions = 1u64;
        let mut key_seed = 7u64;
        let mut keys_file = None;

        for (k, v) in &kv {
            let bad = |what: &str| ConfigError::new(format!("scenario key '{k}': {what}: '{v}'"));
            match k.as_str() {
                "rate" => traffic.rate_per_sec = v.parse().map_err(|_| bad("expected number"))?,
                "pool" => traffic.name_pool = v.parse().map_err(|_| bad("expected integer"))?,
                "duration" => traffic.duration = v.parse().map_err(|_| bad("expected ticks"))?,
                "scheme" => {
                    traffic.scheme = Scheme::parse(v).ok_or_else(|| bad("unknown scheme"))?
                }
                "acct" => {
                    traffic.acct_mode =
                        AcctFlag::parse(v).ok_or_else(|| bad("unknown accounting type"))?
                }
                "collapsing" => traffic.collapsing = parse_bool(v).ok_or_else(|| bad("bool"))?,
                "multicast" => traffic.multicast = parse_bool(v).ok_or_else(|| bad("bool"))?,
                "gamma" => {
                    let g: u64 = v.parse().map_err(|_| bad("expected integer"))?;
                    traffic.gamma = (g > 0).then_some(g);
                }
                "gamma_spacing" => {
                    traffic.gamma_spacing = v.parse().map_err(|_| bad("expected ticks"))?
                }
                "crsd" => {
                    traffic.crsd_mode = CrsdMode::parse(v).ok_or_else(|| bad("unknown mode"))?
                }
                "nonce_bits" => traffic.nonce_bits = v.parse().map_err(|_| bad("integer"))?,
                "batch_window" => {
                    let w: Tick = v.parse().map_err(|_| bad("expected ticks"))?;
                    traffic.batch_window = (w > 0).then_some(w);
                }
                "cache_capacity" => {
                    let c: usize = v.parse().map_err(|_| bad("expected integer"))?;
                    traffic.cache_capacity = (c > 0).then_some(c);
                }
                "payload" => traffic.payload_bytes = v.parse().map_err(|_| bad("bytes"))?,
                "expiry" => {
                    traffic.content_expiry = if v == "run" {
                        None
                    } else {
                        Some(v.parse().map_err(|_| bad("expected ticks or 'run'"))?)
                    }
                }
                "prewarm" => {
                    traffic.prewarm = Prewarm::parse(v).ok_or_else(|| bad("none|edge|all"))?
                }
                "tag_scheme" => {
                    traffic.tag_scheme = TagScheme::parse(v).ok_or_else(|| bad("mac|sig"))?
                }
                "dedup_window" => traffic.dedup_window = v.parse().map_err(|_| bad("ticks"))?,
                "loss" => traffic.loss_rate = v.parse().map_err(|_| bad("probability"))?,
                "requests_log" => {
                    traffic.keep_requests_log = parse_bool(v).ok_or_else(|| bad("bool"))?
                }
                "seed" => base_seed = v.parse().map_err(|_| bad("integer"))?,
                "repetitions" => repetitions = v.parse().map_err(|_| bad("integer"))?,
                "seeds" => {
                    seeds = v
                        .split(',')
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("comma-separated integers"))?
                }
                "key_seed" => key_seed = v.parse().map_err(|_| bad("integer"))?,
                "keys" => keys_file = Some(base_dir.join(v)),
                "adversary_router" => {
                    adversary_router = Some(v.parse().map_err(|_| bad("node id"))?)
                }
                "adversary" => {
                    adversary_behavior =
                        Some(AdversaryBehavior::parse(v).ok_or_else(|| {
                            bad("forge_pint|replay_crsd")
                        })?)
                }
                "adversary_rate" => adversary_rate = v.parse().map_err(|_| bad("number"))?,
                "adversary_count" => {
                    adversary_count = Some(v.parse().map_err(|_| bad("integer"))?)
                }
                other => {
                    return Err(ConfigError::new(format!("unknown scenario key '{other}'")));
                }
            }
        }

        if seeds.is_empty() {
            if repetitions == 0 {
                return Err(ConfigError::new("repetitions must be at least 1"));
            }
            seeds = (0..repetitions).map(|i| base_seed + i).collect();
        }

        let adversary = match (adversary_router, adversary_behavior) {
            (Some(router), Some(behavior)) => Some(AdversarySpec {
                router,
                behavior,
                rate_per_sec: adversary_rate,
                count: adversary_count,
            }),
            (None, None) => None,
            _ => {
                return Err(ConfigError::new(
                    "adversary needs both 'adversary_router' and 'adversary'",
                ))
            }
        };

        let scenario = Scenario {
            topology,
            traffic,
            adversary,
            seeds,
            key_seed,
            keys_file,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.topology.validate()?;
        let t = &self.traffic;
        if t.name_pool == 0 {
            return Err(ConfigError::new("name pool must be at least 1"));
        }
        if t.gamma.is_none() && t.rate_per_sec <= 0.0 {
            return Err(ConfigError::new("rate must be positive"));
        }
        if t.duration == 0 {
            return Err(ConfigError::new("duration must be positive"));
        }
        if let Some(gamma) = t.gamma {
            if t.gamma_spacing == 0 {
                return Err(ConfigError::new("gamma_spacing must be positive"));
            }
            let last_fire = 1 + (gamma - 1) * t.gamma_spacing;
            if last_fire > t.duration {
                return Err(ConfigError::new(format!(
                    "duration {} too short for {gamma} spaced requests (need {last_fire})",
                    t.duration
                )));
            }
        }
        if t.prewarm != Prewarm::None && t.acct_mode == AcctFlag::Individual {
            return Err(ConfigError::new(
                "individual-accounting content is uncacheable and cannot be prewarmed",
            ));
        }
        if !(0.0..1.0).contains(&t.loss_rate) {
            return Err(ConfigError::new("loss rate must be in [0, 1)"));
        }
        if t.scheme != Scheme::Pint && t.acct_mode != AcctFlag::None {
            return Err(ConfigError::new(
                "encryption/cacheless schemes do their accounting at the producer; set acct = NONE",
            ));
        }
        if t.scheme == Scheme::Cacheless && t.prewarm != Prewarm::None {
            return Err(ConfigError::new("cacheless runs cannot prewarm caches"));
        }
        if self.topology.producers().len() != 1 {
            return Err(ConfigError::new(
                "exactly one producer node is supported per scenario",
            ));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::new("at least one seed is required"));
        }
        if let Some(adv) = &self.adversary {
            if self.topology.nodes.get(&adv.router) != Some(&Role::Router) {
                return Err(ConfigError::new(format!(
                    "adversary node {} is not a router",
                    adv.router
                )));
            }
            if adv.rate_per_sec <= 0.0 {
                return Err(ConfigError::new("adversary rate must be positive"));
            }
        }
        Ok(())
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Some(true),
        "false" | "off" | "no" | "0" => Some(false),
        _ => None,
    }
}
