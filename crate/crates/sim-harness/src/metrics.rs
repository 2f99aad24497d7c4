use std::collections::BTreeMap;

use bytes::Bytes;
use ccn_core::{AcctFlag, MessageKind, Name};
use producer_acct::{IngestReport, LedgerSnapshot, ProducerStats};

use crate::topology::Role;

/// Counters for one node, joined with its distance from the producer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMetrics {
    pub role: Role,
    pub distance: u32,
    pub interests: u64,
    pub contents: u64,
    pub pints: u64,
    pub nacks: u64,
    pub cache_hits: u64,
    pub drops_no_route: u64,
    pub drops_unsolicited: u64,
    pub pint_no_route: u64,
    pub evicted_expired: u64,
    pub evicted_lru: u64,
}

impl NodeMetrics {
    pub fn messages_processed(&self) -> u64 {
        self.interests + self.contents + self.pints + self.nacks
    }
}

/// Message and byte counts on one directed link.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkMetrics {
    pub msgs: [u64; 4],
    pub bytes: [u64; 4],
}

impl LinkMetrics {
    pub fn record(&mut self, kind: MessageKind, len: usize) {
        self.msgs[kind as usize] += 1;
        self.bytes[kind as usize] += len as u64;
    }

    pub fn total_msgs(&self) -> u64 {
        self.msgs.iter().sum()
    }
}

/// Aggregated consumer-side counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsumerTotals {
    /// Request events generated by the traffic model.
    pub fires: u64,
    /// Interests actually sent (a pending same-name request suppresses
    /// re-issue; encryption-scheme requests issue two).
    pub issued: u64,
    pub suppressed: u64,
    pub satisfied: u64,
    pub key_contents: u64,
    pub nacks: u64,
    pub duplicate_contents: u64,
}

/// Producer-side outcome of the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProducerReport {
    pub stats: ProducerStats,
    pub totals: IngestReport,
    pub ledger: LedgerSnapshot,
    pub individual: BTreeMap<(Bytes, Name), u64>,
    pub rejections_by_origin: BTreeMap<Bytes, u64>,
    pub reject_reasons: Vec<(&'static str, u64)>,
}

/// Everything measured in one run. Serialization order is fixed, so equal
/// reports produce byte-identical CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub seed: u64,
    pub scheme: &'static str,
    pub acct: AcctFlag,
    pub per_node: BTreeMap<u32, NodeMetrics>,
    pub per_link: BTreeMap<(u32, u32), LinkMetrics>,
    pub consumers: ConsumerTotals,
    pub producer: ProducerReport,
    /// Adversary injections actually emitted.
    pub adversary_emitted: u64,
    /// Messages dropped by the loss knob.
    pub lost_messages: u64,
}

impl MetricsReport {
    /// Total messages that crossed the (undirected) link between `a` and
    /// `b`, both directions.
    pub fn link_messages(&self, a: u32, b: u32) -> u64 {
        let one = self.per_link.get(&(a, b)).map(LinkMetrics::total_msgs);
        let two = self.per_link.get(&(b, a)).map(LinkMetrics::total_msgs);
        one.unwrap_or(0) + two.unwrap_or(0)
    }

    /// Left side: requests the producer learned about (direct interests
    /// plus the summed counts of all received pInts). Right side:
    /// interests consumers issued. Equal on honest, loss-free,
    /// multicast-free runs with accountable content.
    pub fn conservation_sides(&self) -> (u64, u64) {
        (
            self.producer.stats.interests_received + self.producer.stats.pint_count_sum,
            self.consumers.issued,
        )
    }

    /// Cache hits summed over all routers.
    pub fn total_cache_hits(&self) -> u64 {
        self.per_node.values().map(|n| n.cache_hits).sum()
    }

    /// Long-format CSV: `section,k1,k2,k3,metric,value`. Column meaning
    /// per section is documented in `docs/formats.md`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,k1,k2,k3,metric,value\n");
        let mut row = |section: &str, k1: &str, k2: &str, k3: &str, metric: &str, value: String| {
            out.push_str(&format!("{section},{k1},{k2},{k3},{metric},{value}\n"));
        };
        row("run", "", "", "", "seed", self.seed.to_string());
        row("run", "", "", "", "scheme", self.scheme.to_string());
        row("run", "", "", "", "acct", self.acct.as_str().to_string());
        for (id, m) in &self.per_node {
            let id = id.to_string();
            let role = m.role.as_str();
            let dist = m.distance.to_string();
            for (metric, value) in [
                ("interests", m.interests),
                ("contents", m.contents),
                ("pints", m.pints),
                ("nacks", m.nacks),
                ("cache_hits", m.cache_hits),
                ("drops_no_route", m.drops_no_route),
                ("drops_unsolicited", m.drops_unsolicited),
                ("pint_no_route", m.pint_no_route),
                ("evicted_expired", m.evicted_expired),
                ("evicted_lru", m.evicted_lru),
            ] {
                row("node", &id, role, &dist, metric, value.to_string());
            }
        }
        for ((a, b), l) in &self.per_link {
            let a = a.to_string();
            let b = b.to_string();
            for kind in MessageKind::ALL {
                row(
                    "link",
                    &a,
                    &b,
                    "",
                    &format!("msgs_{}", kind.as_str()),
                    l.msgs[kind as usize].to_string(),
                );
                row(
                    "link",
                    &a,
                    &b,
                    "",
                    &format!("bytes_{}", kind.as_str()),
                    l.bytes[kind as usize].to_string(),
                );
            }
        }
        let c = &self.consumers;
        for (metric, value) in [
            ("fires", c.fires),
            ("issued", c.issued),
            ("suppressed", c.suppressed),
            ("satisfied", c.satisfied),
            ("key_contents", c.key_contents),
            ("nacks", c.nacks),
            ("duplicate_contents", c.duplicate_contents),
        ] {
            row("consumers", "", "", "", metric, value.to_string());
        }
        let p = &self.producer;
        for (metric, value) in [
            ("interests_received", p.stats.interests_received),
            ("pints_received", p.stats.pints_received),
            ("pint_count_sum", p.stats.pint_count_sum),
            ("nacks_sent", p.stats.nacks_sent),
            ("foreign_names", p.stats.foreign_names),
            ("accepted", p.totals.accepted),
            ("duplicates", p.totals.duplicates),
            ("rejected", p.totals.rejected),
        ] {
            row("producer", "", "", "", metric, value.to_string());
        }
        for r in &p.ledger.rows {
            let name = r.name.to_lci();
            let kind = r.kind.as_str();
            row("ledger", &name, kind, "", "count", r.count.to_string());
            row(
                "ledger",
                &name,
                kind,
                "",
                "duplicates",
                r.duplicates.to_string(),
            );
            row(
                "ledger",
                &name,
                kind,
                "",
                "rejections",
                r.rejections.to_string(),
            );
        }
        for ((consumer, name), count) in &p.individual {
            row(
                "individual",
                &hex::encode(consumer),
                &name.to_lci(),
                "",
                "count",
                count.to_string(),
            );
        }
        for (origin, count) in &p.rejections_by_origin {
            row(
                "detection",
                &hex::encode(origin),
                "",
                "",
                "rejected",
                count.to_string(),
            );
        }
        for (reason, count) in &p.reject_reasons {
            row("reason", reason, "", "", "rejected", count.to_string());
        }
        let (learned, issued) = self.conservation_sides();
        row("summary", "", "", "", "producer_learned", learned.to_string());
        row("summary", "", "", "", "consumer_issued", issued.to_string());
        row(
            "summary",
            "",
            "",
            "",
            "router_cache_hits",
            self.total_cache_hits().to_string(),
        );
        row(
            "summary",
            "",
            "",
            "",
            "adversary_emitted",
            self.adversary_emitted.to_string(),
        );
        row("summary", "", "", "", "lost_messages", self.lost_messages.to_string());
        out
    }
}
