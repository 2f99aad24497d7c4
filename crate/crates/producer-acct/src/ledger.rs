use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;
use ccn_core::{AcctFlag, Name, Tick};
use crsd_crypto::ReplayWindow;

/// Why one cdata blob (or direct interest payload) was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RejectClass {
    /// Not parseable as any consumer-specific data form.
    Malformed,
    /// No key registered for the claimed consumer or producer.
    UnknownKey,
    /// The anonymizing layer did not decrypt.
    DecryptFailed,
    /// The keyed tag did not verify for the bound name.
    BadTag,
    /// Timestamp outside the acceptable window.
    Stale,
    /// Nonce already accepted within the window.
    Replay,
}

impl RejectClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectClass::Malformed => "malformed",
            RejectClass::UnknownKey => "unknown_key",
            RejectClass::DecryptFailed => "decrypt_failed",
            RejectClass::BadTag => "bad_tag",
            RejectClass::Stale => "stale_timestamp",
            RejectClass::Replay => "replay",
        }
    }
}

/// Per-name distinct-accounting state. `hits` counts every report (the
/// cache-hit view); `unique`/`duplicates` split them by nonce freshness
/// (the content-request view).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DistinctRecord {
    pub hits: u64,
    pub unique: u64,
    pub duplicates: u64,
    seen: BTreeSet<(u64, Bytes)>,
}

/// Outcome counts for one ingested pInt or interest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub accepted: u64,
    pub duplicates: u64,
    pub rejected: u64,
}

impl IngestReport {
    pub(crate) fn merge(&mut self, other: IngestReport) {
        self.accepted += other.accepted;
        self.duplicates += other.duplicates;
        self.rejected += other.rejected;
    }
}

/// The producer's counters and duplicate/replay-detection state.
///
/// Storage follows the per-type bounds: one counter per accountable name
/// for aggregate, one per (consumer, name) pair for individual, and for
/// distinct a per-name record plus nonces bounded by the dedup window.
#[derive(Debug, Clone)]
pub struct LedgerSet {
    aggregate: BTreeMap<Name, u64>,
    distinct: BTreeMap<Name, DistinctRecord>,
    individual: BTreeMap<(Bytes, Name), u64>,
    /// Nonce window for verified (individual) consumer-specific data.
    pub replay: ReplayWindow,
    dedup_window: Tick,
    requests_log: Option<Vec<(Name, Tick)>>,
    pub totals: IngestReport,
    rejected_by_name: BTreeMap<Name, u64>,
    rejections_by_origin: BTreeMap<Bytes, u64>,
    reject_reasons: BTreeMap<RejectClass, u64>,
}

impl LedgerSet {
    pub fn new(dedup_window: Tick, replay_window: Tick, keep_requests_log: bool) -> Self {
        LedgerSet {
            aggregate: BTreeMap::new(),
            distinct: BTreeMap::new(),
            individual: BTreeMap::new(),
            replay: ReplayWindow::new(replay_window),
            dedup_window,
            requests_log: keep_requests_log.then(Vec::new),
            totals: IngestReport::default(),
            rejected_by_name: BTreeMap::new(),
            rejections_by_origin: BTreeMap::new(),
            reject_reasons: BTreeMap::new(),
        }
    }

    pub fn record_aggregate(&mut self, name: &Name, count: u64) {
        *self.aggregate.entry(name.clone()).or_default() += count;
        self.totals.accepted += count;
    }

    /// Counts one distinct report; duplicates are detected by (nonce,
    /// window-of-timestamp) scoped per name. Reports whose timestamp
    /// window already left the tracking horizon are rejected as stale
    /// rather than miscounted.
    pub fn record_distinct(
        &mut self,
        name: &Name,
        nonce: &Bytes,
        timestamp: Tick,
        clock: Tick,
    ) -> IngestReport {
        let window = timestamp / self.dedup_window;
        let current = clock / self.dedup_window;
        if window + 1 < current || window > current + 1 {
            return self.record_rejection(name, None, RejectClass::Stale);
        }
        let rec = self.distinct.entry(name.clone()).or_default();
        rec.hits += 1;
        let horizon = current.saturating_sub(1);
        rec.seen = std::mem::take(&mut rec.seen)
            .into_iter()
            .filter(|(w, _)| *w >= horizon)
            .collect();
        if rec.seen.insert((window, nonce.clone())) {
            rec.unique += 1;
            self.totals.accepted += 1;
            IngestReport {
                accepted: 1,
                ..Default::default()
            }
        } else {
            rec.duplicates += 1;
            self.totals.duplicates += 1;
            IngestReport {
                duplicates: 1,
                ..Default::default()
            }
        }
    }

    pub fn record_individual(&mut self, consumer: &Bytes, name: &Name) {
        *self
            .individual
            .entry((consumer.clone(), name.clone()))
            .or_default() += 1;
        self.totals.accepted += 1;
    }

    pub fn record_rejection(
        &mut self,
        name: &Name,
        origin: Option<&Bytes>,
        reason: RejectClass,
    ) -> IngestReport {
        self.totals.rejected += 1;
        *self.rejected_by_name.entry(name.clone()).or_default() += 1;
        if let Some(origin) = origin {
            *self.rejections_by_origin.entry(origin.clone()).or_default() += 1;
        }
        *self.reject_reasons.entry(reason).or_default() += 1;
        IngestReport {
            rejected: 1,
            ..Default::default()
        }
    }

    pub fn log_request(&mut self, name: &Name, clock: Tick) {
        if let Some(log) = &mut self.requests_log {
            log.push((name.clone(), clock));
        }
    }

    pub fn dedup_window(&self) -> Tick {
        self.dedup_window
    }

    /// Read-only counter for one accounting type, optionally filtered to a
    /// single name. For distinct this is the unique-request count.
    pub fn query(&self, kind: AcctFlag, name: Option<&Name>) -> u64 {
        match (kind, name) {
            (AcctFlag::Aggregate, Some(n)) => self.aggregate.get(n).copied().unwrap_or(0),
            (AcctFlag::Aggregate, None) => self.aggregate.values().sum(),
            (AcctFlag::Distinct, Some(n)) => self.distinct.get(n).map(|r| r.unique).unwrap_or(0),
            (AcctFlag::Distinct, None) => self.distinct.values().map(|r| r.unique).sum(),
            (AcctFlag::Individual, Some(n)) => self
                .individual
                .iter()
                .filter(|((_, name), _)| name == n)
                .map(|(_, c)| c)
                .sum(),
            (AcctFlag::Individual, None) => self.individual.values().sum(),
            (AcctFlag::None, _) => 0,
        }
    }

    /// Distinct-ledger hit counter (every report, duplicates included).
    pub fn distinct_hits(&self, name: Option<&Name>) -> u64 {
        match name {
            Some(n) => self.distinct.get(n).map(|r| r.hits).unwrap_or(0),
            None => self.distinct.values().map(|r| r.hits).sum(),
        }
    }

    pub fn individual_count(&self, consumer: &Bytes, name: &Name) -> u64 {
        self.individual
            .get(&(consumer.clone(), name.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn individual_table(&self) -> &BTreeMap<(Bytes, Name), u64> {
        &self.individual
    }

    pub fn rejections_by_origin(&self) -> &BTreeMap<Bytes, u64> {
        &self.rejections_by_origin
    }

    pub fn reject_reasons(&self) -> &BTreeMap<RejectClass, u64> {
        &self.reject_reasons
    }

    pub fn requests_log(&self) -> Option<&[(Name, Tick)]> {
        self.requests_log.as_deref()
    }

    /// Immutable snapshot of all per-name counters, for export.
    pub fn snapshot(&self) -> LedgerSnapshot {
        let mut rows = Vec::new();
        for (name, count) in &self.aggregate {
            rows.push(SnapshotRow {
                name: name.clone(),
                kind: AcctFlag::Aggregate,
                count: *count,
                duplicates: 0,
                rejections: self.rejected_by_name.get(name).copied().unwrap_or(0),
            });
        }
        for (name, rec) in &self.distinct {
            rows.push(SnapshotRow {
                name: name.clone(),
                kind: AcctFlag::Distinct,
                count: rec.unique,
                duplicates: rec.duplicates,
                rejections: self.rejected_by_name.get(name).copied().unwrap_or(0),
            });
        }
        let mut per_name: BTreeMap<Name, u64> = BTreeMap::new();
        for ((_, name), count) in &self.individual {
            *per_name.entry(name.clone()).or_default() += count;
        }
        for (name, count) in per_name {
            let rejections = self.rejected_by_name.get(&name).copied().unwrap_or(0);
            rows.push(SnapshotRow {
                name,
                kind: AcctFlag::Individual,
                count,
                duplicates: 0,
                rejections,
            });
        }
        LedgerSnapshot { rows }
    }
}

/// One exported ledger row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotRow {
    pub name: Name,
    pub kind: AcctFlag,
    pub count: u64,
    pub duplicates: u64,
    pub rejections: u64,
}

/// Deterministic, order-stable view of the ledgers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LedgerSnapshot {
    pub rows: Vec<SnapshotRow>,
}

impl LedgerSnapshot {
    /// CSV with the frozen column set documented in `docs/formats.md`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,type,count,duplicates,rejections\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.name.to_lci(),
                row.kind.as_str(),
                row.count,
                row.duplicates,
                row.rejections
            ));
        }
        out
    }
}
