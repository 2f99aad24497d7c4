use std::collections::BTreeMap;
use std::sync::Arc;

use bytes::Bytes;
use ccn_core::{
    AcctFlag, ContentObject, Interest, Nack, NackReason, Name, NamePrefix, PInt, Tick,
};
use crsd_crypto::{
    open_a_crsd, open_a_crsd_sym, verify_sec_crsd, AcrsdScheme, CrsdPayload, KeyRegistry, Reject,
    SecCrsd, DEFAULT_NONCE_BITS, DEFAULT_WINDOW_TICKS,
};

use crate::ledger::{IngestReport, LedgerSet, RejectClass};
use crate::ConfigError;

/// Static producer policy: which accounting each name gets, how content is
/// published, and which windows bound duplicate detection.
#[derive(Debug, Clone)]
pub struct ProducerConfig {
    pub prefix: NamePrefix,
    pub default_acct: AcctFlag,
    pub acct_overrides: BTreeMap<Name, AcctFlag>,
    /// Caching duration stamped on published content. Names under
    /// individual accounting are always published with expiry 0.
    pub content_expiry: Tick,
    pub payload_bytes: usize,
    pub nonce_bits: u32,
    pub dedup_window: Tick,
    pub keep_requests_log: bool,
}

impl ProducerConfig {
    pub fn new(prefix: NamePrefix, default_acct: AcctFlag) -> Self {
        ProducerConfig {
            prefix,
            default_acct,
            acct_overrides: BTreeMap::new(),
            content_expiry: 0,
            payload_bytes: 1024,
            nonce_bits: DEFAULT_NONCE_BITS,
            dedup_window: DEFAULT_WINDOW_TICKS,
            keep_requests_log: false,
        }
    }

    pub fn acct_for(&self, name: &Name) -> AcctFlag {
        self.acct_overrides
            .get(name)
            .copied()
            .unwrap_or(self.default_acct)
    }

    /// Expiry actually stamped on content for `name`: individual content
    /// is forced uncacheable so every interest reaches the producer.
    pub fn expiry_for(&self, name: &Name) -> Tick {
        match self.acct_for(name) {
            AcctFlag::Individual => 0,
            _ => self.content_expiry,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dedup_window == 0 {
            return Err(ConfigError::Invalid("dedup window must be positive"));
        }
        if self.nonce_bits == 0 {
            return Err(ConfigError::Invalid("nonce width must be positive"));
        }
        // expiry_for already forces 0 for individual names; flag configs
        // that *ask* for caching of individual content anyway, since that
        // is a policy contradiction worth surfacing.
        if self.default_acct == AcctFlag::Individual && self.content_expiry != 0 {
            return Err(ConfigError::IndividualMustNotBeCached(
                self.prefix.to_lci(),
            ));
        }
        for (name, acct) in &self.acct_overrides {
            if *acct == AcctFlag::Individual && self.content_expiry != 0 {
                return Err(ConfigError::IndividualMustNotBeCached(name.to_lci()));
            }
        }
        Ok(())
    }
}

/// What the producer sends back for an ingested interest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    Content(ContentObject),
    Nack(Nack),
    /// The name is not under this producer's prefix.
    NotMine,
}

/// Message-level producer counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProducerStats {
    pub interests_received: u64,
    pub pints_received: u64,
    /// Sum of the count fields of all received pInts.
    pub pint_count_sum: u64,
    pub nacks_sent: u64,
    pub foreign_names: u64,
}

/// One producer instance: policy, ledgers and key material.
#[derive(Debug, Clone)]
pub struct Producer {
    config: ProducerConfig,
    registry: Arc<KeyRegistry>,
    ledger: LedgerSet,
    payloads: BTreeMap<Name, Bytes>,
    pub stats: ProducerStats,
}

impl Producer {
    pub fn new(config: ProducerConfig, registry: Arc<KeyRegistry>) -> Result<Self, ConfigError> {
        config.validate()?;
        let ledger = LedgerSet::new(
            config.dedup_window,
            config.dedup_window,
            config.keep_requests_log,
        );
        Ok(Producer {
            config,
            registry,
            ledger,
            payloads: BTreeMap::new(),
            stats: ProducerStats::default(),
        })
    }

    pub fn config(&self) -> &ProducerConfig {
        &self.config
    }

    pub fn ledger(&self) -> &LedgerSet {
        &self.ledger
    }

    /// Ingests one pInt: updates the ledger selected by the pInt type,
    /// deduplicates distinct reports, verifies individual ones, and
    /// attributes every rejection to the pInt's origin.
    pub fn ingest_pint(&mut self, pint: &PInt, clock: Tick) -> IngestReport {
        if !self.config.prefix.is_prefix_of(pint.name()) {
            self.stats.foreign_names += 1;
            return IngestReport::default();
        }
        self.stats.pints_received += 1;
        self.stats.pint_count_sum += pint.count();
        let name = pint.name().clone();
        let mut report = IngestReport::default();
        match pint.ptype() {
            AcctFlag::Aggregate => {
                self.ledger.record_aggregate(&name, pint.count());
                report.accepted = pint.count();
            }
            AcctFlag::Distinct => {
                for blob in pint.cdata() {
                    report.merge(self.ingest_distinct_blob(&name, blob, Some(pint.origin()), clock));
                }
            }
            AcctFlag::Individual => {
                for blob in pint.cdata() {
                    match self.verify_individual_blob(blob, &name, clock) {
                        Ok(consumer) => {
                            self.ledger.record_individual(&consumer, &name);
                            report.accepted += 1;
                        }
                        Err(reason) => {
                            report.merge(self.ledger.record_rejection(
                                &name,
                                Some(pint.origin()),
                                reason,
                            ));
                        }
                    }
                }
            }
            AcctFlag::None => unreachable!("pInt type is never NONE"),
        }
        self.ledger.log_request(&name, clock);
        report
    }

    /// Ingests one interest that reached the producer: counts it exactly
    /// as a pInt with count 1 would, then serves content, or a NACK when
    /// individual accounting requirements are not met.
    pub fn ingest_interest(&mut self, interest: &Interest, clock: Tick) -> Response {
        let name = interest.name().clone();
        if !self.config.prefix.is_prefix_of(&name) {
            self.stats.foreign_names += 1;
            return Response::NotMine;
        }
        self.stats.interests_received += 1;
        self.ledger.log_request(&name, clock);
        match self.config.acct_for(&name) {
            AcctFlag::None => {}
            AcctFlag::Aggregate => {
                self.ledger.record_aggregate(&name, 1);
            }
            AcctFlag::Distinct => {
                if let Some(payload) = interest.payload() {
                    self.ingest_distinct_blob(&name, payload, None, clock);
                } else {
                    self.ledger
                        .record_rejection(&name, None, RejectClass::Malformed);
                }
            }
            AcctFlag::Individual => {
                let Some(payload) = interest.payload() else {
                    return self.nack(name, NackReason::MissingCrsd);
                };
                match self.verify_individual_blob(payload, &name, clock) {
                    Ok(consumer) => self.ledger.record_individual(&consumer, &name),
                    Err(reason) => {
                        self.ledger.record_rejection(&name, None, reason);
                        return self.nack(name, NackReason::BadCrsd);
                    }
                }
            }
        }
        Response::Content(self.publish(&name))
    }

    /// The content object this producer publishes for `name`.
    pub fn publish(&mut self, name: &Name) -> ContentObject {
        let payload = self
            .payloads
            .entry(name.clone())
            .or_insert_with(|| Bytes::from(vec![0u8; self.config.payload_bytes]))
            .clone();
        ContentObject::new(
            name.clone(),
            payload,
            self.config.acct_for(name),
            self.config.expiry_for(name),
            Bytes::new(),
        )
        .expect("producer content satisfies message limits")
    }

    fn nack(&mut self, name: Name, reason: NackReason) -> Response {
        self.stats.nacks_sent += 1;
        let requirements = self.requirements_blob();
        Response::Nack(
            Nack::new(name, reason, requirements).expect("requirements blob within limits"),
        )
    }

    /// Human-readable description of the consumer-specific data this
    /// producer expects. Provisional format; see `docs/formats.md`.
    fn requirements_blob(&self) -> Bytes {
        let text = format!(
            "form=pseudonym;nonce_bits={};tag=mac-or-sig;enc=pk-or-sym",
            self.config.nonce_bits
        );
        Bytes::from(text)
    }

    fn ingest_distinct_blob(
        &mut self,
        name: &Name,
        blob: &Bytes,
        origin: Option<&Bytes>,
        clock: Tick,
    ) -> IngestReport {
        match CrsdPayload::decode(blob) {
            Ok(CrsdPayload::Distinct(tag)) => {
                self.ledger
                    .record_distinct(name, &tag.nonce, tag.timestamp, clock)
            }
            _ => self
                .ledger
                .record_rejection(name, origin, RejectClass::Malformed),
        }
    }

    /// Full verification pipeline for one individual-accounting blob:
    /// parse, strip the anonymizing layer if present, check the keyed tag
    /// against this name, and enforce nonce freshness. Returns the
    /// consumer identity the counter should be attributed to.
    fn verify_individual_blob(
        &mut self,
        blob: &Bytes,
        name: &Name,
        clock: Tick,
    ) -> Result<Bytes, RejectClass> {
        let payload = CrsdPayload::decode(blob).map_err(|_| RejectClass::Malformed)?;
        let sec: SecCrsd = match payload {
            CrsdPayload::Sec(s) => s,
            CrsdPayload::Anon(a) => match a.scheme().map_err(|_| RejectClass::Malformed)? {
                AcrsdScheme::PublicKey => {
                    let sk = self
                        .registry
                        .producer_sk(&self.config.prefix)
                        .ok_or(RejectClass::UnknownKey)?;
                    open_a_crsd(&a, sk).map_err(|_| RejectClass::DecryptFailed)?
                }
                AcrsdScheme::SharedKey => {
                    open_a_crsd_sym(&a, |tag| self.registry.sym_by_tag(tag))
                        .map_err(|_| RejectClass::DecryptFailed)?
                }
            },
            CrsdPayload::Distinct(_) => return Err(RejectClass::Malformed),
        };
        if sec.crsd.identity.is_empty() {
            return Err(RejectClass::Malformed);
        }
        let consumer = sec.crsd.identity.clone();
        let verifier = self
            .registry
            .verifier(&consumer, &self.config.prefix)
            .ok_or(RejectClass::UnknownKey)?;
        verify_sec_crsd(&sec, name, &verifier, &mut self.ledger.replay, clock).map_err(
            |reject| match reject {
                Reject::BadTag => RejectClass::BadTag,
                Reject::StaleTimestamp => RejectClass::Stale,
                Reject::Replay => RejectClass::Replay,
            },
        )?;
        Ok(consumer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crsd_crypto::{
        make_a_crsd, make_sec_crsd, Crsd, CrsdForm, DistinctTag, TagScheme,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn name(s: &str) -> Name {
        Name::parse(s).unwrap()
    }

    fn origin() -> Bytes {
        Bytes::from_static(b"r7")
    }

    fn aggregate_producer() -> Producer {
        let config = ProducerConfig::new(name("/p"), AcctFlag::Aggregate);
        Producer::new(config, Arc::new(KeyRegistry::new())).unwrap()
    }

    fn individual_setup() -> (Producer, Arc<KeyRegistry>, Bytes, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let consumer = Bytes::from_static(b"cr1");
        let registry = Arc::new(KeyRegistry::generate(
            &mut rng,
            &name("/p"),
            std::slice::from_ref(&consumer),
            TagScheme::Mac,
        ));
        let config = ProducerConfig::new(name("/p"), AcctFlag::Individual);
        let producer = Producer::new(config, registry.clone()).unwrap();
        (producer, registry, consumer, rng)
    }

    fn individual_blob(
        registry: &KeyRegistry,
        consumer: &Bytes,
        content: &Name,
        clock: Tick,
        rng: &mut ChaCha8Rng,
    ) -> Bytes {
        let key = registry.tag_key(consumer, &name("/p")).unwrap();
        let crsd = Crsd::new(CrsdForm::Pseudonym, consumer.clone()).unwrap();
        let sec = make_sec_crsd(&crsd, content, &key, 128, clock, rng);
        let pk = registry.producer_pk(&name("/p")).unwrap();
        CrsdPayload::Anon(make_a_crsd(&sec, pk, rng)).encode()
    }

    #[test]
    fn aggregate_pint_adds_count() {
        let mut p = aggregate_producer();
        let pint = PInt::new(name("/p/a"), AcctFlag::Aggregate, origin(), 4, vec![]).unwrap();
        let report = p.ingest_pint(&pint, 10);
        assert_eq!(report.accepted, 4);
        assert_eq!(p.ledger().query(AcctFlag::Aggregate, Some(&name("/p/a"))), 4);
    }

    #[test]
    fn foreign_names_are_ignored_with_metric() {
        let mut p = aggregate_producer();
        let pint = PInt::new(name("/q/a"), AcctFlag::Aggregate, origin(), 1, vec![]).unwrap();
        assert_eq!(p.ingest_pint(&pint, 0), IngestReport::default());
        assert_eq!(p.stats.foreign_names, 1);
        assert_eq!(p.ingest_interest(&Interest::plain(name("/q/a")), 0), Response::NotMine);
    }

    #[test]
    fn duplicate_distinct_nonce_counts_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let config = ProducerConfig::new(name("/p"), AcctFlag::Distinct);
        let mut p = Producer::new(config, Arc::new(KeyRegistry::new())).unwrap();
        let tag = DistinctTag::generate(128, 10, &mut rng);
        let blob = CrsdPayload::Distinct(tag).encode();
        let pint = |b: &Bytes| {
            PInt::new(
                name("/p/a"),
                AcctFlag::Distinct,
                origin(),
                1,
                vec![b.clone()],
            )
            .unwrap()
        };
        let first = p.ingest_pint(&pint(&blob), 12);
        let second = p.ingest_pint(&pint(&blob), 14);
        assert_eq!((first.accepted, first.duplicates), (1, 0));
        assert_eq!((second.accepted, second.duplicates), (0, 1));
        assert_eq!(p.ledger().query(AcctFlag::Distinct, Some(&name("/p/a"))), 1);
        assert_eq!(p.ledger().distinct_hits(Some(&name("/p/a"))), 2);
    }

    #[test]
    fn individual_accepts_valid_and_rejects_name_mismatch() {
        let (mut p, registry, consumer, mut rng) = individual_setup();
        let blob = individual_blob(&registry, &consumer, &name("/p/a"), 100, &mut rng);
        let good = PInt::new(
            name("/p/a"),
            AcctFlag::Individual,
            origin(),
            1,
            vec![blob.clone()],
        )
        .unwrap();
        assert_eq!(p.ingest_pint(&good, 105).accepted, 1);
        assert_eq!(p.ledger().individual_count(&consumer, &name("/p/a")), 1);

        // same blob under a different name: tag binding must reject it
        let renamed = PInt::new(
            name("/p/b"),
            AcctFlag::Individual,
            origin(),
            1,
            vec![blob],
        )
        .unwrap();
        let report = p.ingest_pint(&renamed, 106);
        assert_eq!(report.rejected, 1);
        assert_eq!(p.ledger().rejections_by_origin().get(&origin()), Some(&1));
        assert_eq!(
            p.ledger().reject_reasons().get(&RejectClass::BadTag),
            Some(&1)
        );
    }

    #[test]
    fn individual_interest_without_crsd_gets_missing_nack() {
        let (mut p, _, _, _) = individual_setup();
        match p.ingest_interest(&Interest::plain(name("/p/a")), 5) {
            Response::Nack(n) => {
                assert_eq!(n.reason(), NackReason::MissingCrsd);
                assert_eq!(n.name(), &name("/p/a"));
                assert!(!n.requirements().is_empty());
            }
            other => panic!("expected nack, got {other:?}"),
        }
        assert_eq!(p.stats.nacks_sent, 1);
    }

    #[test]
    fn individual_interest_with_garbage_gets_bad_nack() {
        let (mut p, _, _, _) = individual_setup();
        let interest = Interest::new(
            name("/p/a"),
            Some(Bytes::from_static(b"\x99garbage")),
        )
        .unwrap();
        match p.ingest_interest(&interest, 5) {
            Response::Nack(n) => assert_eq!(n.reason(), NackReason::BadCrsd),
            other => panic!("expected nack, got {other:?}"),
        }
    }

    #[test]
    fn individual_interest_with_valid_acrsd_serves_and_counts() {
        let (mut p, registry, consumer, mut rng) = individual_setup();
        let blob = individual_blob(&registry, &consumer, &name("/p/a"), 50, &mut rng);
        let interest = Interest::new(name("/p/a"), Some(blob)).unwrap();
        match p.ingest_interest(&interest, 52) {
            Response::Content(co) => {
                assert_eq!(co.acct(), AcctFlag::Individual);
                assert_eq!(co.expiry_time(), 0, "individual content is uncacheable");
            }
            other => panic!("expected content, got {other:?}"),
        }
        assert_eq!(p.ledger().individual_count(&consumer, &name("/p/a")), 1);
    }

    #[test]
    fn replayed_blob_is_rejected_and_attributed() {
        let (mut p, registry, consumer, mut rng) = individual_setup();
        let blob = individual_blob(&registry, &consumer, &name("/p/a"), 100, &mut rng);
        let interest = Interest::new(name("/p/a"), Some(blob.clone())).unwrap();
        assert!(matches!(p.ingest_interest(&interest, 101), Response::Content(_)));
        // a malicious router replays the observed payload inside a pInt
        let replay = PInt::new(
            name("/p/a"),
            AcctFlag::Individual,
            origin(),
            1,
            vec![blob],
        )
        .unwrap();
        let report = p.ingest_pint(&replay, 103);
        assert_eq!(report.rejected, 1);
        assert_eq!(
            p.ledger().reject_reasons().get(&RejectClass::Replay),
            Some(&1)
        );
        assert_eq!(p.ledger().individual_count(&consumer, &name("/p/a")), 1);
    }

    #[test]
    fn aggregate_interest_counts_like_unit_pint() {
        let mut p = aggregate_producer();
        match p.ingest_interest(&Interest::plain(name("/p/a")), 0) {
            Response::Content(co) => assert_eq!(co.acct(), AcctFlag::Aggregate),
            other => panic!("expected content, got {other:?}"),
        }
        assert_eq!(p.ledger().query(AcctFlag::Aggregate, Some(&name("/p/a"))), 1);
    }

    #[test]
    fn individual_config_with_caching_is_rejected() {
        let mut config = ProducerConfig::new(name("/p"), AcctFlag::Individual);
        config.content_expiry = 100;
        assert!(matches!(
            Producer::new(config, Arc::new(KeyRegistry::new())),
            Err(ConfigError::IndividualMustNotBeCached(_))
        ));
    }

    #[test]
    fn requests_log_records_arrivals_when_enabled() {
        let mut config = ProducerConfig::new(name("/p"), AcctFlag::Aggregate);
        config.keep_requests_log = true;
        let mut p = Producer::new(config, Arc::new(KeyRegistry::new())).unwrap();
        p.ingest_interest(&Interest::plain(name("/p/a")), 5);
        let pint = PInt::new(name("/p/b"), AcctFlag::Aggregate, origin(), 2, vec![]).unwrap();
        p.ingest_pint(&pint, 9);
        let log = p.ledger().requests_log().expect("log enabled");
        assert_eq!(log, &[(name("/p/a"), 5), (name("/p/b"), 9)]);
        // off by default, keeping storage within the stated bounds
        let quiet = aggregate_producer();
        assert!(quiet.ledger().requests_log().is_none());
    }

    #[test]
    fn query_snapshot_and_empty_ledger() {
        let mut p = aggregate_producer();
        assert_eq!(p.ledger().query(AcctFlag::Aggregate, None), 0);
        for count in [1u64, 1, 2] {
            let pint =
                PInt::new(name("/p/a"), AcctFlag::Aggregate, origin(), count, vec![]).unwrap();
            p.ingest_pint(&pint, 0);
        }
        assert_eq!(p.ledger().query(AcctFlag::Aggregate, None), 4);
        let snap = p.ledger().snapshot();
        assert_eq!(snap.rows.len(), 1);
        assert_eq!(snap.rows[0].count, 4);
        assert!(snap.to_csv().starts_with("name,type,count,duplicates,rejections\n"));
    }
}
