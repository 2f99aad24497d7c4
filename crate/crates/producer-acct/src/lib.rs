//! Producer-side accounting.
//!
//! A [`Producer`] owns one [`LedgerSet`] and ingests two kinds of input:
//! pInts pushed by routers (cache hits and collapsed interests) and
//! interests that made it all the way to the producer. Three ledgers back
//! the three accounting types:
//!
//! * aggregate: one counter per accountable name;
//! * distinct: per-name counters plus a nonce window that separates
//!   genuinely distinct requests from router-multicast echoes;
//! * individual: one counter per (consumer, name), fed only by verified
//!   consumer-specific data; everything that fails verification is
//!   rejected and attributed to the pInt origin that delivered it.
//!
//! Interests for individual-accounting content that lack (or carry bad)
//! consumer-specific data are answered with a NACK describing what the
//! producer expects.

mod ledger;
mod producer;

pub use ledger::{DistinctRecord, IngestReport, LedgerSet, LedgerSnapshot, RejectClass, SnapshotRow};
pub use producer::{Producer, ProducerConfig, ProducerStats, Response};

/// Producer configuration rejected at construction time.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("individual-accounting content must be published with expiry 0: {0}")]
    IndividualMustNotBeCached(String),
    #[error("invalid producer config: {0}")]
    Invalid(&'static str),
}
