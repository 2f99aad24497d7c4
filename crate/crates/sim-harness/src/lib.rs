//! Deterministic discrete-event simulator for pInt-based accounting.
//!
//! A run wires together: a [`Topology`] (generated or loaded from a file),
//! FIBs built by shortest-path search toward the producer, Poisson or
//! fixed-count consumers over a shared name pool, the per-node forwarding
//! engine, one producer instance, and optionally a compromised router
//! injecting forged or replayed accounting reports.
//!
//! Time is integer ticks (1 s = 1000 ticks). Events are processed in
//! (tick, sequence) order, so a report is a pure function of the scenario
//! and the seed: same seed, byte-identical CSV.

mod engine;
mod fib;
mod metrics;
mod scenario;
mod topology;

pub use engine::{key_name, node_router_id, pool_name, run};
pub use fib::{build_fibs, route_to_producer, FibPlan};
pub use metrics::{
    ConsumerTotals, LinkMetrics, MetricsReport, NodeMetrics, ProducerReport,
};
pub use scenario::{
    AdversaryBehavior, AdversarySpec, CrsdMode, Prewarm, Scenario, TrafficSpec,
};
pub use topology::{Role, Topology, TopologySummary};

pub use analytic_model::Scheme;

/// Scenario or topology rejected before the run started.
#[derive(Debug, Clone, thiserror::Error)]
#[error("config: {0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        ConfigError(msg.into())
    }
}
