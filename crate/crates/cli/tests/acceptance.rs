//! Acceptance suite: one test per headline claim, each printing a
//! PASS/FAIL line with the measured values (`--nocapture` to see them).
//!
//! Every simulated claim is checked at its stated tolerance (exact where
//! exact, seed-averaged where statistical), and every honest, loss-free
//! pInt run in this suite must additionally satisfy the conservation
//! identity: interests reaching the producer plus summed pInt counts
//! equal the interests consumers issued.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use analytic_model::{message_counts, overhead_ratio, OverheadParams, Scheme};
use ccn_core::{AcctFlag, Name};
use crsd_crypto::collision_probability;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim_harness::{
    build_fibs, node_router_id, pool_name, route_to_producer, run, MetricsReport, Prewarm, Role,
    Scenario, Topology, TrafficSpec,
};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn scenario_file(name: &str) -> Scenario {
    Scenario::from_file(&repo_root().join("scenarios").join(name)).unwrap()
}

fn prefix() -> Name {
    Name::parse("lci:/acme").unwrap()
}

fn verdict(id: &str, label: &str, pass: bool, detail: &str) {
    println!(
        "[{id}] {label}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "[{id}] {label}: {detail}");
}

/// Conservation identity, required on every honest loss-free pInt run.
fn assert_conservation(report: &MetricsReport, context: &str) {
    let (learned, issued) = report.conservation_sides();
    assert_eq!(learned, issued, "conservation violated in {context}");
    assert_eq!(report.lost_messages, 0, "loss in {context}");
}

fn path5_traffic(scheme: Scheme, gamma: u64) -> TrafficSpec {
    TrafficSpec {
        gamma: Some(gamma),
        gamma_spacing: 20,
        name_pool: 1,
        duration: 20 * gamma + 200,
        scheme,
        acct_mode: if scheme == Scheme::Pint {
            AcctFlag::Aggregate
        } else {
            AcctFlag::None
        },
        prewarm: if scheme == Scheme::Cacheless {
            Prewarm::None
        } else {
            Prewarm::Edge
        },
        payload_bytes: 100_000,
        ..TrafficSpec::default()
    }
}

/// Simulated (p_l, p_r): message totals on the consumer-facing and
/// producer-facing links of the 5-node path.
fn simulated_path_counts(scheme: Scheme, gamma: u64) -> (u64, u64) {
    let scenario = Scenario::new(Topology::path(5, prefix()), path5_traffic(scheme, gamma));
    let report = run(&scenario, 1).unwrap();
    if scheme == Scheme::Pint {
        assert_conservation(&report, &format!("path5 {scheme:?} gamma={gamma}"));
    }
    assert_eq!(report.consumers.satisfied, gamma);
    (report.link_messages(0, 1), report.link_messages(3, 4))
}

#[test]
fn a01_scheme_message_counts_match_analytic() {
    let started = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for scheme in [Scheme::Encryption, Scheme::Pint, Scheme::Cacheless] {
        for gamma in [1u64, 10, 100] {
            let expected = message_counts(scheme, gamma);
            let (p_l, p_r) = simulated_path_counts(scheme, gamma);
            pass &= p_l == expected.p_l && p_r == expected.p_r;
            detail = format!(
                "last: {} gamma={gamma} simulated=({p_l},{p_r}) analytic=({},{})",
                scheme.as_str(),
                expected.p_l,
                expected.p_r
            );
            assert_eq!((p_l, p_r), (expected.p_l, expected.p_r), "{detail}");
        }
    }
    let elapsed = started.elapsed();
    pass &= elapsed.as_secs_f64() < 1.0;
    verdict(
        "A1",
        "scheme message counts, simulated == analytic",
        pass,
        &format!("{detail}; {elapsed:.2?} < 1s"),
    );
}

#[test]
fn a02_encryption_costs_exactly_twice_pint() {
    let mut pass = true;
    for gamma in 1..=100u64 {
        let enc = message_counts(Scheme::Encryption, gamma);
        let pint = message_counts(Scheme::Pint, gamma);
        pass &= enc.p_l == 2 * pint.p_l && enc.p_r == 2 * pint.p_r;
    }
    // and on the wire, not just in the formulas
    for gamma in [1u64, 10, 100] {
        let enc = simulated_path_counts(Scheme::Encryption, gamma);
        let pint = simulated_path_counts(Scheme::Pint, gamma);
        pass &= enc.0 == 2 * pint.0 && enc.1 == 2 * pint.1;
    }
    verdict(
        "A2",
        "encryption scheme costs exactly twice the pInt scheme",
        pass,
        "ratio 2 on both measurement links for gamma in 1..=100",
    );
}

#[test]
fn a03_overhead_ratio_curve() {
    let started = Instant::now();
    // byte-count oracle from the documented wire layout, computed by hand:
    // pInt = 1 + (2 + 42) + 3 + 10 + 10 + 2 = 70 with a 40-byte name and
    // 8-byte origin; content = 64 + payload.
    let oracle_pint = 70.0;
    let oracle_content = |payload: usize| 64.0 + payload as f64;
    let payloads = [10usize, 100, 1_000, 10_000, 100_000, 1_000_000];
    let mut pass = true;
    for total_links in [2usize, 3, 4] {
        let mut previous = f64::INFINITY;
        for payload in payloads {
            let params = OverheadParams::new(payload, total_links);
            pass &= overhead_ratio(&params, 1) == 0.0;
            let expected = oracle_pint / oracle_content(payload);
            for link in 2..=total_links {
                let ratio = overhead_ratio(&params, link);
                pass &= ratio == expected;
            }
            let upstream = overhead_ratio(&params, 2);
            pass &= upstream < previous;
            previous = upstream;
        }
    }
    let elapsed = started.elapsed();
    pass &= elapsed.as_secs_f64() < 1.0;
    verdict(
        "A3",
        "per-link overhead ratio: zero on the consumer link, byte-exact upstream, strictly decreasing in payload",
        pass,
        &format!("links 2/3/4, payloads 10B..1MB; {elapsed:.2?} < 1s"),
    );
}

fn tree5_traffic() -> TrafficSpec {
    TrafficSpec {
        rate_per_sec: 500.0,
        name_pool: 10,
        duration: 10_000,
        acct_mode: AcctFlag::Aggregate,
        ..TrafficSpec::default()
    }
}

/// Fraction of pInts among messages processed by routers strictly
/// upstream of cache-hit locations.
fn upstream_pint_fraction(report: &MetricsReport, topo: &Topology) -> f64 {
    let plan = build_fibs(topo, &topo.prefixes).unwrap();
    let probe = pool_name(&topo.prefixes[0].1, 0);
    let mut upstream: BTreeSet<u32> = BTreeSet::new();
    for (id, metrics) in &report.per_node {
        if metrics.role == Role::Router && metrics.cache_hits > 0 {
            for hop in route_to_producer(&plan, *id, &probe) {
                if topo.nodes.get(&hop) == Some(&Role::Router) {
                    upstream.insert(hop);
                }
            }
        }
    }
    assert!(!upstream.is_empty(), "no upstream routers found");
    let (mut pints, mut total) = (0u64, 0u64);
    for id in upstream {
        let m = &report.per_node[&id];
        pints += m.pints;
        total += m.messages_processed();
    }
    pints as f64 / total as f64
}

#[test]
fn a04_upstream_pint_dominance() {
    let started = Instant::now();
    let topo = Topology::binary_tree(5, prefix());
    let scenario = Scenario::new(topo.clone(), tree5_traffic());
    let fractions: Vec<f64> = std::thread::scope(|scope| {
        let handles: Vec<_> = (1..=10u64)
            .map(|seed| {
                let scenario = &scenario;
                let topo = &topo;
                scope.spawn(move || {
                    let report = run(scenario, seed).unwrap();
                    assert_conservation(&report, &format!("tree5 seed {seed}"));
                    upstream_pint_fraction(&report, topo)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let elapsed = started.elapsed();
    let pass = mean >= 0.95 && elapsed.as_secs_f64() < 30.0;
    verdict(
        "A4",
        "pInt share upstream of cache hits (tree h5, A=500, M=10, 10 seeds)",
        pass,
        &format!("mean fraction {mean:.4} >= 0.95; {elapsed:.2?} < 30s"),
    );
}

#[test]
fn a05_producer_conservation() {
    let mut checked = 0u32;
    // Poisson path, warm and cold caches, collapsing on and off.
    for (collapsing, prewarm) in [
        (true, Prewarm::None),
        (true, Prewarm::Edge),
        (false, Prewarm::Edge),
        (false, Prewarm::None),
    ] {
        let traffic = TrafficSpec {
            rate_per_sec: 300.0,
            name_pool: 4,
            duration: 2500,
            collapsing,
            prewarm,
            acct_mode: AcctFlag::Aggregate,
            payload_bytes: 50_000,
            ..TrafficSpec::default()
        };
        let scenario = Scenario::new(Topology::path(5, prefix()), traffic);
        for seed in [1u64, 2] {
            let report = run(&scenario, seed).unwrap();
            assert_conservation(
                &report,
                &format!("path5 collapsing={collapsing} prewarm={prewarm:?} seed={seed}"),
            );
            checked += 1;
        }
    }
    // a cold tree, where collapsing and caching interact
    let traffic = TrafficSpec {
        rate_per_sec: 400.0,
        name_pool: 3,
        duration: 2500,
        acct_mode: AcctFlag::Distinct,
        payload_bytes: 50_000,
        ..TrafficSpec::default()
    };
    let scenario = Scenario::new(Topology::binary_tree(4, prefix()), traffic);
    for seed in [7u64, 8] {
        let report = run(&scenario, seed).unwrap();
        assert_conservation(&report, &format!("tree4 distinct seed={seed}"));
        checked += 1;
    }
    verdict(
        "A5",
        "conservation: producer interests + pInt counts == issued interests",
        true,
        &format!("exact on {checked} honest runs (plus every pInt run in A1/A4/A6)"),
    );
}

fn cache_hit_scenario(topology: Topology) -> Scenario {
    let traffic = TrafficSpec {
        rate_per_sec: 200.0,
        name_pool: 5,
        duration: 3000,
        collapsing: false,
        prewarm: Prewarm::Edge,
        acct_mode: AcctFlag::Aggregate,
        payload_bytes: 100_000,
        ..TrafficSpec::default()
    };
    Scenario::new(topology, traffic)
}

#[test]
fn a06_cache_hit_correctness() {
    let dfn = Topology::from_file(&repo_root().join("topologies/dfn.topo")).unwrap();
    let cases = [
        ("path5", Topology::path(5, prefix())),
        ("tree5", Topology::binary_tree(5, prefix())),
        ("dfn", dfn),
    ];
    let mut detail = String::new();
    for (label, topo) in cases {
        let scenario = cache_hit_scenario(topo);
        let report = run(&scenario, 11).unwrap();
        assert_conservation(&report, label);
        let aggregate_total: u64 = report
            .producer
            .ledger
            .rows
            .iter()
            .filter(|r| r.kind == AcctFlag::Aggregate)
            .map(|r| r.count)
            .sum();
        let hits = report.total_cache_hits();
        assert_eq!(
            aggregate_total, hits,
            "{label}: aggregate ledger vs router cache hits"
        );
        assert!(hits > 0, "{label}: no traffic");
        detail.push_str(&format!("{label}: {aggregate_total}=={hits}; "));
    }
    verdict(
        "A6",
        "producer aggregate count equals total router cache hits (collapsing off, warm edges)",
        true,
        detail.trim_end_matches("; "),
    );
}

#[test]
fn a07_collision_formula() {
    let started = Instant::now();
    let mut pass = (collision_probability(1, 2) - 0.5).abs() < 1e-15;
    // pigeonhole: more draws than values
    pass &= collision_probability(8, 257) == 1.0;
    pass &= collision_probability(1, 3) == 1.0;

    // Monte-Carlo oracle: 10^6 trials per draw count at 8-bit nonces.
    let trials = 1_000_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut detail = String::new();
    for draws in [2u64, 20, 100] {
        let mut collided = 0u32;
        let mut buf = vec![0u8; draws as usize];
        for _ in 0..trials {
            rng.fill_bytes(&mut buf);
            let mut seen = [false; 256];
            let mut hit = false;
            for &b in &buf {
                if seen[b as usize] {
                    hit = true;
                    break;
                }
                seen[b as usize] = true;
            }
            collided += hit as u32;
        }
        let estimate = collided as f64 / trials as f64;
        let exact = collision_probability(8, draws);
        let delta = (estimate - exact).abs();
        pass &= delta < 0.005;
        detail.push_str(&format!("s={draws}: |{exact:.5}-{estimate:.5}|={delta:.5}; "));
    }
    let elapsed = started.elapsed();
    pass &= elapsed.as_secs_f64() < 30.0;
    verdict(
        "A7",
        "collision formula: exact values and Monte-Carlo agreement within 0.005",
        pass,
        &format!("{}{elapsed:.2?} < 30s", detail),
    );
}

#[test]
fn a08_security_detection() {
    // Honest baseline: same traffic, no adversary.
    let mut baseline = scenario_file("adversary-replay.scenario");
    baseline.adversary = None;
    let honest = run(&baseline, 1).unwrap();
    assert_conservation(&honest, "honest individual run");
    assert_eq!(
        honest.producer.totals.rejected, 0,
        "honest-run false rejections"
    );
    assert!(honest.producer.totals.accepted > 0);

    let origin = node_router_id(2);
    let mut detail = String::new();
    for (name, expected_reason) in [
        ("adversary-forge.scenario", "malformed"),
        ("adversary-replay.scenario", "replay"),
    ] {
        let scenario = scenario_file(name);
        let report = run(&scenario, 1).unwrap();
        assert_eq!(report.adversary_emitted, 100, "{name}: emitted");
        assert_eq!(report.producer.totals.rejected, 100, "{name}: all rejected");
        assert_eq!(
            report.producer.rejections_by_origin.get(&origin),
            Some(&100),
            "{name}: attribution to the compromised router"
        );
        let reason_count = report
            .producer
            .reject_reasons
            .iter()
            .find(|(r, _)| *r == expected_reason)
            .map(|(_, c)| *c)
            .unwrap_or(0);
        assert_eq!(reason_count, 100, "{name}: reason breakdown");
        assert_eq!(
            report.producer.individual, honest.producer.individual,
            "{name}: individual counters unchanged"
        );
        detail.push_str(&format!("{expected_reason}:100/100 rejected; "));
    }
    verdict(
        "A8",
        "forged and replayed pInts: 100% rejected, attributed, counters unchanged, 0 false rejections",
        true,
        detail.trim_end_matches("; "),
    );
}

#[test]
fn a09_acrsd_randomization() {
    use bytes::Bytes;
    use crsd_crypto::{
        make_a_crsd, make_sec_crsd, open_a_crsd, pk_keygen, Crsd, CrsdForm, TagKey,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let keypair = pk_keygen(&mut rng);
    let crsd = Crsd::new(CrsdForm::Pseudonym, Bytes::from_static(b"cr1")).unwrap();
    let key = TagKey::Mac(Bytes::from_static(b"shared"));
    let sec = make_sec_crsd(&crsd, &prefix(), &key, 128, 42, &mut rng);
    let mut ciphertexts = BTreeSet::new();
    let mut pass = true;
    for _ in 0..100 {
        let a = make_a_crsd(&sec, &keypair.pk, &mut rng);
        pass &= ciphertexts.insert(a.ciphertext.clone());
        pass &= open_a_crsd(&a, &keypair.sk).unwrap() == sec;
    }
    verdict(
        "A9",
        "anonymized consumer data: 100 encryptions pairwise distinct, round-trip identity",
        pass,
        &format!("{} distinct ciphertexts", ciphertexts.len()),
    );
}

#[test]
fn a10_determinism() {
    let mut checked = 0u32;
    // file-driven scenarios, one representative seed each
    for name in [
        "path5.scenario",
        "dfn-cachehits.scenario",
        "adversary-replay.scenario",
    ] {
        let scenario = scenario_file(name);
        let a = run(&scenario, scenario.seeds[0]).unwrap().to_csv();
        let b = run(&scenario, scenario.seeds[0]).unwrap().to_csv();
        assert_eq!(a, b, "{name}: reports differ across reruns");
        checked += 1;
    }
    // the statistical tree run
    let scenario = Scenario::new(Topology::binary_tree(5, prefix()), tree5_traffic());
    let a = run(&scenario, 1).unwrap().to_csv();
    let b = run(&scenario, 1).unwrap().to_csv();
    assert_eq!(a, b, "tree5: reports differ across reruns");
    checked += 1;
    verdict(
        "A10",
        "same seed, byte-identical CSV reports",
        true,
        &format!("{checked} scenarios re-run and compared"),
    );
}
