//! Engine-level invariants over randomized inputs.

use bytes::Bytes;
use ccn_core::{AcctFlag, ContentObject, Interest, Message, Name, PInt, Tick};
use node_engine::{FibEntry, NodeConfig, NodeState};
use proptest::prelude::*;

fn name_from(parts: &[u8]) -> Name {
    Name::new(parts.iter().map(|b| vec![b % 3]).collect()).unwrap()
}

fn arb_name() -> impl Strategy<Value = Name> {
    prop::collection::vec(any::<u8>(), 1..=3).prop_map(|p| name_from(&p))
}

fn arb_acct() -> impl Strategy<Value = AcctFlag> {
    prop_oneof![
        Just(AcctFlag::None),
        Just(AcctFlag::Aggregate),
        Just(AcctFlag::Distinct),
        Just(AcctFlag::Individual),
    ]
}

fn arb_content() -> impl Strategy<Value = ContentObject> {
    (arb_name(), arb_acct(), 0u64..50).prop_map(|(n, acct, expiry)| {
        ContentObject::new(n, Bytes::from_static(b"d"), acct, expiry, Bytes::new()).unwrap()
    })
}

#[derive(Debug, Clone)]
enum Step {
    Interest(Name, Option<u8>, u32),
    Content(ContentObject, u32),
    PInt(Name, u32),
    Tick(Tick),
}

fn arb_step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (arb_name(), prop::option::of(any::<u8>()), 0u32..6)
            .prop_map(|(n, p, ifc)| Step::Interest(n, p, ifc)),
        (arb_content(), 0u32..6).prop_map(|(c, ifc)| Step::Content(c, ifc)),
        (arb_name(), 0u32..6).prop_map(|(n, ifc)| Step::PInt(n, ifc)),
        (1u64..20).prop_map(Step::Tick),
    ]
}

fn run_trace(node: &mut NodeState, steps: &[Step]) -> Vec<Vec<(u32, Message)>> {
    let mut outputs = Vec::new();
    for step in steps {
        let out = match step {
            Step::Interest(n, p, ifc) => {
                let payload = p.map(|b| Bytes::copy_from_slice(&[b]));
                node.on_interest(Interest::new(n.clone(), payload).unwrap(), *ifc)
            }
            Step::Content(c, ifc) => node.on_content(c.clone(), *ifc),
            Step::PInt(n, ifc) => {
                let pint = PInt::new(
                    n.clone(),
                    AcctFlag::Aggregate,
                    Bytes::from_static(b"adv"),
                    1,
                    vec![],
                )
                .unwrap();
                node.on_pint(pint, *ifc)
            }
            Step::Tick(dt) => {
                node.set_clock(node.clock() + dt);
                vec![]
            }
        };
        outputs.push(out);
    }
    outputs
}

fn fresh_node(multicast: bool) -> NodeState {
    let mut node = NodeState::new(
        Bytes::from_static(b"r"),
        NodeConfig {
            multicast,
            ..NodeConfig::default()
        },
    );
    node.install_fib(vec![
        FibEntry {
            prefix: Name::root(),
            next_hops: vec![10],
        },
        FibEntry {
            prefix: name_from(&[0]),
            next_hops: vec![11, 12],
        },
    ]);
    node
}

proptest! {
    // Processing any pInt leaves the content store and PIT untouched.
    #[test]
    fn pints_leave_no_state(steps in prop::collection::vec(arb_step(), 0..40), n in arb_name()) {
        let mut node = fresh_node(false);
        run_trace(&mut node, &steps);
        let cs_before = node.cs().clone();
        let pit_before = node.pit().clone();
        let pint = PInt::new(n, AcctFlag::Distinct, Bytes::from_static(b"x"), 1, vec![Bytes::new()]).unwrap();
        node.on_pint(pint, 3);
        prop_assert_eq!(node.cs(), &cs_before);
        prop_assert_eq!(node.pit(), &pit_before);
    }

    // Every operation output contains at most one pInt, addressed to
    // exactly one interface, and every PIT entry keeps exactly one
    // forwarded arrival while collapsing is on.
    #[test]
    fn pint_unicast_and_collapsing_soundness(
        steps in prop::collection::vec(arb_step(), 0..60),
        multicast in any::<bool>(),
    ) {
        let mut node = fresh_node(multicast);
        let outputs = run_trace(&mut node, &steps);
        for out in &outputs {
            let pints = out.iter().filter(|(_, m)| matches!(m, Message::PInt(_))).count();
            prop_assert!(pints <= 1);
            for entry in node.pit().values() {
                let forwarded = entry.arrivals.iter().filter(|a| a.forwarded).count();
                prop_assert_eq!(forwarded, 1);
                let mut ifcs: Vec<u32> = entry.arrivals.iter().map(|a| a.interface).collect();
                ifcs.sort_unstable();
                ifcs.dedup();
                prop_assert_eq!(ifcs.len(), entry.arrivals.len());
            }
        }
    }

    // evict_expired agrees with a plain filter on (expiry, clock).
    #[test]
    fn eviction_matches_filter_oracle(
        entries in prop::collection::btree_map(arb_name(), 1u64..40, 0..100),
        clock in 0u64..60,
    ) {
        let mut node = fresh_node(false);
        for (n, expiry) in &entries {
            let co = ContentObject::new(
                n.clone(), Bytes::new(), AcctFlag::None, *expiry, Bytes::new(),
            ).unwrap();
            node.insert_cache(co);
        }
        node.set_clock(clock);
        let survivors_oracle: Vec<&Name> = entries
            .iter()
            .filter(|(_, expiry)| **expiry > clock) // inserted at tick 0
            .map(|(n, _)| n)
            .collect();
        let evicted = node.evict_expired();
        prop_assert_eq!(evicted, entries.len() - survivors_oracle.len());
        let survivors: Vec<&Name> = node.cs().keys().collect();
        prop_assert_eq!(survivors, survivors_oracle);
    }
}
