use std::collections::{BTreeMap, VecDeque};

use ccn_core::{longest_prefix_match, Name};
use node_engine::FibEntry;

use crate::topology::{Role, Topology};
use crate::ConfigError;

/// FIB tables for every node plus hop distances from the (nearest)
/// producer, both derived by breadth-first search.
#[derive(Debug, Clone)]
pub struct FibPlan {
    pub fibs: BTreeMap<u32, Vec<FibEntry>>,
    pub distance: BTreeMap<u32, u32>,
}

/// Builds shortest-path (hop count) FIBs toward each served prefix. All
/// equal-cost next hops are listed, ordered by ascending node id, so
/// multicast runs are deterministic. Link delays affect timing, not
/// routing.
pub fn build_fibs(topo: &Topology, prefixes: &[(u32, Name)]) -> Result<FibPlan, ConfigError> {
    let mut fibs: BTreeMap<u32, Vec<FibEntry>> = BTreeMap::new();
    let mut distance: BTreeMap<u32, u32> = BTreeMap::new();
    for (producer, prefix) in prefixes {
        if topo.nodes.get(producer) != Some(&Role::Producer) {
            return Err(ConfigError::new(format!(
                "prefix {} not anchored at a producer",
                prefix.to_lci()
            )));
        }
        let dist = bfs_distances(topo, *producer);
        for id in topo.nodes.keys() {
            let Some(d) = dist.get(id) else {
                return Err(ConfigError::new(format!(
                    "node {id} cannot reach producer {producer}"
                )));
            };
            let best = distance.entry(*id).or_insert(*d);
            *best = (*best).min(*d);
            if id == producer {
                continue;
            }
            // all neighbors one hop closer to the producer, ascending
            let next_hops: Vec<u32> = topo
                .neighbors(*id)
                .into_iter()
                .filter(|n| dist.get(n).is_some_and(|nd| nd + 1 == *d))
                .collect();
            debug_assert!(!next_hops.is_empty(), "connected graph has a parent");
            fibs.entry(*id).or_default().push(FibEntry {
                prefix: prefix.clone(),
                next_hops,
            });
        }
    }
    Ok(FibPlan { fibs, distance })
}

fn bfs_distances(topo: &Topology, start: u32) -> BTreeMap<u32, u32> {
    let mut dist = BTreeMap::from([(start, 0u32)]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        let d = dist[&n];
        for next in topo.neighbors(n) {
            if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(next) {
                slot.insert(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

/// The node sequence a unicast message for `name` follows from `from`
/// (exclusive) to the producer, walking first next hops.
pub fn route_to_producer(plan: &FibPlan, from: u32, name: &Name) -> Vec<u32> {
    let mut path = Vec::new();
    let mut here = from;
    // a node with no FIB at all is the producer
    while let Some(entries) = plan.fibs.get(&here) {
        let table: Vec<(Name, Vec<u32>)> = entries
            .iter()
            .map(|e| (e.prefix.clone(), e.next_hops.clone()))
            .collect();
        let Some(hops) = longest_prefix_match(&table, name) else {
            break;
        };
        here = hops[0];
        path.push(here);
        if path.len() > plan.fibs.len() + 1 {
            break; // defensive: no cycle should ever occur on shortest paths
        }
    }
    path
}
