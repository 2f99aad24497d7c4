use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use ccn_core::{Name, Tick};

use crate::ConfigError;

/// Role a node plays in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Consumer,
    Router,
    Producer,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Consumer => "consumer",
            Role::Router => "router",
            Role::Producer => "producer",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "consumer" => Some(Role::Consumer),
            "router" => Some(Role::Router),
            "producer" => Some(Role::Producer),
            _ => None,
        }
    }
}

/// Node/link description of one experiment network, plus the name
/// prefixes served by producer nodes.
#[derive(Debug, Clone)]
pub struct Topology {
    pub nodes: BTreeMap<u32, Role>,
    pub links: Vec<(u32, u32, Tick)>,
    pub prefixes: Vec<(u32, Name)>,
}

/// Headline numbers for `topo check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopologySummary {
    pub consumers: usize,
    pub routers: usize,
    pub producers: usize,
    pub links: usize,
}

impl Topology {
    /// Line of `n` nodes: consumer 0, routers 1..n-2, producer n-1, unit
    /// delays, producer serving `prefix`.
    pub fn path(n: u32, prefix: Name) -> Topology {
        assert!(n >= 3, "a path needs consumer, router, producer");
        let mut nodes = BTreeMap::new();
        nodes.insert(0, Role::Consumer);
        for id in 1..n - 1 {
            nodes.insert(id, Role::Router);
        }
        nodes.insert(n - 1, Role::Producer);
        let links = (0..n - 1).map(|id| (id, id + 1, 1)).collect();
        Topology {
            nodes,
            links,
            prefixes: vec![(n - 1, prefix)],
        }
    }

    /// Complete binary tree: producer at the root (id 0), routers at
    /// depths `1..height`, consumers at the leaves (depth `height`).
    /// Height 5 gives 1 producer, 30 routers, 32 consumers.
    pub fn binary_tree(height: u32, prefix: Name) -> Topology {
        assert!(height >= 2, "tree needs at least one router level");
        let mut nodes = BTreeMap::new();
        let mut links = Vec::new();
        let total: u32 = (1 << (height + 1)) - 1;
        for id in 0..total {
            let depth = (id + 1).ilog2();
            let role = if depth == 0 {
                Role::Producer
            } else if depth == height {
                Role::Consumer
            } else {
                Role::Router
            };
            nodes.insert(id, role);
            if id > 0 {
                links.push(((id - 1) / 2, id, 1));
            }
        }
        Topology {
            nodes,
            links,
            prefixes: vec![(0, prefix)],
        }
    }

    /// Parses the line-oriented topology format: `node <id> <role>`,
    /// `link <a> <b> <delay>`, `prefix <node> <lci>`; `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Topology, ConfigError> {
        let mut nodes = BTreeMap::new();
        let mut links = Vec::new();
        let mut prefixes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = parts_of(content);
            let keyword = parts.next().unwrap();
            let fail = |msg: String| ConfigError::new(format!("topology line {line}: {msg}"));
            match keyword {
                "node" => {
                    let id = parse_id(parts.next(), line)?;
                    let role = parts
                        .next()
                        .and_then(Role::parse)
                        .ok_or_else(|| fail("expected role consumer|router|producer".into()))?;
                    if nodes.insert(id, role).is_some() {
                        return Err(fail(format!("duplicate node {id}")));
                    }
                }
                "link" => {
                    let a = parse_id(parts.next(), line)?;
                    let b = parse_id(parts.next(), line)?;
                    let delay: Tick = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail("expected integer delay".into()))?;
                    links.push((a, b, delay));
                }
                "prefix" => {
                    let id = parse_id(parts.next(), line)?;
                    let name = parts
                        .next()
                        .ok_or_else(|| fail("expected lci prefix".into()))
                        .and_then(|s| {
                            Name::parse(s).map_err(|e| fail(format!("bad prefix: {e}")))
                        })?;
                    prefixes.push((id, name));
                }
                other => return Err(fail(format!("unknown keyword '{other}'"))),
            }
        }
        Ok(Topology {
            nodes,
            links,
            prefixes,
        })
    }

    pub fn from_file(path: &Path) -> Result<Topology, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read topology file {path:?}: {e}")))?;
        Topology::parse(&text)
    }

    /// Checks structural invariants: known endpoints, no self-links or
    /// duplicate links, connectivity, at least one producer with a served
    /// prefix, and every consumer attached somewhere.
    pub fn validate(&self) -> Result<TopologySummary, ConfigError> {
        if self.nodes.is_empty() {
            return Err(ConfigError::new("topology has no nodes"));
        }
        let mut seen_links = BTreeSet::new();
        for (a, b, _) in &self.links {
            if a == b {
                return Err(ConfigError::new(format!("self-link at node {a}")));
            }
            for end in [a, b] {
                if !self.nodes.contains_key(end) {
                    return Err(ConfigError::new(format!("link references unknown node {end}")));
                }
            }
            let key = (*a.min(b), *a.max(b));
            if !seen_links.insert(key) {
                return Err(ConfigError::new(format!(
                    "duplicate link between {} and {}",
                    key.0, key.1
                )));
            }
        }
        let producers = self.producers();
        if producers.is_empty() {
            return Err(ConfigError::new("topology has no producer"));
        }
        for p in &producers {
            if !self.prefixes.iter().any(|(node, _)| node == p) {
                return Err(ConfigError::new(format!("producer {p} serves no prefix")));
            }
        }
        for (node, prefix) in &self.prefixes {
            if self.nodes.get(node) != Some(&Role::Producer) {
                return Err(ConfigError::new(format!(
                    "prefix {} assigned to non-producer node {node}",
                    prefix.to_lci()
                )));
            }
        }
        for (id, role) in &self.nodes {
            if *role == Role::Consumer && self.neighbors(*id).is_empty() {
                return Err(ConfigError::new(format!("consumer {id} has no link")));
            }
        }
        // connectivity from the first node
        let start = *self.nodes.keys().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for next in self.neighbors(n) {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        if seen.len() != self.nodes.len() {
            return Err(ConfigError::new("topology is not connected"));
        }
        Ok(TopologySummary {
            consumers: self.consumers().len(),
            routers: self.routers().len(),
            producers: producers.len(),
            links: self.links.len(),
        })
    }

    /// Neighbor ids in ascending order.
    pub fn neighbors(&self, node: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .links
            .iter()
            .filter_map(|(a, b, _)| {
                if *a == node {
                    Some(*b)
                } else if *b == node {
                    Some(*a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn delay(&self, a: u32, b: u32) -> Option<Tick> {
        self.links
            .iter()
            .find(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a))
            .map(|(_, _, d)| *d)
    }

    pub fn consumers(&self) -> Vec<u32> {
        self.by_role(Role::Consumer)
    }

    pub fn routers(&self) -> Vec<u32> {
        self.by_role(Role::Router)
    }

    pub fn producers(&self) -> Vec<u32> {
        self.by_role(Role::Producer)
    }

    fn by_role(&self, role: Role) -> Vec<u32> {
        self.nodes
            .iter()
            .filter(|(_, r)| **r == role)
            .map(|(id, _)| *id)
            .collect()
    }

    /// Routers directly attached to at least one consumer.
    pub fn edge_routers(&self) -> Vec<u32> {
        self.routers()
            .into_iter()
            .filter(|r| {
                self.neighbors(*r)
                    .iter()
                    .any(|n| self.nodes.get(n) == Some(&Role::Consumer))
            })
            .collect()
    }
}

fn parts_of(s: &str) -> impl Iterator<Item = &str> {
    s.split_whitespace()
}

fn parse_id(part: Option<&str>, line: usize) -> Result<u32, ConfigError> {
    part.and_then(|s| s.parse().ok())
        .ok_or_else(|| ConfigError::new(format!("topology line {line}: expected node id")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prefix() -> Name {
        Name::parse("/p").unwrap()
    }

    #[test]
    fn path_layout() {
        let t = Topology::path(5, prefix());
        let s = t.validate().unwrap();
        assert_eq!(
            s,
            TopologySummary {
                consumers: 1,
                routers: 3,
                producers: 1,
                links: 4
            }
        );
        assert_eq!(t.neighbors(2), vec![1, 3]);
    }

    #[test]
    fn binary_tree_layout_matches_height_five() {
        let t = Topology::binary_tree(5, prefix());
        let s = t.validate().unwrap();
        assert_eq!(s.consumers, 32);
        assert_eq!(s.routers, 30);
        assert_eq!(s.producers, 1);
        assert_eq!(s.links, 62);
        // each leaf router (depth 4) has two consumer children
        assert_eq!(t.edge_routers().len(), 16);
    }

    #[test]
    fn parse_round() {
        let text = "\
# tiny network
node 0 consumer
node 1 router
node 2 producer
link 0 1 1
link 1 2 2
prefix 2 lci:/acme
";
        let t = Topology::parse(text).unwrap();
        t.validate().unwrap();
        assert_eq!(t.delay(1, 2), Some(2));
        assert_eq!(t.prefixes[0].1, Name::parse("/acme").unwrap());
    }

    #[test]
    fn validation_catches_defects() {
        let disconnected = "\
node 0 consumer
node 1 router
node 2 producer
node 3 router
link 0 1 1
link 1 2 1
prefix 2 lci:/p
";
        assert!(Topology::parse(disconnected).unwrap().validate().is_err());
        let no_prefix = "\
node 0 consumer
node 1 producer
link 0 1 1
";
        assert!(Topology::parse(no_prefix).unwrap().validate().is_err());
        assert!(Topology::parse("node 0 wizard\n").is_err());
        let dup = "\
node 0 router
node 1 producer
link 0 1 1
link 1 0 1
prefix 1 lci:/p
";
        assert!(Topology::parse(dup).unwrap().validate().is_err());
    }
}
