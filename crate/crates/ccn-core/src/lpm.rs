//! Longest-prefix matching over name prefixes.

use std::collections::BTreeMap;

use crate::name::{Name, NamePrefix};

/// Prefix-keyed lookup table. `lookup` walks the query name's prefixes
/// from longest to shortest, so a hit costs at most one map probe per
/// component rather than a scan of the whole table.
#[derive(Debug, Clone, Default)]
pub struct PrefixTable<V> {
    map: BTreeMap<NamePrefix, V>,
}

impl<V> PrefixTable<V> {
    pub fn new() -> Self {
        PrefixTable {
            map: BTreeMap::new(),
        }
    }

    /// Inserts an entry, replacing (and returning) any previous value for
    /// the same prefix.
    pub fn insert(&mut self, prefix: NamePrefix, value: V) -> Option<V> {
        self.map.insert(prefix, value)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NamePrefix, &V)> {
        self.map.iter()
    }

    /// The entry whose prefix matches `name` with the greatest component
    /// count, or `None` when no prefix of `name` is present.
    pub fn lookup(&self, name: &Name) -> Option<(&NamePrefix, &V)> {
        for k in (0..=name.component_count()).rev() {
            if let Some((p, v)) = self.map.get_key_value(&name.prefix(k)) {
                return Some((p, v));
            }
        }
        None
    }
}

impl<V> FromIterator<(NamePrefix, V)> for PrefixTable<V> {
    fn from_iter<T: IntoIterator<Item = (NamePrefix, V)>>(iter: T) -> Self {
        PrefixTable {
            map: iter.into_iter().collect(),
        }
    }
}

/// Longest-prefix match over a flat table. Prefixes must be unique.
pub fn longest_prefix_match<'a, V>(table: &'a [(NamePrefix, V)], name: &Name) -> Option<&'a V> {
    let tbl: PrefixTable<&'a V> = table.iter().map(|(p, v)| (p.clone(), v)).collect();
    tbl.lookup(name).map(|(_, v)| *v)
}
