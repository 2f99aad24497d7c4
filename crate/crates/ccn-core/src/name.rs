use std::fmt;

use crate::message::MessageError;

/// Maximum number of components in a name.
pub const MAX_COMPONENTS: usize = 32;
/// Maximum length of a single name component, in bytes.
pub const MAX_COMPONENT_LEN: usize = 255;
/// Maximum encoded length of a whole name (count word plus components).
pub const MAX_NAME_ENCODED_LEN: usize = 8192;

/// Hierarchical content identifier: an ordered list of non-empty byte
/// strings. Matching between interests and content is exact; prefixes
/// only matter for forwarding (see [`crate::longest_prefix_match`]).
///
/// Components are raw bytes. The `lci:/a/b` surface syntax accepted by
/// [`Name::parse`] splits on `/` without any unescaping, so comparison
/// stays byte-exact end to end.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    components: Vec<Vec<u8>>,
}

/// A name used as a routing prefix. Structurally identical to [`Name`];
/// the alias only signals intent at API boundaries.
pub type NamePrefix = Name;

impl Name {
    /// Builds a name, validating component count, component sizes and the
    /// total encoded length.
    pub fn new(components: Vec<Vec<u8>>) -> Result<Self, MessageError> {
        if components.len() > MAX_COMPONENTS {
            return Err(MessageError::Oversize("name component count"));
        }
        for c in &components {
            if c.is_empty() {
                return Err(MessageError::Invalid("empty name component"));
            }
            if c.len() > MAX_COMPONENT_LEN {
                return Err(MessageError::Oversize("name component"));
            }
        }
        let name = Name { components };
        if name.encoded_len() > MAX_NAME_ENCODED_LEN {
            return Err(MessageError::Oversize("name"));
        }
        Ok(name)
    }

    /// The empty name `lci:/`, used as the default route prefix.
    pub fn root() -> Self {
        Name::default()
    }

    /// Parses `lci:/a/b` (the `lci:` scheme is optional) into components.
    /// Segments are taken verbatim; empty segments are rejected except for
    /// the bare root `/`.
    pub fn parse(s: &str) -> Result<Self, MessageError> {
        let rest = s.strip_prefix("lci:").unwrap_or(s);
        let Some(path) = rest.strip_prefix('/') else {
            return Err(MessageError::Invalid("name must start with '/'"));
        };
        if path.is_empty() {
            return Ok(Name::root());
        }
        Name::new(path.split('/').map(|c| c.as_bytes().to_vec()).collect())
    }

    pub fn components(&self) -> &[Vec<u8>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_root(&self) -> bool {
        self.components.is_empty()
    }

    /// The first `k` components as a new name. `k` must not exceed the
    /// component count.
    pub fn prefix(&self, k: usize) -> Name {
        Name {
            components: self.components[..k].to_vec(),
        }
    }

    /// True when `self` is a (non-strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Name) -> bool {
        self.components.len() <= other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a == b)
    }

    /// Appends one component, re-validating limits.
    pub fn child(&self, component: &[u8]) -> Result<Name, MessageError> {
        let mut components = self.components.clone();
        components.push(component.to_vec());
        Name::new(components)
    }

    /// Encoded length under the wire codec: a 2-byte component count plus
    /// a 2-byte length word per component.
    pub fn encoded_len(&self) -> usize {
        2 + self.components.iter().map(|c| 2 + c.len()).sum::<usize>()
    }

    /// Canonical `lci:/...` rendering. Bytes outside `[A-Za-z0-9._-]` are
    /// escaped as `%XX` so the output is unambiguous in CSV cells.
    pub fn to_lci(&self) -> String {
        if self.is_root() {
            return "lci:/".to_string();
        }
        let mut out = String::from("lci:");
        for c in &self.components {
            out.push('/');
            for &b in c {
                if b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-') {
                    out.push(b as char);
                } else {
                    out.push_str(&format!("%{b:02X}"));
                }
            }
        }
        out
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lci())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_lci())
    }
}
