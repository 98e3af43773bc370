use core::fmt;

use crate::error::CycleError;

/// Node label. Nodes of a cycle on `n` cities are `1..=n`.
pub type Node = u32;

/// Unordered pair of distinct nodes, stored with the smaller node first.
///
/// The derived ordering is the canonical one: by smaller node, then larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePair {
    lo: Node,
    hi: Node,
}

impl NodePair {
    pub fn new(a: Node, b: Node) -> Result<Self, CycleError> {
        if a == b {
            return Err(CycleError::DegeneratePair(a));
        }
        if a == 0 || b == 0 {
            return Err(CycleError::NodeOutOfRange { node: 0, n: 0 });
        }
        Ok(Self::new_unchecked(a, b))
    }

    /// Builds a pair without checking `a != b`.
    #[inline]
    pub(crate) fn new_unchecked(a: Node, b: Node) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            NodePair { lo: a, hi: b }
        } else {
            NodePair { lo: b, hi: a }
        }
    }

    #[inline]
    pub fn lo(self) -> Node {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> Node {
        self.hi
    }

    #[inline]
    pub fn contains(self, node: Node) -> bool {
        self.lo == node || self.hi == node
    }

    /// Number of shared endpoints (0, 1 or 2).
    #[inline]
    pub fn shared(self, other: NodePair) -> usize {
        usize::from(other.contains(self.lo)) + usize::from(other.contains(self.hi))
    }

    #[inline]
    pub fn meets(self, other: NodePair) -> bool {
        self.shared(other) > 0
    }
}

impl fmt::Display for NodePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}
