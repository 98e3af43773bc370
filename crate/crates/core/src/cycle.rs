//! Cycles built one node at a time.
//!
//! A cycle on `[n]` is stored as a doubly linked ring keyed by node label.
//! The *positive* direction is the one in which node 2 follows node 1 before
//! node 3 does; `succ` always points in that direction. Inserting a node never
//! changes the relative order of the existing nodes, so the orientation fixed
//! at `n = 3` stays valid forever.
//!
//! Each node `k >= 2` remembers the ends `(ν⁻(k), ν⁺(k))` of the edge it
//! subdivided. Every edge `{i, j}` with `i < j` that ever exists was created
//! when `j` was inserted, so it is one of the two "lower" edges of `j`. That
//! lets the cycle answer "which node subdivided `{i, j}`?" in O(1).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CycleError;
use crate::pair::{Node, NodePair};
use crate::pedigree::Pedigree;

/// Insertion neighbours of a node: `minus` precedes it and `plus` follows it
/// in positive direction at the moment of insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nu {
    pub minus: Node,
    pub plus: Node,
}

impl Nu {
    /// The unordered pair `{ν⁻, ν⁺}`; `None` for node 2, whose record is `{1}`.
    pub fn pair(self) -> Option<NodePair> {
        NodePair::new(self.minus, self.plus).ok()
    }

    pub fn contains(self, node: Node) -> bool {
        self.minus == node || self.plus == node
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolvingCycle {
    n: Node,
    succ: Vec<Node>,
    pred: Vec<Node>,
    nu_minus: Vec<Node>,
    nu_plus: Vec<Node>,
    // Node that subdivided {nu_minus[j], j} (resp. {nu_plus[j], j}); 0 while intact.
    split_minus: Vec<Node>,
    split_plus: Vec<Node>,
}

impl EvolvingCycle {
    /// The unique cycle on `{1, 2, 3}`, oriented `1 → 2 → 3 → 1`.
    pub fn base() -> Self {
        EvolvingCycle {
            n: 3,
            succ: vec![0, 2, 3, 1],
            pred: vec![0, 3, 1, 2],
            nu_minus: vec![0, 0, 1, 2],
            nu_plus: vec![0, 0, 1, 1],
            split_minus: vec![0; 4],
            split_plus: vec![0; 4],
        }
    }

    /// Replays `pedigree` from the triangle.
    pub fn from_pedigree(pedigree: &Pedigree) -> Self {
        let mut cycle = Self::with_capacity(pedigree.n());
        for &choice in pedigree.choices() {
            cycle
                .insert_at_index_mut(choice)
                .expect("validated pedigree choices are in range");
        }
        cycle
    }

    /// Rebuilds the insertion history of an arbitrary cyclic order of `[n]`.
    ///
    /// The order may start anywhere and run in either direction.
    pub fn from_order(order: &[Node]) -> Result<Self, CycleError> {
        let pedigree = Pedigree::from_order(order)?;
        Ok(Self::from_pedigree(&pedigree))
    }

    fn with_capacity(n: Node) -> Self {
        let mut c = Self::base();
        let cap = n as usize + 1;
        for v in [
            &mut c.succ,
            &mut c.pred,
            &mut c.nu_minus,
            &mut c.nu_plus,
            &mut c.split_minus,
            &mut c.split_plus,
        ] {
            v.reserve(cap.saturating_sub(v.len()));
        }
        c
    }

    #[inline]
    pub fn n(&self) -> Node {
        self.n
    }

    #[inline]
    fn check_node(&self, node: Node) -> Result<(), CycleError> {
        if node == 0 || node > self.n {
            Err(CycleError::NodeOutOfRange { node, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Successor in positive direction.
    #[inline]
    pub fn succ(&self, node: Node) -> Node {
        self.succ[node as usize]
    }

    /// Predecessor in positive direction.
    #[inline]
    pub fn pred(&self, node: Node) -> Node {
        self.pred[node as usize]
    }

    /// Nodes in positive direction starting at node 1.
    pub fn order(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut v = 1;
        loop {
            out.push(v);
            v = self.succ(v);
            if v == 1 {
                break;
            }
        }
        out
    }

    /// Edges in index order: the `k`-th item is the `k`-th edge.
    pub fn edges(&self) -> impl Iterator<Item = NodePair> + '_ {
        let mut v = 1;
        (0..self.n).map(move |_| {
            let w = self.succ(v);
            let e = NodePair::new_unchecked(v, w);
            v = w;
            e
        })
    }

    /// The edge leaving `node` in positive direction.
    #[inline]
    pub fn edge_after(&self, node: Node) -> NodePair {
        NodePair::new_unchecked(node, self.succ(node))
    }

    #[inline]
    pub fn has_edge(&self, e: NodePair) -> bool {
        if e.hi() > self.n {
            return false;
        }
        self.succ(e.lo()) == e.hi() || self.succ(e.hi()) == e.lo()
    }

    /// The `k`-th edge `{p_k, p_{k+1}}`, counted in positive direction from node 1.
    pub fn kth_edge(&self, k: Node) -> Result<NodePair, CycleError> {
        if k == 0 || k > self.n {
            return Err(CycleError::EdgeIndexOutOfRange { index: k, n: self.n });
        }
        let mut v = 1;
        for _ in 1..k {
            v = self.succ(v);
        }
        Ok(self.edge_after(v))
    }

    /// Position (1-based) of `e` in the positive edge order, O(n).
    pub fn edge_index(&self, e: NodePair) -> Option<Node> {
        if !self.has_edge(e) {
            return None;
        }
        self.edges().position(|f| f == e).map(|i| i as Node + 1)
    }

    /// Stored insertion record; `None` for node 1.
    pub fn nu(&self, k: Node) -> Option<Nu> {
        if k < 2 || k > self.n {
            return None;
        }
        Some(Nu {
            minus: self.nu_minus[k as usize],
            plus: self.nu_plus[k as usize],
        })
    }

    /// `ν(k)` as a pair; defined for `3 <= k <= n`.
    #[inline]
    pub fn nu_pair(&self, k: Node) -> Option<NodePair> {
        self.nu(k).and_then(Nu::pair)
    }

    /// Whether `ν(k)` (as a set) meets `pair`. `ν(1) = ∅`, `ν(2) = {1}`.
    #[inline]
    pub fn nu_meets(&self, k: Node, pair: NodePair) -> bool {
        match self.nu(k) {
            None => false,
            Some(nu) => pair.contains(nu.minus) || pair.contains(nu.plus),
        }
    }

    /// `(ν⁻(k), ν⁺(k))` recomputed by walking from `k` to the first smaller
    /// node in each direction. Nodes 2 and 3 follow the fixed conventions.
    pub fn nu_by_walk(&self, k: Node) -> Result<(Node, Node), CycleError> {
        if k < 2 {
            return Err(CycleError::NodeOutOfRange { node: k, n: self.n });
        }
        self.check_node(k)?;
        match k {
            2 => Ok((1, 1)),
            3 => Ok((2, 1)),
            _ => {
                let mut plus = self.succ(k);
                while plus > k {
                    plus = self.succ(plus);
                }
                let mut minus = self.pred(k);
                while minus > k {
                    minus = self.pred(minus);
                }
                Ok((minus, plus))
            }
        }
    }

    /// Node whose insertion subdivided `pair`, if any, via the stored records.
    #[inline]
    pub fn inserter_of(&self, pair: NodePair) -> Option<Node> {
        let (i, j) = (pair.lo(), pair.hi());
        if j < 2 || j > self.n {
            return None;
        }
        let ju = j as usize;
        let m = if self.nu_minus[ju] == i {
            self.split_minus[ju]
        } else if self.nu_plus[ju] == i {
            self.split_plus[ju]
        } else {
            0
        };
        (m != 0).then_some(m)
    }

    /// The open arc between `i` and `j` that avoids `min({1,2,3} \ {i,j})`,
    /// listed in positive direction.
    pub fn segment_between(&self, i: Node, j: Node) -> Result<Vec<Node>, CycleError> {
        if i == j {
            return Err(CycleError::DegeneratePair(i));
        }
        self.check_node(i)?;
        self.check_node(j)?;
        let avoid = (1..=3).find(|x| *x != i && *x != j).expect("two nodes exclude at most two of 1,2,3");
        // Try the arc from i to j in positive direction.
        let mut arc = Vec::new();
        let mut v = self.succ(i);
        while v != j {
            if v == avoid {
                break;
            }
            arc.push(v);
            v = self.succ(v);
        }
        if v == j {
            return Ok(arc);
        }
        arc.clear();
        let mut v = self.succ(j);
        while v != i {
            arc.push(v);
            v = self.succ(v);
        }
        Ok(arc)
    }

    /// Node `m` with `ν(m) = pair`, found by inspecting the segment between
    /// the pair's ends: it exists iff the segment is non-empty and all of its
    /// nodes exceed both ends, and then it is the segment minimum.
    pub fn find_inserter(&self, pair: NodePair) -> Option<Node> {
        let seg = self.segment_between(pair.lo(), pair.hi()).ok()?;
        let min = *seg.iter().min()?;
        (min > pair.hi()).then_some(min)
    }

    /// Inserts node `n + 1` into the `index`-th edge, returning a new cycle.
    pub fn insert_node(&self, index: Node) -> Result<Self, CycleError> {
        let mut next = self.clone();
        next.insert_at_index_mut(index)?;
        Ok(next)
    }

    /// Inserts node `n + 1` into `edge`, returning a new cycle.
    pub fn insert_into(&self, edge: NodePair) -> Result<Self, CycleError> {
        let mut next = self.clone();
        next.insert_mut(edge)?;
        Ok(next)
    }

    pub fn insert_at_index_mut(&mut self, index: Node) -> Result<Node, CycleError> {
        let edge = self.kth_edge(index)?;
        self.insert_mut(edge)
    }

    /// In-place insertion of node `n + 1` into `edge`; returns the new node.
    pub fn insert_mut(&mut self, edge: NodePair) -> Result<Node, CycleError> {
        let (minus, plus) = if edge.hi() > self.n {
            return Err(CycleError::NotAnEdge(edge));
        } else if self.succ(edge.lo()) == edge.hi() {
            (edge.lo(), edge.hi())
        } else if self.succ(edge.hi()) == edge.lo() {
            (edge.hi(), edge.lo())
        } else {
            return Err(CycleError::NotAnEdge(edge));
        };
        let m = self.n + 1;
        let j = edge.hi() as usize;
        if self.nu_minus[j] == edge.lo() && self.split_minus[j] == 0 {
            self.split_minus[j] = m;
        } else {
            debug_assert!(self.nu_plus[j] == edge.lo() && self.split_plus[j] == 0);
            self.split_plus[j] = m;
        }
        self.succ[minus as usize] = m;
        self.pred[plus as usize] = m;
        self.succ.push(plus);
        self.pred.push(minus);
        self.nu_minus.push(minus);
        self.nu_plus.push(plus);
        self.split_minus.push(0);
        self.split_plus.push(0);
        self.n = m;
        Ok(m)
    }

    /// The pedigree (edge-index form) that produces this cycle.
    pub fn pedigree(&self) -> Pedigree {
        Pedigree::from_order(&self.order()).expect("an evolving cycle is a valid cyclic order")
    }

    /// Cycle on the nodes `<= m`, i.e. this cycle as it was at time `m`.
    pub fn prefix(&self, m: Node) -> Result<Self, CycleError> {
        if m < 3 {
            return Err(CycleError::TooFewNodes(m));
        }
        self.check_node(m)?;
        let order: Vec<Node> = self.order().into_iter().filter(|v| *v <= m).collect();
        Self::from_order(&order)
    }
}

impl Default for EvolvingCycle {
    fn default() -> Self {
        Self::base()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: Node, b: Node) -> NodePair {
        NodePair::new(a, b).unwrap()
    }

    fn replay_pairs(pairs: &[(Node, Node)]) -> EvolvingCycle {
        let mut c = EvolvingCycle::base();
        for &(a, b) in pairs {
            c.insert_mut(pair(a, b)).unwrap();
        }
        c
    }

    // Insertion pairs of the worked two-cycle example for nodes 4..=10.
    const ALICE: [(Node, Node); 7] = [(1, 2), (2, 4), (2, 3), (4, 5), (3, 6), (1, 3), (3, 9)];
    const BOB: [(Node, Node); 7] = [(1, 3), (1, 2), (2, 3), (3, 4), (1, 4), (1, 8), (2, 6)];

    #[test]
    fn triangle_edges_and_records() {
        let t = EvolvingCycle::base();
        assert_eq!(t.order(), vec![1, 2, 3]);
        let edges: Vec<_> = t.edges().collect();
        assert_eq!(edges, vec![pair(1, 2), pair(2, 3), pair(3, 1)]);
        assert_eq!(t.nu(3), Some(Nu { minus: 2, plus: 1 }));
        assert_eq!(t.nu(2), Some(Nu { minus: 1, plus: 1 }));
        assert_eq!(t.nu(1), None);
    }

    #[test]
    fn kth_edge_examples() {
        let t = EvolvingCycle::base();
        assert_eq!(t.kth_edge(1).unwrap(), pair(1, 2));
        assert_eq!(t.kth_edge(3).unwrap(), pair(3, 1));
        let a4 = t.insert_node(1).unwrap();
        assert_eq!(a4.order(), vec![1, 4, 2, 3]);
        assert_eq!(a4.kth_edge(2).unwrap(), pair(4, 2));
        assert!(matches!(t.kth_edge(0), Err(CycleError::EdgeIndexOutOfRange { .. })));
        assert!(matches!(t.kth_edge(4), Err(CycleError::EdgeIndexOutOfRange { .. })));
    }

    #[test]
    fn insert_records_nu() {
        let t = EvolvingCycle::base();
        let a4 = t.insert_node(1).unwrap();
        assert_eq!(a4.nu_pair(4), Some(pair(1, 2)));
        assert_eq!(a4.nu(4), Some(Nu { minus: 1, plus: 2 }));
        let b4 = t.insert_node(3).unwrap();
        assert_eq!(b4.nu_pair(4), Some(pair(1, 3)));
        assert_eq!(b4.order(), vec![1, 2, 3, 4]);
        assert!(matches!(t.insert_node(4), Err(CycleError::EdgeIndexOutOfRange { .. })));
        assert!(matches!(a4.insert_into(pair(1, 2)), Err(CycleError::NotAnEdge(_))));
    }

    #[test]
    fn worked_example_orders() {
        let a10 = replay_pairs(&ALICE);
        assert_eq!(a10.order(), vec![1, 4, 7, 5, 2, 6, 8, 3, 10, 9]);
        let b10 = replay_pairs(&BOB);
        assert_eq!(b10.order(), vec![1, 5, 2, 10, 6, 3, 7, 4, 8, 9]);
    }

    #[test]
    fn nu_by_walk_examples() {
        let a10 = replay_pairs(&ALICE);
        assert_eq!(a10.nu_by_walk(4).unwrap(), (1, 2));
        let b10 = replay_pairs(&BOB);
        let (m, p) = b10.nu_by_walk(9).unwrap();
        assert_eq!(pair(m, p), pair(1, 8));
        assert_eq!(b10.nu_by_walk(3).unwrap(), (2, 1));
        assert!(b10.nu_by_walk(1).is_err());
        for k in 2..=10 {
            let nu = a10.nu(k).unwrap();
            assert_eq!(a10.nu_by_walk(k).unwrap(), (nu.minus, nu.plus));
        }
    }

    #[test]
    fn segment_examples() {
        let b4 = replay_pairs(&BOB[..1]);
        assert_eq!(b4.segment_between(2, 4).unwrap(), vec![3]);
        let b7 = replay_pairs(&BOB[..4]);
        assert_eq!(b7.order(), vec![1, 5, 2, 6, 3, 7, 4]);
        assert_eq!(b7.segment_between(3, 6).unwrap(), Vec::<Node>::new());
        let b10 = replay_pairs(&BOB);
        assert_eq!(b10.segment_between(1, 8).unwrap(), vec![9]);
        assert_eq!(b10.segment_between(8, 1).unwrap(), vec![9]);
        assert!(b10.segment_between(5, 5).is_err());
    }

    #[test]
    fn find_inserter_examples() {
        let b10 = replay_pairs(&BOB);
        assert_eq!(b10.find_inserter(pair(1, 3)), Some(4));
        assert_eq!(b10.inserter_of(pair(1, 3)), Some(4));
        let b7 = replay_pairs(&BOB[..4]);
        assert_eq!(b7.find_inserter(pair(3, 6)), None);
        assert_eq!(b7.inserter_of(pair(3, 6)), None);
        let b4 = replay_pairs(&BOB[..1]);
        assert_eq!(b4.find_inserter(pair(2, 4)), None);
        // 3 never subdivides anything.
        assert_eq!(EvolvingCycle::base().find_inserter(pair(1, 2)), None);
    }

    #[test]
    fn prefix_recovers_history() {
        let a10 = replay_pairs(&ALICE);
        let a5 = a10.prefix(5).unwrap();
        assert_eq!(a5, replay_pairs(&ALICE[..2]));
    }
}
