//! The pedigree graph of two evolving cycles and the adjacency criterion.
//!
//! Node `m >= 4` becomes a vertex iff the two cycles inserted it into
//! different edges. A new vertex links to earlier vertices through four typed
//! rules: type 1 when one cycle's `ν(m)` is the other cycle's `ν(k)`, and
//! type 2 towards `ℓ = max ν(m)` unless the other cycle's `ν(ℓ)` meets `ν(m)`.
//! Two pedigrees are adjacent on the Pedigree polytope iff the final graph is
//! connected.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::cycle::EvolvingCycle;
use crate::error::GraphError;
use crate::pair::{Node, NodePair};
use crate::pedigree::Pedigree;
use crate::union_find::UnionFind;

/// Rule that produced a pedigree-graph edge, with its implicit direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeTag {
    T1AB,
    T1BA,
    T2AB,
    T2BA,
}

impl EdgeTag {
    pub const ALL: [EdgeTag; 4] = [EdgeTag::T1AB, EdgeTag::T1BA, EdgeTag::T2AB, EdgeTag::T2BA];

    /// "From A to B": driven by Alice's insertion pair.
    pub fn is_ab(self) -> bool {
        matches!(self, EdgeTag::T1AB | EdgeTag::T2AB)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeTag::T1AB => "T1-AB",
            EdgeTag::T1BA => "T1-BA",
            EdgeTag::T2AB => "T2-AB",
            EdgeTag::T2BA => "T2-BA",
        }
    }
}

impl fmt::Display for EdgeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeTag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        EdgeTag::ALL.into_iter().find(|t| t.as_str() == s).ok_or(())
    }
}

/// Edge between an earlier vertex `lo` and the vertex `hi` that created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypedEdge {
    pub lo: Node,
    pub hi: Node,
    pub tag: EdgeTag,
}

impl Ord for TypedEdge {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.hi, self.lo, self.tag).cmp(&(other.hi, other.lo, other.tag))
    }
}

impl PartialOrd for TypedEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Targets of the two rules driven by one side's insertion pair `pair` for a
/// node `m`, evaluated against the other side's cycle `other`.
///
/// Returns `(type-1 target, type-2 target)`. `other` may be at any time
/// `>= m − 1`; the type-1 lookup ignores inserters `>= m`.
#[inline]
pub(crate) fn side_targets(pair: NodePair, other: &EvolvingCycle, m: Node) -> (Option<Node>, Option<Node>) {
    let t1 = other.inserter_of(pair).filter(|k| *k < m);
    let l = pair.hi();
    let t2 = (!other.nu_meets(l, pair)).then_some(l);
    (t1, t2)
}

/// The (at most four) edges from a new vertex to earlier vertices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PastEdges {
    pub vertex: Node,
    pub t1_ab: Option<Node>,
    pub t1_ba: Option<Node>,
    pub t2_ab: Option<Node>,
    pub t2_ba: Option<Node>,
}

impl PastEdges {
    fn target(&self, tag: EdgeTag) -> Option<Node> {
        match tag {
            EdgeTag::T1AB => self.t1_ab,
            EdgeTag::T1BA => self.t1_ba,
            EdgeTag::T2AB => self.t2_ab,
            EdgeTag::T2BA => self.t2_ba,
        }
    }

    /// Edges sorted by `(lo, tag)`.
    pub fn edges(&self) -> Vec<TypedEdge> {
        let mut out: Vec<TypedEdge> = EdgeTag::ALL
            .into_iter()
            .filter_map(|tag| self.target(tag).map(|lo| TypedEdge { lo, hi: self.vertex, tag }))
            .collect();
        out.sort();
        out
    }

    pub fn has(&self, tag: EdgeTag, target: Node) -> bool {
        self.target(tag) == Some(target)
    }

    pub fn is_empty(&self) -> bool {
        self.t1_ab.is_none() && self.t1_ba.is_none() && self.t2_ab.is_none() && self.t2_ba.is_none()
    }

    pub fn ab_count(&self) -> u8 {
        u8::from(self.t1_ab.is_some()) + u8::from(self.t2_ab.is_some())
    }

    pub fn ba_count(&self) -> u8 {
        u8::from(self.t1_ba.is_some()) + u8::from(self.t2_ba.is_some())
    }

    /// Distinct neighbours in the collapsed (simple-graph) view, ascending.
    pub fn targets(&self) -> Vec<Node> {
        let mut t: Vec<Node> = [self.t1_ab, self.t1_ba, self.t2_ab, self.t2_ba].into_iter().flatten().collect();
        t.sort_unstable();
        t.dedup();
        t
    }
}

/// Whether node `m` is a vertex: both cycles know `m` and `ν_A(m) ≠ ν_B(m)`.
/// Nodes below 4 are never vertices.
pub fn is_vertex(a: &EvolvingCycle, b: &EvolvingCycle, m: Node) -> bool {
    m >= 4 && m <= a.n() && m <= b.n() && a.nu_pair(m) != b.nu_pair(m)
}

/// Edges created at time `m` between vertex `m` and earlier vertices.
pub fn past_edges(a: &EvolvingCycle, b: &EvolvingCycle, m: Node) -> Result<PastEdges, GraphError> {
    if !is_vertex(a, b, m) {
        return Err(GraphError::NotAVertex(m));
    }
    let na = a.nu_pair(m).expect("m >= 4");
    let nb = b.nu_pair(m).expect("m >= 4");
    let (t1_ab, t2_ab) = side_targets(na, b, m);
    let (t1_ba, t2_ba) = side_targets(nb, a, m);
    Ok(PastEdges { vertex: m, t1_ab, t1_ba, t2_ab, t2_ba })
}

/// What one call to [`PedigreeGraph::extend_mut`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtendOutcome {
    pub node: Node,
    pub vertex_added: bool,
    pub edges: PastEdges,
    /// Change in the number of connected components.
    pub delta_t: i32,
}

impl ExtendOutcome {
    pub fn isolated(&self) -> bool {
        self.vertex_added && self.edges.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct PedigreeGraph {
    n: Node,
    vertex: Vec<bool>,
    degree: Vec<u8>,
    past_ab: Vec<u8>,
    past_ba: Vec<u8>,
    edges: Vec<TypedEdge>,
    uf: UnionFind,
    vertex_count: u32,
    components: u32,
    max_degree: u8,
}

impl Default for PedigreeGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl PedigreeGraph {
    /// The empty graph at time 3.
    pub fn new() -> Self {
        PedigreeGraph {
            n: 3,
            vertex: vec![false; 4],
            degree: vec![0; 4],
            past_ab: vec![0; 4],
            past_ba: vec![0; 4],
            edges: Vec::new(),
            uf: UnionFind::new(4),
            vertex_count: 0,
            components: 0,
            max_degree: 0,
        }
    }

    /// Time of the graph: its vertices are a subset of `{4, …, n}`.
    pub fn n(&self) -> Node {
        self.n
    }

    pub fn is_vertex(&self, v: Node) -> bool {
        self.vertex.get(v as usize).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Node> + '_ {
        (4..=self.n).filter(|v| self.vertex[*v as usize])
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    /// Number of connected components, `T`.
    pub fn components(&self) -> u32 {
        self.components
    }

    /// Exactly one component. The empty graph is not connected.
    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    /// All typed edges, sorted by `(hi, lo, tag)`.
    pub fn edges(&self) -> &[TypedEdge] {
        &self.edges
    }

    /// Degree in the collapsed view (parallel typed edges count once).
    pub fn degree(&self, v: Node) -> u8 {
        self.degree.get(v as usize).copied().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u8 {
        self.max_degree
    }

    /// Typed edges to earlier vertices, `(AB-tagged, BA-tagged)`.
    pub fn past_degree(&self, v: Node) -> (u8, u8) {
        let i = v as usize;
        (self.past_ab.get(i).copied().unwrap_or(0), self.past_ba.get(i).copied().unwrap_or(0))
    }

    pub fn same_component(&self, u: Node, v: Node) -> bool {
        self.uf.find_const(u) == self.uf.find_const(v)
    }

    /// Representative of `v`'s component.
    pub fn component_of(&self, v: Node) -> Node {
        self.uf.find_const(v)
    }

    /// Vertex lists of all components, each ascending, ordered by smallest vertex.
    pub fn component_list(&self) -> Vec<Vec<Node>> {
        let mut roots: Vec<Node> = Vec::new();
        let mut groups: Vec<Vec<Node>> = Vec::new();
        for v in self.vertices() {
            let r = self.uf.find_const(v);
            match roots.iter().position(|x| *x == r) {
                Some(i) => groups[i].push(v),
                None => {
                    roots.push(r);
                    groups.push(vec![v]);
                }
            }
        }
        groups
    }

    /// Component sizes, largest first.
    pub fn component_sizes(&self) -> Vec<u32> {
        let mut sizes: Vec<u32> = self.component_list().iter().map(|c| c.len() as u32).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Largest vertex of every component, ascending.
    pub fn component_maxima(&self) -> Vec<Node> {
        let mut best: Vec<(Node, Node)> = Vec::new();
        for v in self.vertices() {
            let r = self.uf.find_const(v);
            match best.iter_mut().find(|(root, _)| *root == r) {
                Some(entry) => entry.1 = entry.1.max(v),
                None => best.push((r, v)),
            }
        }
        let mut out: Vec<Node> = best.into_iter().map(|(_, k)| k).collect();
        out.sort_unstable();
        out
    }

    /// Advances the graph from time `n` to `n + 1` using the two cycles,
    /// which must both contain node `n + 1`.
    pub fn extend_mut(&mut self, a: &EvolvingCycle, b: &EvolvingCycle) -> Result<ExtendOutcome, GraphError> {
        let m = self.n + 1;
        if a.n() < m || b.n() < m {
            return Err(GraphError::TimeMismatch { graph: self.n, cycle: a.n().min(b.n()) });
        }
        let slot = m as usize;
        self.vertex.resize(slot + 1, false);
        self.degree.resize(slot + 1, 0);
        self.past_ab.resize(slot + 1, 0);
        self.past_ba.resize(slot + 1, 0);
        self.uf.grow(slot + 1);

        if !is_vertex(a, b, m) {
            self.n = m;
            return Ok(ExtendOutcome { node: m, vertex_added: false, edges: PastEdges { vertex: m, ..PastEdges::default() }, delta_t: 0 });
        }
        let edges = past_edges(a, b, m)?;
        for e in edges.edges() {
            if !self.is_vertex(e.lo) {
                return Err(GraphError::TargetNotVertex { vertex: m, target: e.lo, tag: e.tag });
            }
        }
        let before = self.components as i32;
        self.vertex[slot] = true;
        self.vertex_count += 1;
        self.components += 1;
        let targets = edges.targets();
        for &t in &targets {
            let d = &mut self.degree[t as usize];
            *d += 1;
            self.max_degree = self.max_degree.max(*d);
            if self.uf.union(t, m) {
                self.components -= 1;
            }
        }
        self.degree[slot] = targets.len() as u8;
        self.max_degree = self.max_degree.max(targets.len() as u8);
        self.past_ab[slot] = edges.ab_count();
        self.past_ba[slot] = edges.ba_count();
        self.edges.extend(edges.edges());
        self.n = m;
        let delta_t = self.components as i32 - before;
        Ok(ExtendOutcome { node: m, vertex_added: true, edges, delta_t })
    }

    /// Functional form of [`extend_mut`](Self::extend_mut) with an explicit time check.
    pub fn extend(&self, a: &EvolvingCycle, b: &EvolvingCycle, m: Node) -> Result<Self, GraphError> {
        if m != self.n + 1 {
            return Err(GraphError::TimeMismatch { graph: self.n, cycle: m });
        }
        let mut next = self.clone();
        next.extend_mut(a, b)?;
        Ok(next)
    }

    /// The graph at an earlier time: vertices `<= upto` and the edges among them.
    pub fn induced(&self, upto: Node) -> Self {
        let mut g = PedigreeGraph::new();
        let upto = upto.min(self.n).max(3);
        let slot = upto as usize;
        g.n = upto;
        g.vertex.resize(slot + 1, false);
        g.degree.resize(slot + 1, 0);
        g.past_ab.resize(slot + 1, 0);
        g.past_ba.resize(slot + 1, 0);
        g.uf.grow(slot + 1);
        for v in self.vertices().filter(|v| *v <= upto) {
            g.vertex[v as usize] = true;
            g.vertex_count += 1;
            g.components += 1;
        }
        for e in self.edges.iter().filter(|e| e.hi <= upto) {
            g.edges.push(*e);
            if e.tag.is_ab() {
                g.past_ab[e.hi as usize] += 1;
            } else {
                g.past_ba[e.hi as usize] += 1;
            }
            if g.uf.union(e.lo, e.hi) {
                g.components -= 1;
            }
        }
        let mut seen: Vec<(Node, Node)> = g.edges.iter().map(|e| (e.lo, e.hi)).collect();
        seen.sort_unstable();
        seen.dedup();
        for (lo, hi) in seen {
            g.degree[lo as usize] += 1;
            g.degree[hi as usize] += 1;
        }
        g.max_degree = g.degree.iter().copied().max().unwrap_or(0);
        g
    }

    /// Same time, vertex set, typed edges and component count.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.n == other.n
            && self.vertices().eq(other.vertices())
            && self.edges == other.edges
            && self.components == other.components
    }
}

/// `G_n` for two cycles of equal size, folded from time 4.
pub fn build_from_cycles(a: &EvolvingCycle, b: &EvolvingCycle) -> Result<PedigreeGraph, GraphError> {
    if a.n() != b.n() {
        return Err(GraphError::SizeMismatch { a: a.n(), b: b.n() });
    }
    if a.n() < 4 {
        return Err(GraphError::TooFewNodes(a.n()));
    }
    let mut g = PedigreeGraph::new();
    while g.n() < a.n() {
        g.extend_mut(a, b)?;
    }
    Ok(g)
}

/// `G_n` for two pedigrees of equal size.
pub fn build(a: &Pedigree, b: &Pedigree) -> Result<PedigreeGraph, GraphError> {
    if a.n() != b.n() {
        return Err(GraphError::SizeMismatch { a: a.n(), b: b.n() });
    }
    build_from_cycles(&a.to_cycle(), &b.to_cycle())
}

/// Adjacency of two distinct pedigrees on the Pedigree polytope: the
/// pedigree graph is connected.
pub fn pedigree_adjacent(a: &Pedigree, b: &Pedigree) -> Result<bool, GraphError> {
    if a == b {
        return Err(GraphError::IdenticalPedigree);
    }
    Ok(build(a, b)?.is_connected())
}

/// [`pedigree_adjacent`] for already-built cycles.
pub fn cycles_adjacent(a: &EvolvingCycle, b: &EvolvingCycle) -> Result<bool, GraphError> {
    if a == b {
        return Err(GraphError::IdenticalPedigree);
    }
    Ok(build_from_cycles(a, b)?.is_connected())
}
