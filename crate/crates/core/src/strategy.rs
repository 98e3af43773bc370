//! Alice's policies.
//!
//! Bob is always uniform; Alice is whatever strategy the experiment plugs in.
//! Strategies register by name in a [`StrategyRegistry`] so new adversaries
//! can be added without touching the engine.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::StrategyError;
use crate::game::{GameRng, GameState};
use crate::graph::side_targets;
use crate::pair::{Node, NodePair};
use crate::pedigree::Pedigree;

pub trait Strategy {
    /// Spec string that rebuilds this strategy from a registry.
    fn name(&self) -> String;

    /// Alice's edge of `A_n` for inserting node `n + 1`.
    fn next_move(&mut self, state: &GameState, rng: &mut GameRng) -> Result<NodePair, StrategyError>;
}

/// Alice follows a fixed cycle.
#[derive(Debug, Clone)]
pub struct Scripted {
    pairs: Vec<NodePair>,
    n: Node,
    text: String,
}

impl Scripted {
    pub fn new(pedigree: &Pedigree) -> Self {
        Scripted { pairs: pedigree.to_pairs(), n: pedigree.n(), text: pedigree.to_string() }
    }
}

impl Strategy for Scripted {
    fn name(&self) -> String {
        alloc::format!("scripted:{}", self.text)
    }

    fn next_move(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<NodePair, StrategyError> {
        let needed = state.n() + 1;
        self.pairs
            .get((needed - 4) as usize)
            .copied()
            .ok_or(StrategyError::ScriptExhausted { needed, len: self.n })
    }
}

/// Uniform over the edges of Alice's current cycle.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformRandom;

impl Strategy for UniformRandom {
    fn name(&self) -> String {
        "random".to_string()
    }

    fn next_move(&mut self, state: &GameState, rng: &mut GameRng) -> Result<NodePair, StrategyError> {
        let u = rng.gen_range(1..=state.n());
        Ok(state.alice().edge_after(u))
    }
}

/// Takes the smallest common edge whenever `S > 0`, else the smallest
/// non-common edge.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyCommon;

impl Strategy for GreedyCommon {
    fn name(&self) -> String {
        "greedy-common".to_string()
    }

    fn next_move(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<NodePair, StrategyError> {
        let e = state.common().first().or_else(|| state.alice_only().first());
        Ok(*e.expect("a cycle has edges"))
    }
}

/// Minimises the exact one-round probability that `T` drops; ties go to the
/// canonically smallest edge (or the smallest common edge with `prefer_c`).
///
/// Scores come from a [`MergeIndex`] kept in step with the game, so a move
/// costs `O(log n + T²)` instead of a scan of both cycles.
#[derive(Debug, Clone, Default)]
pub struct Isolationist {
    pub prefer_c: bool,
    index: Option<MergeIndex>,
}

impl Isolationist {
    pub fn new(prefer_c: bool) -> Self {
        Isolationist { prefer_c, index: None }
    }
}

impl Strategy for Isolationist {
    fn name(&self) -> String {
        if self.prefer_c { "isolationist:prefer-c" } else { "isolationist" }.to_string()
    }

    fn next_move(&mut self, state: &GameState, _rng: &mut GameRng) -> Result<NodePair, StrategyError> {
        if state.t() < 2 {
            // Fewer than two components: nothing can merge, every score is 0.
            return Ok(match (self.prefer_c, state.common().first()) {
                (true, Some(c)) => *c,
                _ => state.first_alice_edge(),
            });
        }
        let index = match self.index.take() {
            Some(mut ix) if ix.n + 1 == state.n() => {
                ix.advance(state);
                ix
            }
            Some(ix) if ix.n == state.n() => ix,
            _ => MergeIndex::build(state),
        };
        let best = index.best(state, self.prefer_c);
        self.index = Some(index);
        Ok(best.0)
    }
}

/// Reference scorer: the isolationist's move recomputed from [`merge_counts`].
pub fn isolationist_reference(state: &GameState, prefer_c: bool) -> (NodePair, u32) {
    merge_counts(state)
        .into_iter()
        .min_by_key(|(e, count)| (*count, !(prefer_c && state.common().contains(e)), *e))
        .expect("a cycle has edges")
}

type Targets = (Option<Node>, Option<Node>);

/// Component roots touched by a set of targets: none, one, or two distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Class {
    Free,
    Single(Node),
    Double(Node, Node),
}

fn classify(g: &crate::graph::PedigreeGraph, t: Targets) -> Class {
    let r1 = t.0.map(|v| g.component_of(v));
    let r2 = t.1.map(|v| g.component_of(v));
    match (r1, r2) {
        (None, None) => Class::Free,
        (Some(x), None) | (None, Some(x)) => Class::Single(x),
        (Some(x), Some(y)) if x == y => Class::Single(x),
        (Some(x), Some(y)) => Class::Double(x.min(y), x.max(y)),
    }
}

/// Alice's and Bob's edges grouped by the components their rule targets
/// reach, maintained round by round.
///
/// A Bob edge merges components against Alice edge `a` exactly when the
/// roots reached from both sides number two or more. Common edges never
/// reach anything, so the Bob-plays-Alice's-edge correction in
/// [`merge_counts`] never applies to the groups kept here.
#[derive(Debug, Clone)]
pub struct MergeIndex {
    n: Node,
    alice_targets: BTreeMap<NodePair, Targets>,
    bob_targets: BTreeMap<NodePair, Targets>,
    alice_free_common: BTreeSet<NodePair>,
    alice_free_other: BTreeSet<NodePair>,
    alice_single: BTreeMap<Node, BTreeSet<NodePair>>,
    alice_double: BTreeMap<(Node, Node), BTreeSet<NodePair>>,
    bob_single: BTreeMap<Node, u32>,
    bob_double: BTreeMap<(Node, Node), u32>,
}

impl MergeIndex {
    pub fn build(state: &GameState) -> Self {
        let mut ix = MergeIndex {
            n: state.n(),
            alice_targets: BTreeMap::new(),
            bob_targets: BTreeMap::new(),
            alice_free_common: BTreeSet::new(),
            alice_free_other: BTreeSet::new(),
            alice_single: BTreeMap::new(),
            alice_double: BTreeMap::new(),
            bob_single: BTreeMap::new(),
            bob_double: BTreeMap::new(),
        };
        for e in state.alice().edges() {
            ix.add_alice(state, e);
        }
        for e in state.bob().edges() {
            ix.add_bob(state, e);
        }
        ix
    }

    fn add_alice(&mut self, state: &GameState, e: NodePair) {
        let t = side_targets(e, state.bob(), state.n() + 1);
        self.alice_targets.insert(e, t);
        match classify(state.graph(), t) {
            Class::Free if state.common().contains(&e) => {
                self.alice_free_common.insert(e);
            }
            Class::Free => {
                self.alice_free_other.insert(e);
            }
            Class::Single(r) => {
                self.alice_single.entry(r).or_default().insert(e);
            }
            Class::Double(x, y) => {
                self.alice_double.entry((x, y)).or_default().insert(e);
            }
        }
    }

    fn remove_alice(&mut self, state: &GameState, e: NodePair) {
        let Some(t) = self.alice_targets.remove(&e) else { return };
        match classify(state.graph(), t) {
            Class::Free => {
                self.alice_free_common.remove(&e);
                self.alice_free_other.remove(&e);
            }
            Class::Single(r) => remove_from(&mut self.alice_single, r, e),
            Class::Double(x, y) => remove_from(&mut self.alice_double, (x, y), e),
        }
    }

    fn add_bob(&mut self, state: &GameState, e: NodePair) {
        let t = side_targets(e, state.alice(), state.n() + 1);
        self.bob_targets.insert(e, t);
        match classify(state.graph(), t) {
            Class::Free => {}
            Class::Single(r) => *self.bob_single.entry(r).or_default() += 1,
            Class::Double(x, y) => *self.bob_double.entry((x, y)).or_default() += 1,
        }
    }

    fn remove_bob(&mut self, state: &GameState, e: NodePair) {
        let Some(t) = self.bob_targets.remove(&e) else { return };
        match classify(state.graph(), t) {
            Class::Free => {}
            Class::Single(r) => decrement(&mut self.bob_single, r),
            Class::Double(x, y) => decrement(&mut self.bob_double, (x, y)),
        }
    }

    /// Re-keys every group by current component roots.
    fn canonicalize(&mut self, state: &GameState) {
        let g = state.graph();
        let root = |v: Node| g.component_of(v);
        let mut single: BTreeMap<Node, BTreeSet<NodePair>> = BTreeMap::new();
        let mut double: BTreeMap<(Node, Node), BTreeSet<NodePair>> = BTreeMap::new();
        let put_single = |single: &mut BTreeMap<Node, BTreeSet<NodePair>>, r: Node, mut set: BTreeSet<NodePair>| {
            let slot = single.entry(r).or_default();
            if slot.len() < set.len() {
                core::mem::swap(slot, &mut set);
            }
            slot.append(&mut set);
        };
        for (r, set) in core::mem::take(&mut self.alice_single) {
            put_single(&mut single, root(r), set);
        }
        for ((x, y), mut set) in core::mem::take(&mut self.alice_double) {
            let (rx, ry) = (root(x), root(y));
            if rx == ry {
                put_single(&mut single, rx, set);
            } else {
                let slot = double.entry((rx.min(ry), rx.max(ry))).or_default();
                if slot.len() < set.len() {
                    core::mem::swap(slot, &mut set);
                }
                slot.append(&mut set);
            }
        }
        self.alice_single = single;
        self.alice_double = double;

        let mut bs: BTreeMap<Node, u32> = BTreeMap::new();
        let mut bd: BTreeMap<(Node, Node), u32> = BTreeMap::new();
        for (r, c) in core::mem::take(&mut self.bob_single) {
            *bs.entry(root(r)).or_default() += c;
        }
        for ((x, y), c) in core::mem::take(&mut self.bob_double) {
            let (rx, ry) = (root(x), root(y));
            if rx == ry {
                *bs.entry(rx).or_default() += c;
            } else {
                *bd.entry((rx.min(ry), rx.max(ry))).or_default() += c;
            }
        }
        self.bob_single = bs;
        self.bob_double = bd;
    }

    /// Catches up with one round played since the last sync. Group keys are
    /// still the roots of the previous graph, so removals look edges up
    /// after re-keying.
    pub fn advance(&mut self, state: &GameState) {
        let m = state.n();
        debug_assert_eq!(self.n + 1, m);
        self.n = m;
        self.canonicalize(state);
        let a = state.alice().nu_pair(m).expect("m >= 4");
        let b = state.bob().nu_pair(m).expect("m >= 4");

        self.remove_alice(state, a);
        self.remove_alice(state, b);
        self.remove_bob(state, b);
        self.remove_bob(state, a);

        for e in [NodePair::new_unchecked(a.lo(), m), NodePair::new_unchecked(a.hi(), m)] {
            self.add_alice(state, e);
        }
        if b != a && state.alice().has_edge(b) {
            self.add_alice(state, b);
        }
        for e in [NodePair::new_unchecked(b.lo(), m), NodePair::new_unchecked(b.hi(), m)] {
            self.add_bob(state, e);
        }
        if a != b && state.bob().has_edge(a) {
            self.add_bob(state, a);
        }
        // The edge Bob subdivided may have been common with Alice.
        if self.alice_free_common.len() != state.s() as usize {
            let stale: Vec<NodePair> =
                self.alice_free_common.iter().filter(|e| !state.common().contains(e)).copied().collect();
            for e in stale {
                self.alice_free_common.remove(&e);
                self.alice_free_other.insert(e);
            }
        }
    }

    /// Best move and its merge count (numerator over `n`).
    pub fn best(&self, state: &GameState, prefer_c: bool) -> (NodePair, u32) {
        let n = state.n();
        let double: u32 = self.bob_double.values().sum();
        let single_total: u32 = self.bob_single.values().sum();
        let mut best: Option<((u32, bool, NodePair), u32)> = None;
        let mut offer = |count: u32, not_c: bool, e: NodePair| {
            let key = (count, not_c, e);
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, count));
            }
        };
        if let Some(e) = self.alice_free_common.first() {
            offer(double, !prefer_c, *e);
        }
        if let Some(e) = self.alice_free_other.first() {
            offer(double, true, *e);
        }
        for (r, set) in &self.alice_single {
            if let Some(e) = set.first() {
                let hit = self.bob_single.get(r).copied().unwrap_or(0);
                offer(double + single_total - hit, true, *e);
            }
        }
        for set in self.alice_double.values() {
            if let Some(e) = set.first() {
                offer(n, true, *e);
            }
        }
        let ((_, _, e), count) = best.expect("a cycle has edges");
        (e, count)
    }
}

fn remove_from<K: Ord + Copy>(map: &mut BTreeMap<K, BTreeSet<NodePair>>, key: K, e: NodePair) {
    if let Some(set) = map.get_mut(&key) {
        set.remove(&e);
        if set.is_empty() {
            map.remove(&key);
        }
    }
}

fn decrement<K: Ord + Copy>(map: &mut BTreeMap<K, u32>, key: K) {
    if let Some(c) = map.get_mut(&key) {
        *c -= 1;
        if *c == 0 {
            map.remove(&key);
        }
    }
}

/// For every edge `a` of Alice's cycle (in positive order), the number of
/// Bob edges whose round with `a` merges two or more components, i.e. the
/// numerator over `n` of `P(ΔT <= −1)`.
///
/// The new node's neighbours split into an Alice-driven side that depends
/// only on `a` and a Bob-driven side that depends only on Bob's edge, so one
/// pass over Bob's edges tabulates the Bob side by component and each Alice
/// edge is then scored in O(1).
pub fn merge_counts(state: &GameState) -> Vec<(NodePair, u32)> {
    let n = state.n();
    let m = n + 1;
    let g = state.graph();
    let roots = |t: (Option<Node>, Option<Node>)| -> (Option<Node>, Option<Node>) {
        let r1 = t.0.map(|v| g.component_of(v));
        let r2 = t.1.map(|v| g.component_of(v));
        match (r1, r2) {
            (Some(x), Some(y)) if x == y => (Some(x), None),
            (None, Some(y)) => (Some(y), None),
            other => other,
        }
    };

    let mut single = vec![0u32; m as usize + 1];
    let mut single_total = 0u32;
    let mut double = 0u32;
    for e in state.bob().edges() {
        match roots(side_targets(e, state.alice(), m)) {
            (Some(_), Some(_)) => double += 1,
            (Some(r), None) => {
                single[r as usize] += 1;
                single_total += 1;
            }
            _ => {}
        }
    }

    state
        .alice()
        .edges()
        .map(|a| {
            let side_a = roots(side_targets(a, state.bob(), m));
            let mut count = match side_a {
                (None, _) => double,
                (Some(c), None) => double + single_total - single[c as usize],
                (Some(_), Some(_)) => n,
            };
            if state.bob().has_edge(a) {
                // Bob playing Alice's own edge creates no vertex.
                let side_b = roots(side_targets(a, state.alice(), m));
                if merges(side_a, side_b) {
                    count -= 1;
                }
            }
            (a, count)
        })
        .collect()
}

fn merges(a: (Option<Node>, Option<Node>), b: (Option<Node>, Option<Node>)) -> bool {
    let mut seen: [Option<Node>; 4] = [None; 4];
    let mut len = 0;
    for r in [a.0, a.1, b.0, b.1].into_iter().flatten() {
        if !seen[..len].contains(&Some(r)) {
            seen[len] = Some(r);
            len += 1;
        }
    }
    len >= 2
}

pub type Constructor = fn(Option<&str>) -> Result<Box<dyn Strategy>, StrategyError>;

/// Named strategy constructors. Spec strings have the form `name[:param]`.
#[derive(Clone)]
pub struct StrategyRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry { entries: BTreeMap::new() };
        r.register("scripted", |param| {
            let text = param.ok_or_else(|| StrategyError::BadParameter("scripted needs a pedigree string".to_string()))?;
            let ped: Pedigree = text.parse().map_err(|e: crate::error::CycleError| StrategyError::BadParameter(e.to_string()))?;
            Ok(Box::new(Scripted::new(&ped)))
        });
        r.register("random", |param| no_param("random", param).map(|_| Box::new(UniformRandom) as Box<dyn Strategy>));
        r.register("greedy-common", |param| {
            no_param("greedy-common", param).map(|_| Box::new(GreedyCommon) as Box<dyn Strategy>)
        });
        r.register("isolationist", |param| match param {
            None => Ok(Box::new(Isolationist::new(false))),
            Some("prefer-c") => Ok(Box::new(Isolationist::new(true))),
            Some(other) => Err(StrategyError::BadParameter(alloc::format!("isolationist: unknown option `{other}`"))),
        });
        r
    }
}

fn no_param(name: &str, param: Option<&str>) -> Result<(), StrategyError> {
    match param {
        None => Ok(()),
        Some(p) => Err(StrategyError::BadParameter(alloc::format!("{name} takes no parameter, got `{p}`"))),
    }
}

impl StrategyRegistry {
    pub fn register(&mut self, name: &str, ctor: Constructor) {
        self.entries.insert(name.to_string(), ctor);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Builds a strategy from `name` or `name:param`.
    pub fn build(&self, spec: &str) -> Result<Box<dyn Strategy>, StrategyError> {
        let (name, param) = match spec.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        };
        let ctor = self.entries.get(name).ok_or_else(|| StrategyError::Unknown(name.to_string()))?;
        ctor(param)
    }
}
