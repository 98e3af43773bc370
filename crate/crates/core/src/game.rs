//! The connectivity game between Alice (any strategy) and Bob (uniform).
//!
//! At time `n + 1` Alice picks an edge of `A_n` and Bob an edge of `B_n`; both
//! insert node `n + 1`, and the pedigree graph grows accordingly. The state
//! tracks the common edges `E(A_n) ∩ E(B_n)` (their count is `S`) and the
//! component count `T` of the pedigree graph.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cycle::EvolvingCycle;
use crate::error::GameError;
use crate::graph::{PastEdges, PedigreeGraph};
use crate::pair::{Node, NodePair};
use crate::strategy::Strategy;

/// Random source used for every game.
pub type GameRng = ChaCha8Rng;

/// Independent Alice and Bob generators for one game seed.
///
/// Bob uses stream 0 of `ChaCha8Rng::seed_from_u64(seed)`, Alice stream 1.
pub fn game_rngs(seed: u64) -> (GameRng, GameRng) {
    let bob = ChaCha8Rng::seed_from_u64(seed);
    let mut alice = ChaCha8Rng::seed_from_u64(seed);
    alice.set_stream(1);
    (alice, bob)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Alice inserts into a common edge.
    C,
    /// Alice inserts into an edge Bob does not have.
    D,
}

/// Alice's move measured against Bob's current cycle.
///
/// Bob's `n` edges split into: Alice's edge itself (c-moves only), common
/// edges meeting it, non-common edges meeting it, common edges disjoint from
/// it (`s_star`) and non-common edges disjoint from it (`r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveClass {
    pub kind: MoveKind,
    pub alice_pair: NodePair,
    pub s_star: u32,
    pub r: u32,
    pub common_incident: u32,
    pub noncommon_incident: u32,
}

impl MoveClass {
    pub fn is_c(&self) -> bool {
        self.kind == MoveKind::C
    }

    /// Sum of the five parts; always equals `n`.
    pub fn partition_sum(&self) -> u32 {
        u32::from(self.is_c()) + self.common_incident + self.noncommon_incident + self.s_star + self.r
    }
}

/// Everything one round changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOutcome {
    pub node: Node,
    pub alice_edge: NodePair,
    pub bob_edge: NodePair,
    pub class: MoveClass,
    pub delta_s: i32,
    pub delta_t: i32,
    pub vertex_added: bool,
    pub edges: PastEdges,
    /// `ν_A(node) ∈ E(B_{node−1})`.
    pub alice_pair_in_b: bool,
    /// `ν_B(node) ∈ E(A_{node−1})`.
    pub bob_pair_in_a: bool,
}

impl RoundOutcome {
    pub fn isolated(&self) -> bool {
        self.vertex_added && self.edges.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct GameState {
    alice: EvolvingCycle,
    bob: EvolvingCycle,
    common: BTreeSet<NodePair>,
    alice_only: BTreeSet<NodePair>,
    graph: PedigreeGraph,
    isolated_at: Vec<Node>,
}

impl Default for GameState {
    fn default() -> Self {
        Self::initial()
    }
}

impl GameState {
    /// Both players hold the triangle: `S = 3`, `T = 0`.
    pub fn initial() -> Self {
        let alice = EvolvingCycle::base();
        let common = alice.edges().collect();
        GameState {
            bob: alice.clone(),
            alice,
            common,
            alice_only: BTreeSet::new(),
            graph: PedigreeGraph::new(),
            isolated_at: Vec::new(),
        }
    }

    /// Replays two equally long insertion-pair histories from the triangle.
    pub fn from_pairs(alice: &[NodePair], bob: &[NodePair]) -> Result<Self, GameError> {
        let mut st = Self::initial();
        for (a, b) in alice.iter().zip(bob) {
            st.advance(*a, *b)?;
        }
        Ok(st)
    }

    #[inline]
    pub fn n(&self) -> Node {
        self.alice.n()
    }

    pub fn alice(&self) -> &EvolvingCycle {
        &self.alice
    }

    pub fn bob(&self) -> &EvolvingCycle {
        &self.bob
    }

    pub fn graph(&self) -> &PedigreeGraph {
        &self.graph
    }

    /// `E(A_n) ∩ E(B_n)` in canonical order.
    pub fn common(&self) -> &BTreeSet<NodePair> {
        &self.common
    }

    /// `E(A_n) \ E(B_n)` in canonical order.
    pub fn alice_only(&self) -> &BTreeSet<NodePair> {
        &self.alice_only
    }

    #[inline]
    pub fn s(&self) -> u32 {
        self.common.len() as u32
    }

    #[inline]
    pub fn t(&self) -> u32 {
        self.graph.components()
    }

    /// Times `n` at which `n` joined the graph as an isolated vertex.
    pub fn isolated_at(&self) -> &[Node] {
        &self.isolated_at
    }

    /// Isolated-vertex creations so far.
    pub fn y(&self) -> u32 {
        self.isolated_at.len() as u32
    }

    /// Canonically smallest edge of Alice's cycle.
    pub fn first_alice_edge(&self) -> NodePair {
        match (self.common.first(), self.alice_only.first()) {
            (Some(c), Some(d)) => *c.min(d),
            (Some(c), None) => *c,
            (None, Some(d)) => *d,
            (None, None) => unreachable!("a cycle has edges"),
        }
    }

    /// Recomputes the common/Alice-only partition from scratch and compares.
    pub fn verify_common(&self) -> bool {
        let mut common = BTreeSet::new();
        let mut only = BTreeSet::new();
        for e in self.alice.edges() {
            if self.bob.has_edge(e) {
                common.insert(e);
            } else {
                only.insert(e);
            }
        }
        common == self.common && only == self.alice_only
    }

    /// O(1) classification using the four Bob edges around Alice's edge.
    pub fn classify_move(&self, alice_edge: NodePair) -> Result<MoveClass, GameError> {
        if !self.alice.has_edge(alice_edge) {
            return Err(GameError::NotAliceEdge(alice_edge));
        }
        let is_c = self.bob.has_edge(alice_edge);
        let mut around: [Option<NodePair>; 4] = [None; 4];
        let mut len = 0;
        for x in [alice_edge.lo(), alice_edge.hi()] {
            for f in [self.bob.edge_after(x), self.bob.edge_after(self.bob.pred(x))] {
                if f != alice_edge && !around[..len].contains(&Some(f)) {
                    around[len] = Some(f);
                    len += 1;
                }
            }
        }
        let common_incident = around[..len].iter().flatten().filter(|f| self.alice.has_edge(**f)).count() as u32;
        let noncommon_incident = len as u32 - common_incident;
        let s = self.s();
        Ok(MoveClass {
            kind: if is_c { MoveKind::C } else { MoveKind::D },
            alice_pair: alice_edge,
            s_star: s - u32::from(is_c) - common_incident,
            r: self.n() - s - noncommon_incident,
            common_incident,
            noncommon_incident,
        })
    }

    /// Same classification by scanning every Bob edge.
    pub fn classify_by_scan(&self, alice_edge: NodePair) -> Result<MoveClass, GameError> {
        if !self.alice.has_edge(alice_edge) {
            return Err(GameError::NotAliceEdge(alice_edge));
        }
        let mut class = MoveClass {
            kind: MoveKind::D,
            alice_pair: alice_edge,
            s_star: 0,
            r: 0,
            common_incident: 0,
            noncommon_incident: 0,
        };
        for f in self.bob.edges() {
            let common = self.alice.has_edge(f);
            if f == alice_edge {
                class.kind = MoveKind::C;
            } else if f.meets(alice_edge) {
                if common {
                    class.common_incident += 1;
                } else {
                    class.noncommon_incident += 1;
                }
            } else if common {
                class.s_star += 1;
            } else {
                class.r += 1;
            }
        }
        Ok(class)
    }

    /// Plays one round in place.
    pub fn advance(&mut self, alice_edge: NodePair, bob_edge: NodePair) -> Result<RoundOutcome, GameError> {
        let class = self.classify_move(alice_edge)?;
        if !self.bob.has_edge(bob_edge) {
            return Err(GameError::NotBobEdge(bob_edge));
        }
        let alice_pair_in_b = class.is_c();
        let bob_pair_in_a = self.alice.has_edge(bob_edge);
        let s_before = self.s() as i32;

        if alice_pair_in_b {
            self.common.remove(&alice_edge);
        } else {
            self.alice_only.remove(&alice_edge);
        }
        if bob_pair_in_a && bob_edge != alice_edge {
            self.common.remove(&bob_edge);
            self.alice_only.insert(bob_edge);
        }
        let m = self.alice.insert_mut(alice_edge)?;
        self.bob.insert_mut(bob_edge)?;
        for x in [alice_edge.lo(), alice_edge.hi()] {
            let e = NodePair::new_unchecked(x, m);
            if bob_edge.contains(x) {
                self.common.insert(e);
            } else {
                self.alice_only.insert(e);
            }
        }

        let ext = self.graph.extend_mut(&self.alice, &self.bob)?;
        if ext.isolated() {
            self.isolated_at.push(m);
        }
        Ok(RoundOutcome {
            node: m,
            alice_edge,
            bob_edge,
            class,
            delta_s: self.s() as i32 - s_before,
            delta_t: ext.delta_t,
            vertex_added: ext.vertex_added,
            edges: ext.edges,
            alice_pair_in_b,
            bob_pair_in_a,
        })
    }

    /// Functional form of [`advance`](Self::advance).
    pub fn apply_round(&self, alice_edge: NodePair, bob_edge: NodePair) -> Result<(GameState, RoundOutcome), GameError> {
        let mut next = self.clone();
        let out = next.advance(alice_edge, bob_edge)?;
        Ok((next, out))
    }

    /// Distribution of `(ΔS, ΔT)` over Bob's `n` equally likely edges, obtained
    /// by playing every one of them.
    pub fn exact_transition_table(&self, alice_edge: NodePair) -> Result<TransitionTable, GameError> {
        if !self.alice.has_edge(alice_edge) {
            return Err(GameError::NotAliceEdge(alice_edge));
        }
        let mut table = TransitionTable::new(self.n());
        for bob_edge in self.bob.edges() {
            let (_, out) = self.apply_round(alice_edge, bob_edge)?;
            table.record(out.delta_s, out.delta_t);
        }
        Ok(table)
    }

    /// Checks the exact table for `alice_edge` against the transition bounds.
    pub fn check_transition_bounds(&self, alice_edge: NodePair) -> Result<TransitionReport, GameError> {
        let class = self.classify_move(alice_edge)?;
        let table = self.exact_transition_table(alice_edge)?;
        Ok(TransitionReport::evaluate(self.n(), self.t(), class, table))
    }

    /// Component maxima `k` for which some Alice edge leaves Bob no way to
    /// create vertex `n + 1` adjacent to `k`, found by playing every Alice×Bob
    /// edge pair. Empty means the attachment property holds.
    pub fn attachment_failures(&self) -> Result<Vec<(Node, NodePair)>, GameError> {
        let maxima = self.graph.component_maxima();
        let mut failures = Vec::new();
        if maxima.is_empty() {
            return Ok(failures);
        }
        for a in self.alice.edges() {
            let mut reached: BTreeSet<Node> = BTreeSet::new();
            for b in self.bob.edges() {
                let (_, out) = self.apply_round(a, b)?;
                if out.vertex_added {
                    reached.extend(out.edges.targets());
                }
            }
            for &k in &maxima {
                if !reached.contains(&k) {
                    failures.push((k, a));
                }
            }
        }
        Ok(failures)
    }

    pub fn attachment_check(&self) -> Result<bool, GameError> {
        Ok(self.attachment_failures()?.is_empty())
    }
}

/// Exact distribution of one round's `(ΔS, ΔT)`: counts over Bob's `n` edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    n: Node,
    counts: BTreeMap<(i32, i32), u32>,
}

impl TransitionTable {
    pub fn new(n: Node) -> Self {
        TransitionTable { n, counts: BTreeMap::new() }
    }

    pub fn record(&mut self, delta_s: i32, delta_t: i32) {
        *self.counts.entry((delta_s, delta_t)).or_default() += 1;
    }

    /// Common denominator of all probabilities.
    pub fn denominator(&self) -> Node {
        self.n
    }

    /// Numerator of `P(ΔS = ds, ΔT = dt)`.
    pub fn count(&self, delta_s: i32, delta_t: i32) -> u32 {
        self.counts.get(&(delta_s, delta_t)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }

    /// Non-zero cells `((ΔS, ΔT), numerator)` in ascending order.
    pub fn cells(&self) -> impl Iterator<Item = ((i32, i32), u32)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }

    pub fn count_where(&self, pred: impl Fn(i32, i32) -> bool) -> u32 {
        self.counts.iter().filter(|((s, t), _)| pred(*s, *t)).map(|(_, c)| *c).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

/// One table entry compared with its bound; both sides are numerators over `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryCheck {
    pub label: &'static str,
    pub relation: Relation,
    pub observed: i64,
    pub bound: i64,
    /// Hard assertion (`true`) or report-only (`false`).
    pub strict: bool,
}

impl EntryCheck {
    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::Eq => self.observed == self.bound,
            Relation::Le => self.observed <= self.bound,
            Relation::Ge => self.observed >= self.bound,
        }
    }
}

/// Conformance of one exact transition table with the c-move/d-move tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionReport {
    pub n: Node,
    pub t: u32,
    pub class: MoveClass,
    pub table: TransitionTable,
    pub checks: Vec<EntryCheck>,
    /// d-moves only: `R − T + 1 + common_incident`, the count the printed
    /// `P(0,0)` bound leaves out Bob's common edges around Alice's edge from.
    pub refined_dd_bound: Option<i64>,
}

const C_MOVE_CELLS: [(i32, i32); 5] = [(-2, 1), (-1, 1), (-1, 0), (0, 0), (1, 0)];
const D_MOVE_CELLS: [(i32, i32); 5] = [(-1, 0), (0, 0), (1, 0), (0, -1), (1, -1)];

impl TransitionReport {
    pub fn evaluate(n: Node, t: u32, class: MoveClass, table: TransitionTable) -> Self {
        let c = |ds, dt| i64::from(table.count(ds, dt));
        let s_star = i64::from(class.s_star);
        let r = i64::from(class.r);
        let t_i = i64::from(t);
        let check = |label, relation, observed, bound, strict| EntryCheck { label, relation, observed, bound, strict };
        let mut checks = Vec::new();
        let refined_dd_bound = if class.is_c() {
            let outside = table.count_where(|s, t| !C_MOVE_CELLS.contains(&(s, t)) && t != -1);
            checks.push(check("c: P(-2,+1) = S*/n", Relation::Eq, c(-2, 1), s_star, true));
            checks.push(check("c: P(-1,+1) <= 2/n", Relation::Le, c(-1, 1), 2, true));
            checks.push(check("c: P(-1,0) = R/n", Relation::Eq, c(-1, 0), r, true));
            checks.push(check("c: P(0,0) <= 2/n", Relation::Le, c(0, 0), 2, true));
            checks.push(check("c: P(+1,0) = 1/n", Relation::Eq, c(1, 0), 1, true));
            checks.push(check("c: P(dT=-1) = 0", Relation::Eq, i64::from(table.count_where(|_, t| t == -1)), 0, true));
            checks.push(check("c: P(other cells) = 0", Relation::Eq, i64::from(outside), 0, true));
            None
        } else {
            let outside = table.count_where(|s, t| !D_MOVE_CELLS.contains(&(s, t)) && t != 1);
            let merge = c(0, -1) + c(1, -1);
            checks.push(check("d: P(-1,0) = S*/n", Relation::Eq, c(-1, 0), s_star, true));
            checks.push(check("d: P(0,0) <= (R-T+1)/n", Relation::Le, c(0, 0), r - t_i + 1, false));
            checks.push(check("d: P(+1,0) <= 4/n", Relation::Le, c(1, 0), 4, true));
            checks.push(check("d: P(dT=-1, dS in {0,+1}) >= (T-1)/n", Relation::Ge, merge, t_i - 1, true));
            checks.push(check("d: P(dT=+1) = 0", Relation::Eq, i64::from(table.count_where(|_, t| t == 1)), 0, true));
            checks.push(check("d: P(other cells) = 0", Relation::Eq, i64::from(outside), 0, true));
            Some(r - t_i + 1 + i64::from(class.common_incident))
        };
        TransitionReport { n, t, class, table, checks, refined_dd_bound }
    }

    /// All hard assertions hold.
    pub fn strict_ok(&self) -> bool {
        self.checks.iter().filter(|c| c.strict).all(EntryCheck::holds)
    }

    pub fn strict_failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.checks.iter().filter(|c| c.strict && !c.holds())
    }

    /// Report-only entries that do not hold.
    pub fn report_only_failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.checks.iter().filter(|c| !c.strict && !c.holds())
    }
}

/// How Bob picks his edge.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum BobPolicy {
    /// Uniform over the `n` edges of `B_n`: a uniform node `u` and the edge
    /// leaving it in positive direction.
    #[default]
    Uniform,
    /// Fixed insertion pairs for nodes `4, 5, …` (replay mode).
    Scripted(Vec<NodePair>),
    /// Uniform, except that while inserting nodes `from..=to` Bob answers a
    /// c-move with a uniformly chosen other common edge, which makes the new
    /// vertex isolated. Used to enrich rare multi-component states.
    ForceIsolation { from: Node, to: Node },
}

impl BobPolicy {
    pub fn next_move(&self, state: &GameState, alice_edge: NodePair, rng: &mut GameRng) -> Result<NodePair, GameError> {
        let uniform = |rng: &mut GameRng| {
            let u = rng.gen_range(1..=state.n());
            state.bob().edge_after(u)
        };
        match self {
            BobPolicy::Uniform => Ok(uniform(rng)),
            BobPolicy::Scripted(pairs) => {
                let next = state.n() + 1;
                pairs.get((next - 4) as usize).copied().ok_or(GameError::BobScriptExhausted(next))
            }
            BobPolicy::ForceIsolation { from, to } => {
                let next = state.n() + 1;
                let others = state.common().len().saturating_sub(1);
                if (*from..=*to).contains(&next) && state.common().contains(&alice_edge) && others > 0 {
                    let pick = rng.gen_range(0..others);
                    Ok(*state.common().iter().filter(|e| **e != alice_edge).nth(pick).expect("pick < others"))
                } else {
                    Ok(uniform(rng))
                }
            }
        }
    }
}

/// Hooks called around every round; returning `false` aborts the game.
pub trait RoundObserver {
    fn before_round(&mut self, _state: &GameState, _alice_edge: NodePair, _bob_edge: NodePair) -> bool {
        true
    }

    fn after_round(&mut self, _state: &GameState, _outcome: &RoundOutcome) -> bool {
        true
    }
}

impl RoundObserver for () {}

/// A game in progress: state, both players and their random sources.
pub struct Game<'s> {
    state: GameState,
    alice: &'s mut dyn Strategy,
    bob: BobPolicy,
    alice_rng: GameRng,
    bob_rng: GameRng,
}

impl<'s> Game<'s> {
    pub fn new(alice: &'s mut dyn Strategy, bob: BobPolicy, seed: u64) -> Self {
        let (alice_rng, bob_rng) = game_rngs(seed);
        Game { state: GameState::initial(), alice, bob, alice_rng, bob_rng }
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn into_state(self) -> GameState {
        self.state
    }

    /// Plays the round that inserts node `n + 1`.
    pub fn step(&mut self, observer: &mut dyn RoundObserver) -> Result<RoundOutcome, GameError> {
        let a = self.alice.next_move(&self.state, &mut self.alice_rng)?;
        let b = self.bob.next_move(&self.state, a, &mut self.bob_rng)?;
        let node = self.state.n() + 1;
        if !observer.before_round(&self.state, a, b) {
            return Err(GameError::Aborted(node));
        }
        let out = self.state.advance(a, b)?;
        if !observer.after_round(&self.state, &out) {
            return Err(GameError::Aborted(node));
        }
        Ok(out)
    }

    /// Plays until the cycles have `n_max` nodes.
    pub fn run_to(&mut self, n_max: Node, observer: &mut dyn RoundObserver) -> Result<(), GameError> {
        while self.state.n() < n_max {
            self.step(observer)?;
        }
        Ok(())
    }
}

/// Per-time record of one game.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: u64,
    pub strategy: String,
    pub n_max: Node,
    /// `S_n` for `n = 3..=n_max`.
    pub s: Vec<u32>,
    /// `T_n` for `n = 3..=n_max`.
    pub t: Vec<u32>,
    /// Nodes Alice inserted with a d-move.
    pub dmoves: Vec<Node>,
    pub isolated_at: Vec<Node>,
    pub connected_at: Vec<(Node, bool)>,
    pub final_state: GameState,
}

impl Trajectory {
    pub fn s_at(&self, n: Node) -> Option<u32> {
        self.s.get(n.checked_sub(3)? as usize).copied()
    }

    pub fn t_at(&self, n: Node) -> Option<u32> {
        self.t.get(n.checked_sub(3)? as usize).copied()
    }
}

/// Plays one game to `n_max`, recording counters every round and
/// connectivity at each checkpoint. Deterministic in `(strategy, seed)`.
pub fn run_game(
    alice: &mut dyn Strategy,
    bob: BobPolicy,
    n_max: Node,
    seed: u64,
    checkpoints: &[Node],
) -> Result<Trajectory, GameError> {
    if n_max < 4 {
        return Err(GameError::HorizonTooShort(n_max));
    }
    let strategy = alice.name();
    let mut game = Game::new(alice, bob, seed);
    let mut traj = Trajectory {
        seed,
        strategy,
        n_max,
        s: alloc::vec![3],
        t: alloc::vec![0],
        dmoves: Vec::new(),
        isolated_at: Vec::new(),
        connected_at: Vec::new(),
        final_state: GameState::initial(),
    };
    while game.state().n() < n_max {
        let out = game.step(&mut ())?;
        let st = game.state();
        traj.s.push(st.s());
        traj.t.push(st.t());
        if !out.class.is_c() {
            traj.dmoves.push(out.node);
        }
        if out.isolated() {
            traj.isolated_at.push(out.node);
        }
        if checkpoints.contains(&out.node) {
            traj.connected_at.push((out.node, st.graph().is_connected()));
        }
    }
    traj.final_state = game.into_state();
    Ok(traj)
}
