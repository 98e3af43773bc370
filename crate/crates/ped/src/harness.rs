//! Monte Carlo campaigns, the skeleton census and the statistical
//! experiments, all deterministic in their master seed.
//!
//! Game `i` of a campaign with master seed `s` is seeded with
//! [`game_seed`]`(s, i)`: a SplitMix64 finaliser applied to
//! `s + (i + 1)·0x9E3779B97F4A7C15`. Within a game Bob draws from ChaCha8
//! stream 0 and Alice from stream 1. Every aggregate is made of integer
//! counters and maxima, so merging is associative and commutative and the
//! worker count cannot change any output.

use std::collections::BTreeMap;

use pedigree_core::game::{BobPolicy, Game, GameState, RoundObserver, RoundOutcome};
use pedigree_core::graph::cycles_adjacent;
use pedigree_core::{EvolvingCycle, GameError, GraphError, Node, NodePair, Pedigree, StrategyRegistry};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::PedError;
use crate::stats;

pub const CSV_HEADER: &str = "strategy,n,samples,connected_freq,mean_Y,max_degree_seen,mean_T,p2_components";

/// Largest simple degree any vertex may reach.
pub const MAX_DEGREE: u8 = 6;

pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn game_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Uniform `[0, 1)` draw fixed by `(seed, round, salt)`; used to pick which
/// rounds get the expensive checks without touching the game's streams.
fn sample_unit(seed: u64, round: Node, salt: u64) -> f64 {
    let h = splitmix64(seed ^ splitmix64(u64::from(round) ^ (salt << 32)));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

pub fn pool(workers: usize) -> Result<rayon::ThreadPool, PedError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PedError::Domain(format!("thread pool: {e}")))
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Which per-round checks a [`Checker`] runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckPlan {
    pub degree_checks: bool,
    pub transition_rate: f64,
    pub transition_max_n: Node,
    pub attachment_rate: f64,
    pub attachment_max_n: Node,
    pub common_check_rate: f64,
}

impl CheckPlan {
    pub fn light() -> Self {
        CheckPlan {
            degree_checks: true,
            transition_rate: 0.0,
            transition_max_n: 0,
            attachment_rate: 0.0,
            attachment_max_n: 0,
            common_check_rate: 0.0,
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        CheckPlan {
            degree_checks: cfg.degree_checks,
            transition_rate: cfg.transition_rate,
            transition_max_n: cfg.transition_max_n,
            attachment_rate: cfg.attachment_rate,
            attachment_max_n: cfg.attachment_max_n,
            common_check_rate: cfg.common_check_rate,
        }
    }
}

/// Counters a checker accumulates over the rounds it watched.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCounters {
    pub rounds: u64,
    pub max_degree: u8,
    pub max_past_ab: u8,
    pub max_past_ba: u8,
    /// Typed edges (parallel tags counted separately) at one vertex, past and
    /// future together. Reported, never asserted.
    pub max_typed_total: u16,
    pub transition_checks: u64,
    pub printed_bound_failures: u64,
    pub attachment_checks: u64,
    pub common_checks: u64,
}

impl CheckCounters {
    pub fn merge(&mut self, o: &CheckCounters) {
        self.rounds += o.rounds;
        self.max_degree = self.max_degree.max(o.max_degree);
        self.max_past_ab = self.max_past_ab.max(o.max_past_ab);
        self.max_past_ba = self.max_past_ba.max(o.max_past_ba);
        self.max_typed_total = self.max_typed_total.max(o.max_typed_total);
        self.transition_checks += o.transition_checks;
        self.printed_bound_failures += o.printed_bound_failures;
        self.attachment_checks += o.attachment_checks;
        self.common_checks += o.common_checks;
    }
}

/// Round observer enforcing the structural invariants of the game.
pub struct Checker {
    plan: CheckPlan,
    seed: u64,
    typed: Vec<u16>,
    pub counters: CheckCounters,
    pub violation: Option<String>,
}

impl Checker {
    pub fn new(plan: CheckPlan, seed: u64) -> Self {
        Checker { plan, seed, typed: vec![0; 4], counters: CheckCounters::default(), violation: None }
    }

    fn fail(&mut self, msg: String) -> bool {
        self.violation = Some(msg);
        false
    }
}

impl RoundObserver for Checker {
    fn before_round(&mut self, st: &GameState, a: NodePair, _b: NodePair) -> bool {
        let n = st.n();
        if n <= self.plan.transition_max_n && sample_unit(self.seed, n, 1) < self.plan.transition_rate {
            match st.check_transition_bounds(a) {
                Ok(r) => {
                    self.counters.transition_checks += 1;
                    self.counters.printed_bound_failures += r.report_only_failures().count() as u64;
                    if let Some(c) = r.strict_failures().next() {
                        let msg = format!("transition entry `{}`: observed {} vs bound {}", c.label, c.observed, c.bound);
                        return self.fail(msg);
                    }
                }
                Err(e) => return self.fail(format!("transition table: {e}")),
            }
        }
        if n <= self.plan.attachment_max_n && sample_unit(self.seed, n, 2) < self.plan.attachment_rate {
            self.counters.attachment_checks += 1;
            match st.attachment_failures() {
                Ok(f) if f.is_empty() => {}
                Ok(f) => return self.fail(format!("component maximum {} unreachable against Alice edge {}", f[0].0, f[0].1)),
                Err(e) => return self.fail(format!("attachment enumeration: {e}")),
            }
        }
        if sample_unit(self.seed, n, 3) < self.plan.common_check_rate {
            self.counters.common_checks += 1;
            if !st.verify_common() {
                return self.fail("incremental common-edge set diverged from recomputation".into());
            }
        }
        true
    }

    fn after_round(&mut self, st: &GameState, out: &RoundOutcome) -> bool {
        self.counters.rounds += 1;
        let m = out.node;
        let n_before = m - 1;
        let c = &out.class;
        if c.partition_sum() != n_before {
            return self.fail(format!("edge partition sums to {} instead of {n_before}", c.partition_sum()));
        }
        if out.delta_s.abs() > 2 || (out.delta_s == -2 && !c.is_c()) {
            return self.fail(format!("dS = {} on a {:?}-move", out.delta_s, c.kind));
        }
        if !(-1..=1).contains(&out.delta_t) {
            return self.fail(format!("dT = {}", out.delta_t));
        }
        if (c.is_c() && out.delta_t == -1) || (!c.is_c() && out.delta_t == 1) {
            return self.fail(format!("dT = {} on a {:?}-move", out.delta_t, c.kind));
        }
        let predicted = out.alice_pair_in_b && out.bob_pair_in_a && out.alice_edge != out.bob_edge;
        if out.isolated() != predicted {
            return self.fail(format!("isolation {} but edge-membership test says {predicted}", out.isolated()));
        }
        if (out.delta_t == 1) != out.isolated() {
            return self.fail("dT = +1 without an isolated vertex or vice versa".into());
        }
        if st.t() > st.y() {
            return self.fail(format!("T = {} exceeds Y = {}", st.t(), st.y()));
        }
        if out.vertex_added {
            let (ab, ba) = (out.edges.ab_count(), out.edges.ba_count());
            let want_ab = u8::from(!out.alice_pair_in_b);
            let want_ba = u8::from(!out.bob_pair_in_a);
            if ab != want_ab || ba != want_ba {
                return self.fail(format!("one-sided attachment: AB {ab} (want {want_ab}), BA {ba} (want {want_ba})"));
            }
            self.counters.max_past_ab = self.counters.max_past_ab.max(ab);
            self.counters.max_past_ba = self.counters.max_past_ba.max(ba);
            if self.plan.degree_checks && (ab > 1 || ba > 1) {
                return self.fail(format!("typed past-degree ({ab}, {ba}) at vertex {m}"));
            }
            if self.typed.len() <= m as usize {
                self.typed.resize(m as usize + 1, 0);
            }
            for e in out.edges.edges() {
                self.typed[e.lo as usize] += 1;
                self.typed[e.hi as usize] += 1;
                let t = self.typed[e.lo as usize].max(self.typed[e.hi as usize]);
                self.counters.max_typed_total = self.counters.max_typed_total.max(t);
            }
        }
        let d = st.graph().max_degree();
        self.counters.max_degree = self.counters.max_degree.max(d);
        if self.plan.degree_checks && d > MAX_DEGREE {
            let v = st.graph().vertices().find(|&v| st.graph().degree(v) == d).unwrap_or(0);
            return self.fail(format!(
                "vertex {v} has degree {d}; alice {:?}; bob {:?}",
                st.alice().pedigree().to_string(),
                st.bob().pedigree().to_string()
            ));
        }
        true
    }
}

/// Turns an aborted or failed step into a replayable error.
fn step_error(e: GameError, checker: &Checker, seed: u64, game: u64, round: Node) -> PedError {
    match e {
        GameError::Aborted(node) => PedError::Assertion {
            seed,
            game,
            round: node,
            message: checker.violation.clone().unwrap_or_else(|| "aborted".into()),
        },
        GameError::Graph(g @ GraphError::TargetNotVertex { .. }) => {
            PedError::Assertion { seed, game, round, message: g.to_string() }
        }
        other => PedError::Game(other),
    }
}

/// Per-`n` statistics of a campaign.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetStats {
    pub samples: u64,
    pub connected: u64,
    pub sum_y: u64,
    pub max_y: u32,
    pub sum_t: u64,
    pub t_histogram: BTreeMap<u32, u64>,
    pub two_components: u64,
}

impl TargetStats {
    pub fn merge(&mut self, o: &TargetStats) {
        self.samples += o.samples;
        self.connected += o.connected;
        self.sum_y += o.sum_y;
        self.max_y = self.max_y.max(o.max_y);
        self.sum_t += o.sum_t;
        for (t, c) in &o.t_histogram {
            *self.t_histogram.entry(*t).or_default() += c;
        }
        self.two_components += o.two_components;
    }

    pub fn connected_freq(&self) -> f64 {
        self.connected as f64 / self.samples.max(1) as f64
    }

    pub fn connected_ci(&self, level: f64) -> (f64, f64) {
        stats::wilson(self.connected, self.samples, level)
    }

    pub fn mean_y(&self) -> f64 {
        self.sum_y as f64 / self.samples.max(1) as f64
    }

    pub fn mean_t(&self) -> f64 {
        self.sum_t as f64 / self.samples.max(1) as f64
    }

    pub fn disconnected(&self) -> u64 {
        self.samples - self.connected
    }

    /// Fraction of all games ending with exactly two components.
    pub fn p2_components(&self) -> f64 {
        self.two_components as f64 / self.samples.max(1) as f64
    }
}

/// Result of [`monte_carlo`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub strategy: String,
    pub horizon: Node,
    pub tail_from: Option<Node>,
    pub targets: BTreeMap<Node, TargetStats>,
    /// Games with an isolated vertex created at time `>= tail_from`.
    pub late_isolation_games: u64,
    pub sum_y_horizon: u64,
    pub checks: CheckCounters,
}

impl AggregateStats {
    pub fn empty(cfg: &ExperimentConfig) -> Self {
        AggregateStats {
            strategy: cfg.strategy.clone(),
            horizon: cfg.horizon(),
            tail_from: cfg.tail_from,
            targets: cfg.n_targets.iter().map(|&n| (n, TargetStats::default())).collect(),
            ..Default::default()
        }
    }

    pub fn merge(&mut self, o: &AggregateStats) {
        for (n, s) in &o.targets {
            self.targets.entry(*n).or_default().merge(s);
        }
        self.late_isolation_games += o.late_isolation_games;
        self.sum_y_horizon += o.sum_y_horizon;
        self.checks.merge(&o.checks);
    }

    pub fn samples(&self) -> u64 {
        self.targets.values().map(|t| t.samples).max().unwrap_or(0)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.targets
            .iter()
            .map(|(n, s)| {
                format!(
                    "{},{},{},{:.6},{:.6},{},{:.6},{:.6}",
                    self.strategy,
                    n,
                    s.samples,
                    s.connected_freq(),
                    s.mean_y(),
                    self.checks.max_degree,
                    s.mean_t(),
                    s.p2_components()
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in self.csv_rows() {
            out.push_str(&r);
            out.push('\n');
        }
        out
    }
}

/// Plays game `index` of a campaign and folds it into fresh statistics.
pub fn play_one(cfg: &ExperimentConfig, registry: &StrategyRegistry, index: u64) -> Result<AggregateStats, PedError> {
    let seed = game_seed(cfg.seed, index);
    let mut alice = registry.build(&cfg.strategy)?;
    let mut checker = Checker::new(CheckPlan::from_config(cfg), seed);
    let mut game = Game::new(alice.as_mut(), BobPolicy::Uniform, seed);
    let horizon = cfg.horizon();
    let mut agg = AggregateStats::empty(cfg);
    let mut late = false;
    while game.state().n() < horizon {
        let round = game.state().n() + 1;
        let out = game.step(&mut checker).map_err(|e| step_error(e, &checker, cfg.seed, index, round))?;
        if out.isolated() && cfg.tail_from.is_some_and(|t| out.node >= t) {
            late = true;
        }
        let st = game.state();
        if let Some(ts) = agg.targets.get_mut(&st.n()) {
            let t = st.t();
            ts.samples = 1;
            ts.connected = u64::from(st.graph().is_connected());
            ts.sum_y = u64::from(st.y());
            ts.max_y = st.y();
            ts.sum_t = u64::from(t);
            ts.t_histogram.insert(t, 1);
            ts.two_components = u64::from(t == 2);
        }
    }
    agg.late_isolation_games = u64::from(late);
    agg.sum_y_horizon = u64::from(game.state().y());
    agg.checks = checker.counters;
    Ok(agg)
}

type Indexed<T> = Result<T, (u64, PedError)>;

/// Keeps the error of the lowest game index so failures are reproducible
/// regardless of scheduling.
fn combine<T>(a: Indexed<T>, b: Indexed<T>, merge: impl FnOnce(&mut T, &T)) -> Indexed<T> {
    match (a, b) {
        (Ok(mut x), Ok(y)) => {
            merge(&mut x, &y);
            Ok(x)
        }
        (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
        (Err(e), Err(f)) => Err(if e.0 <= f.0 { e } else { f }),
    }
}

/// Runs `cfg.samples` games on `workers` threads.
pub fn monte_carlo(cfg: &ExperimentConfig, workers: usize) -> Result<AggregateStats, PedError> {
    cfg.validate()?;
    let registry = StrategyRegistry::default();
    registry.build(&cfg.strategy)?;
    let empty = AggregateStats::empty(cfg);
    let result = pool(workers)?.install(|| {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| play_one(cfg, &registry, i).map_err(|e| (i, e)))
            .fold(|| Ok(empty.clone()), |acc, r| combine(acc, r, AggregateStats::merge))
            .reduce(|| Ok(empty.clone()), |a, b| combine(a, b, AggregateStats::merge))
    });
    result.map_err(|(_, e)| e)
}

/// Pedigree-graph skeleton statistics over all pairs of pedigrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: Node,
    pub vertices: usize,
    pub pairs: u64,
    pub adjacent_pairs: u64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub min_degree_fraction: f64,
    pub complete: bool,
    /// Degree of each pedigree in enumeration order.
    #[serde(skip)]
    pub degrees: Vec<usize>,
}

pub const CENSUS_RANGE: std::ops::RangeInclusive<Node> = 4..=8;

pub fn census(n: Node, workers: usize) -> Result<CensusReport, PedError> {
    if !CENSUS_RANGE.contains(&n) {
        return Err(PedError::Domain(format!("census needs 4 <= n <= 8, got {n}")));
    }
    let cycles: Vec<EvolvingCycle> = Pedigree::enumerate(n)?.map(|p| p.to_cycle()).collect();
    let v = cycles.len();
    let rows: Vec<Vec<usize>> = pool(workers)?.install(|| {
        (0..v)
            .into_par_iter()
            .map(|i| {
                (i + 1..v)
                    .filter(|&j| cycles_adjacent(&cycles[i], &cycles[j]).expect("distinct pedigrees of equal size"))
                    .collect()
            })
            .collect()
    });
    let mut degrees = vec![0usize; v];
    let mut adjacent = 0u64;
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            degrees[i] += 1;
            degrees[j] += 1;
            adjacent += 1;
        }
    }
    let mut hist = BTreeMap::new();
    for &d in &degrees {
        *hist.entry(d).or_default() += 1;
    }
    let min = degrees.iter().copied().min().unwrap_or(0);
    let max = degrees.iter().copied().max().unwrap_or(0);
    let pairs = (v * (v - 1) / 2) as u64;
    Ok(CensusReport {
        n,
        vertices: v,
        pairs,
        adjacent_pairs: adjacent,
        min_degree: min,
        max_degree: max,
        degree_histogram: hist,
        min_degree_fraction: min as f64 / (v - 1) as f64,
        complete: adjacent == pairs,
        degrees,
    })
}

/// `ln² n`.
pub fn ln_squared(n: Node) -> f64 {
    f64::from(n).ln().powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmoveReport {
    pub strategy: String,
    pub n0: Node,
    pub games: u64,
    pub seed: u64,
    /// Games with `S_{n0} <= ln² n0`.
    pub qualifying: u64,
    /// Qualifying games with fewer than `n0 / 3` d-moves at times `n0+1..=2n0`.
    pub failures: u64,
    pub threshold: u32,
    pub s_bound: f64,
    pub min_dmoves: Option<u32>,
    pub mean_dmoves: f64,
    pub checks: CheckCounters,
}

#[derive(Debug, Clone, Default)]
struct DmoveTally {
    qualifying: u64,
    failures: u64,
    min: Option<u32>,
    sum: u64,
    checks: CheckCounters,
}

impl DmoveTally {
    fn merge(&mut self, o: &DmoveTally) {
        self.qualifying += o.qualifying;
        self.failures += o.failures;
        self.min = match (self.min, o.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.sum += o.sum;
        self.checks.merge(&o.checks);
    }
}

/// Counts d-moves in `(n0, 2n0]` among games with few common edges at `n0`.
pub fn dmove_experiment(strategy: &str, n0: Node, games: u64, seed: u64, workers: usize) -> Result<DmoveReport, PedError> {
    if n0 < 4 {
        return Err(PedError::Domain("n0 must be >= 4".into()));
    }
    let registry = StrategyRegistry::default();
    registry.build(strategy)?;
    let threshold = n0 / 3;
    let s_bound = ln_squared(n0);
    let one = |i: u64| -> Result<DmoveTally, PedError> {
        let gs = game_seed(seed, i);
        let mut alice = registry.build(strategy)?;
        let mut checker = Checker::new(CheckPlan::light(), gs);
        let mut game = Game::new(alice.as_mut(), BobPolicy::Uniform, gs);
        let mut tally = DmoveTally::default();
        let mut qualifies = false;
        let mut dmoves = 0u32;
        while game.state().n() < 2 * n0 {
            let round = game.state().n() + 1;
            let out = game.step(&mut checker).map_err(|e| step_error(e, &checker, seed, i, round))?;
            if out.node == n0 {
                qualifies = f64::from(game.state().s()) <= s_bound;
            }
            if out.node > n0 && !out.class.is_c() {
                dmoves += 1;
            }
        }
        if qualifies {
            tally.qualifying = 1;
            tally.failures = u64::from(dmoves < threshold);
            tally.min = Some(dmoves);
            tally.sum = u64::from(dmoves);
        }
        tally.checks = checker.counters;
        Ok(tally)
    };
    let tally = pool(workers)?
        .install(|| {
            (0..games)
                .into_par_iter()
                .map(|i| one(i).map_err(|e| (i, e)))
                .fold(|| Ok(DmoveTally::default()), |a, r| combine(a, r, DmoveTally::merge))
                .reduce(|| Ok(DmoveTally::default()), |a, b| combine(a, b, DmoveTally::merge))
        })
        .map_err(|(_, e)| e)?;
    Ok(DmoveReport {
        strategy: strategy.to_string(),
        n0,
        games,
        seed,
        qualifying: tally.qualifying,
        failures: tally.failures,
        threshold,
        s_bound,
        min_dmoves: tally.min,
        mean_dmoves: tally.sum as f64 / tally.qualifying.max(1) as f64,
        checks: tally.checks,
    })
}

/// One population of the T-decrease experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub games: u64,
    /// Games with `T_{n0} >= 2` and `S_{n0} <= ln² n0`.
    pub qualifying: u64,
    /// Qualifying games where `T` drops at some time in `(n0 + 1, 2n0 + 1]`.
    pub decreased: u64,
    pub frequency: Option<f64>,
    /// `1/7 − 3σ` with `σ` the binomial standard error at `1/7`.
    pub lower_bound: Option<f64>,
    pub passes: Option<bool>,
}

impl Population {
    fn finish(&mut self) {
        if self.qualifying == 0 {
            return;
        }
        let f = self.decreased as f64 / self.qualifying as f64;
        let p0 = 1.0 / 7.0;
        let lb = p0 - 3.0 * stats::proportion_se(p0, self.qualifying);
        self.frequency = Some(f);
        self.lower_bound = Some(lb);
        self.passes = Some(f >= lb);
    }

    fn merge(&mut self, o: &Population) {
        self.games += o.games;
        self.qualifying += o.qualifying;
        self.decreased += o.decreased;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TDecreaseReport {
    pub strategy: String,
    pub n0: Node,
    pub seed: u64,
    pub natural: Population,
    /// Games where Bob forced isolations while inserting `enrich_from..=n0`.
    pub enriched: Population,
    pub enrich_from: Node,
    pub checks: CheckCounters,
}

impl TDecreaseReport {
    /// No population with qualifying games falls below its bound.
    pub fn passes(&self) -> bool {
        self.natural.passes != Some(false) && self.enriched.passes != Some(false)
    }
}

/// Frequency of a component merge in `(n0, 2n0]` given `T_{n0} >= 2` and
/// few common edges, for natural games and for games with forced early
/// isolations.
pub fn t_decrease_experiment(
    strategy: &str,
    n0: Node,
    games: u64,
    enriched_games: u64,
    enrich_from: Node,
    seed: u64,
    workers: usize,
) -> Result<TDecreaseReport, PedError> {
    if n0 < 4 {
        return Err(PedError::Domain("n0 must be >= 4".into()));
    }
    let registry = StrategyRegistry::default();
    registry.build(strategy)?;
    let s_bound = ln_squared(n0);
    let one = |i: u64, bob: BobPolicy, salt: u64| -> Result<(Population, CheckCounters), PedError> {
        let gs = game_seed(seed ^ salt, i);
        let mut alice = registry.build(strategy)?;
        let mut checker = Checker::new(CheckPlan::light(), gs);
        let mut game = Game::new(alice.as_mut(), bob, gs);
        let mut qualifies = false;
        let mut decreased = false;
        while game.state().n() < 2 * n0 + 1 {
            let round = game.state().n() + 1;
            let out = game.step(&mut checker).map_err(|e| step_error(e, &checker, seed, i, round))?;
            let st = game.state();
            if out.node == n0 {
                qualifies = st.t() >= 2 && f64::from(st.s()) <= s_bound;
                if !qualifies {
                    break;
                }
            }
            if out.node > n0 + 1 && out.delta_t < 0 {
                decreased = true;
                break;
            }
        }
        let pop = Population {
            games: 1,
            qualifying: u64::from(qualifies),
            decreased: u64::from(qualifies && decreased),
            ..Default::default()
        };
        Ok((pop, checker.counters))
    };
    let run = |count: u64, bob: BobPolicy, salt: u64| -> Result<(Population, CheckCounters), PedError> {
        let merge = |a: &mut (Population, CheckCounters), b: &(Population, CheckCounters)| {
            a.0.merge(&b.0);
            a.1.merge(&b.1);
        };
        pool(workers)?
            .install(|| {
                (0..count)
                    .into_par_iter()
                    .map(|i| one(i, bob.clone(), salt).map_err(|e| (i, e)))
                    .fold(|| Ok(Default::default()), |a, r| combine(a, r, merge))
                    .reduce(|| Ok(Default::default()), |a, b| combine(a, b, merge))
            })
            .map_err(|(_, e)| e)
    };
    let (mut natural, mut checks) = run(games, BobPolicy::Uniform, 0)?;
    let (mut enriched, c2) = run(enriched_games, BobPolicy::ForceIsolation { from: enrich_from, to: n0 }, 0xE1)?;
    checks.merge(&c2);
    natural.finish();
    enriched.finish();
    Ok(TDecreaseReport { strategy: strategy.to_string(), n0, seed, natural, enriched, enrich_from, checks })
}

/// Transition-bound conformance over states reached by play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionConformance {
    pub instances: u64,
    pub c_moves: u64,
    pub d_moves: u64,
    pub n_max: Node,
    pub seed: u64,
    /// Strict entries that failed, with the instance that broke them.
    pub strict_failures: Vec<String>,
    /// Instances where the printed d-move `P(0,0)` bound fails.
    pub printed_bound_failures: u64,
    /// Instances where even the refined count `R − T + 1 + common_incident` fails.
    pub refined_bound_failures: u64,
    pub documented_counterexample: CounterexampleEntry,
    /// Whether play reached the documented counterexample instance itself.
    pub counterexample_reached: bool,
    pub checks: CheckCounters,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleEntry {
    pub alice: String,
    pub bob: String,
    pub alice_edge: String,
    pub n: Node,
    pub observed: i64,
    pub printed_bound: i64,
    pub refined_bound: i64,
}

impl TransitionConformance {
    pub fn strict_ok(&self) -> bool {
        self.strict_failures.is_empty()
    }
}

fn counterexample_state() -> (GameState, NodePair) {
    let p = |a, b| NodePair::new(a, b).expect("distinct");
    (GameState::from_pairs(&[p(1, 2)], &[p(1, 3)]).expect("legal moves"), p(2, 4))
}

fn dd_entry(st: &GameState, a: NodePair) -> Result<Option<(i64, i64, i64)>, PedError> {
    let r = st.check_transition_bounds(a)?;
    Ok(r.checks.iter().find(|c| !c.strict).map(|c| (c.observed, c.bound, r.refined_dd_bound.unwrap_or(c.bound))))
}

/// Checks the exact table of every common edge and of the edge Alice plays,
/// at every state of `games` games of uniform play up to `n_max`, rotating
/// Alice through the registered adaptive strategies.
pub fn transition_conformance(games: u64, n_max: Node, seed: u64, workers: usize) -> Result<TransitionConformance, PedError> {
    #[derive(Default)]
    struct Tally {
        instances: u64,
        c: u64,
        d: u64,
        strict: Vec<String>,
        printed: u64,
        refined: u64,
        reached: bool,
        checks: CheckCounters,
    }
    let (cx_state, cx_edge) = counterexample_state();
    let strategies = ["random", "greedy-common", "isolationist", "random"];
    let registry = StrategyRegistry::default();
    let one = |i: u64| -> Result<Tally, PedError> {
        let gs = game_seed(seed, i);
        let mut alice = registry.build(strategies[(i % 4) as usize])?;
        let mut checker = Checker::new(CheckPlan::light(), gs);
        let mut game = Game::new(alice.as_mut(), BobPolicy::Uniform, gs);
        let mut t = Tally::default();
        let mut uniform_rng = pedigree_core::game::game_rngs(gs ^ 0x5EED).0;
        while game.state().n() < n_max {
            let st = game.state().clone();
            let mut edges: Vec<NodePair> = st.common().iter().copied().collect();
            let pick = pedigree_core::strategy::UniformRandom;
            let played = pedigree_core::Strategy::next_move(&mut { pick }, &st, &mut uniform_rng)?;
            if !edges.contains(&played) {
                edges.push(played);
            }
            for a in edges {
                let r = st.check_transition_bounds(a)?;
                t.instances += 1;
                if r.class.is_c() {
                    t.c += 1;
                } else {
                    t.d += 1;
                    if let Some(c) = r.checks.iter().find(|c| !c.strict) {
                        if !c.holds() {
                            t.printed += 1;
                        }
                        if c.observed > r.refined_dd_bound.unwrap_or(i64::MAX) {
                            t.refined += 1;
                        }
                    }
                }
                for f in r.strict_failures() {
                    t.strict.push(format!(
                        "game {i} seed {gs} n {} alice-edge {a}: `{}` observed {} bound {}",
                        st.n(),
                        f.label,
                        f.observed,
                        f.bound
                    ));
                }
                if st.n() == cx_state.n() && a == cx_edge && st.alice() == cx_state.alice() && st.bob() == cx_state.bob() {
                    t.reached = true;
                }
            }
            let round = st.n() + 1;
            game.step(&mut checker).map_err(|e| step_error(e, &checker, seed, i, round))?;
        }
        t.checks = checker.counters;
        Ok(t)
    };
    let merge = |a: &mut Tally, b: &Tally| {
        a.instances += b.instances;
        a.c += b.c;
        a.d += b.d;
        a.strict.extend(b.strict.iter().cloned());
        a.printed += b.printed;
        a.refined += b.refined;
        a.reached |= b.reached;
        a.checks.merge(&b.checks);
    };
    // Collected in index order so the failure list is schedule independent.
    let per_game: Vec<Indexed<Tally>> =
        pool(workers)?.install(|| (0..games).into_par_iter().map(|i| one(i).map_err(|e| (i, e))).collect());
    let mut total = Tally::default();
    for r in per_game {
        match r {
            Ok(t) => merge(&mut total, &t),
            Err((_, e)) => return Err(e),
        }
    }
    let (observed, printed, refined) = dd_entry(&cx_state, cx_edge)?.expect("d-move instance");
    Ok(TransitionConformance {
        instances: total.instances,
        c_moves: total.c,
        d_moves: total.d,
        n_max,
        seed,
        strict_failures: total.strict,
        printed_bound_failures: total.printed,
        refined_bound_failures: total.refined,
        documented_counterexample: CounterexampleEntry {
            alice: cx_state.alice().pedigree().to_string(),
            bob: cx_state.bob().pedigree().to_string(),
            alice_edge: cx_edge.to_string(),
            n: cx_state.n(),
            observed,
            printed_bound: printed,
            refined_bound: refined,
        },
        counterexample_reached: total.reached,
        checks: total.checks,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachmentReport {
    pub states: u64,
    pub n_max: Node,
    pub seed: u64,
    pub with_components: u64,
    pub failures: Vec<String>,
}

/// Runs the full Alice×Bob attachment enumeration on `states` states reached
/// by uniform play to a uniformly drawn time in `4..=n_max`.
pub fn attachment_conformance(states: u64, n_max: Node, seed: u64, workers: usize) -> Result<AttachmentReport, PedError> {
    let registry = StrategyRegistry::default();
    let strategies = ["random", "isolationist", "greedy-common", "random"];
    let one = |i: u64| -> Result<(bool, Option<String>), PedError> {
        let gs = game_seed(seed, i);
        let stop = 4 + (splitmix64(gs) % u64::from(n_max - 3)) as Node;
        let mut alice = registry.build(strategies[(i % 4) as usize])?;
        let mut checker = Checker::new(CheckPlan::light(), gs);
        let mut game = Game::new(alice.as_mut(), BobPolicy::Uniform, gs);
        while game.state().n() < stop {
            let round = game.state().n() + 1;
            game.step(&mut checker).map_err(|e| step_error(e, &checker, seed, i, round))?;
        }
        let st = game.state();
        let fails = st.attachment_failures()?;
        let msg = fails.first().map(|(k, a)| format!("state {i} (seed {gs}, n {}): max vertex {k} unreachable against {a}", st.n()));
        Ok((st.t() > 0, msg))
    };
    let results: Vec<Indexed<(bool, Option<String>)>> =
        pool(workers)?.install(|| (0..states).into_par_iter().map(|i| one(i).map_err(|e| (i, e))).collect());
    let mut report = AttachmentReport { states, n_max, seed, with_components: 0, failures: Vec::new() };
    for r in results {
        let (comp, msg) = r.map_err(|(_, e)| e)?;
        report.with_components += u64::from(comp);
        report.failures.extend(msg);
    }
    Ok(report)
}

/// Pairwise monotonicity of connected frequency across targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub strategy: String,
    pub points: Vec<(Node, u64, u64)>,
    /// `(n_i, n_j, z, p)` for every `n_i < n_j`, `p` the one-sided p-value of
    /// a decrease.
    pub tests: Vec<(Node, Node, f64, f64)>,
    pub alpha: f64,
    pub monotone: bool,
    pub last_exceeds_first: bool,
}

pub fn trend(stats: &AggregateStats, alpha: f64) -> TrendReport {
    let points: Vec<(Node, u64, u64)> = stats.targets.iter().map(|(n, s)| (*n, s.connected, s.samples)).collect();
    let mut tests = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (ni, ki, si) = points[i];
            let (nj, kj, sj) = points[j];
            let (z, p) = stats::two_proportion(ki, si, kj, sj);
            tests.push((ni, nj, z, p));
        }
    }
    let monotone = tests.iter().all(|t| t.3 >= alpha);
    let freq = |(_, k, s): (Node, u64, u64)| k as f64 / s.max(1) as f64;
    let last_exceeds_first = match (points.first(), points.last()) {
        (Some(&a), Some(&b)) if points.len() > 1 => freq(b) > freq(a),
        _ => false,
    };
    TrendReport { strategy: stats.strategy.clone(), points, tests, alpha, monotone, last_exceeds_first }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_spread() {
        let a: std::collections::BTreeSet<u64> = (0..1000).map(|i| game_seed(7, i)).collect();
        assert_eq!(a.len(), 1000);
        assert_ne!(game_seed(7, 0), game_seed(8, 0));
        let u = sample_unit(1, 10, 1);
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn small_campaign_is_worker_independent() {
        let cfg = ExperimentConfig {
            n_targets: vec![20, 40],
            checkpoints: vec![40],
            samples: 64,
            transition_rate: 0.2,
            attachment_rate: 0.1,
            common_check_rate: 0.5,
            ..Default::default()
        };
        let a = monte_carlo(&cfg, 1).unwrap();
        let b = monte_carlo(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.targets[&40].samples, 64);
        assert!(a.checks.transition_checks > 0);
        assert!(a.to_csv().starts_with(CSV_HEADER));
    }

    #[test]
    fn census_small() {
        let r = census(4, 1).unwrap();
        assert_eq!((r.vertices, r.pairs), (3, 3));
        assert!(r.complete);
        assert!(census(9, 1).is_err());
    }
}
