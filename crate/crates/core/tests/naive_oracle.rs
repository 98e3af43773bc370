//! A from-the-definitions reference game: cycles as plain node lists, rules
//! evaluated by scanning the stored insertion records.

use std::collections::BTreeSet;

use pedigree_core::strategy::GreedyCommon;
use pedigree_core::{EdgeTag, GameState, NodePair, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone)]
struct Naive {
    order: Vec<u32>,
    nu: Vec<Option<(u32, u32)>>,
}

impl Naive {
    fn triangle() -> Self {
        Naive { order: vec![1, 2, 3], nu: vec![None; 4] }
    }

    fn edges(&self) -> BTreeSet<(u32, u32)> {
        let n = self.order.len();
        (0..n)
            .map(|i| {
                let (x, y) = (self.order[i], self.order[(i + 1) % n]);
                (x.min(y), x.max(y))
            })
            .collect()
    }

    fn insert(&mut self, e: (u32, u32)) {
        let n = self.order.len();
        let m = n as u32 + 1;
        let i = (0..n)
            .find(|&i| {
                let (x, y) = (self.order[i], self.order[(i + 1) % n]);
                (x.min(y), x.max(y)) == e
            })
            .expect("edge of the cycle");
        self.order.insert(i + 1, m);
        self.nu.push(Some(e));
    }

    fn nu_set(&self, k: u32) -> Vec<u32> {
        match k {
            1 => vec![],
            2 => vec![1],
            3 => vec![1, 2],
            _ => {
                let (x, y) = self.nu[k as usize].unwrap();
                vec![x, y]
            }
        }
    }
}

/// Typed edges `(target, tag)` of new vertex `m`, or `None` if `m` is no vertex.
fn naive_edges(a: &Naive, b: &Naive, m: u32) -> Option<BTreeSet<(u32, EdgeTag)>> {
    let na = a.nu[m as usize].unwrap();
    let nb = b.nu[m as usize].unwrap();
    if na == nb {
        return None;
    }
    let mut out = BTreeSet::new();
    for k in 4..m {
        if b.nu[k as usize] == Some(na) {
            out.insert((k, EdgeTag::T1AB));
        }
        if a.nu[k as usize] == Some(nb) {
            out.insert((k, EdgeTag::T1BA));
        }
    }
    let l = na.1;
    if !b.nu_set(l).iter().any(|x| *x == na.0 || *x == na.1) {
        out.insert((l, EdgeTag::T2AB));
    }
    let l = nb.1;
    if !a.nu_set(l).iter().any(|x| *x == nb.0 || *x == nb.1) {
        out.insert((l, EdgeTag::T2BA));
    }
    Some(out)
}

fn pair(e: (u32, u32)) -> NodePair {
    NodePair::new(e.0, e.1).unwrap()
}

#[test]
fn rules_agree_with_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let (mut na, mut nb) = (Naive::triangle(), Naive::triangle());
        let mut st = GameState::initial();
        for m in 4..=60u32 {
            let ea: Vec<_> = na.edges().into_iter().collect();
            let eb: Vec<_> = nb.edges().into_iter().collect();
            let a = ea[rng.gen_range(0..ea.len())];
            // Bias Bob towards common edges so isolated vertices are frequent.
            let common: Vec<_> = na.edges().intersection(&nb.edges()).copied().collect();
            let b = if !common.is_empty() && rng.gen_bool(0.3) {
                common[rng.gen_range(0..common.len())]
            } else {
                eb[rng.gen_range(0..eb.len())]
            };
            let pre_common = common.len();
            na.insert(a);
            nb.insert(b);
            let out = st.advance(pair(a), pair(b)).unwrap();
            let want = naive_edges(&na, &nb, m);
            assert_eq!(out.vertex_added, want.is_some());
            if let Some(want) = want {
                let got: BTreeSet<(u32, EdgeTag)> = out.edges.edges().iter().map(|e| (e.lo, e.tag)).collect();
                assert_eq!(got, want, "m = {m}");
            }
            let now_common = na.edges().intersection(&nb.edges()).count();
            assert_eq!(st.s() as usize, now_common);
            assert_eq!(out.delta_s, now_common as i32 - pre_common as i32);
        }
        assert_eq!(st.alice().order(), na.order);
        assert_eq!(st.bob().order(), nb.order);
    }
}

fn naive_expected_y(a: &Naive, b: &Naive, horizon: u32) -> f64 {
    let n = a.order.len() as u32;
    if n >= horizon {
        return 0.0;
    }
    let common: Vec<_> = a.edges().intersection(&b.edges()).copied().collect();
    let alice = common.first().copied().unwrap_or_else(|| *a.edges().iter().next().unwrap());
    let mut total = 0.0;
    for e in b.edges() {
        let (mut a2, mut b2) = (a.clone(), b.clone());
        a2.insert(alice);
        b2.insert(e);
        let isolated = naive_edges(&a2, &b2, n + 1).is_some_and(|s| s.is_empty());
        total += f64::from(u8::from(isolated)) + naive_expected_y(&a2, &b2, horizon);
    }
    total / f64::from(n)
}

fn engine_expected_y(st: &GameState, horizon: u32) -> f64 {
    if st.n() >= horizon {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let a = GreedyCommon.next_move(st, &mut rng).unwrap();
    let mut total = 0.0;
    for b in st.bob().edges() {
        let (next, out) = st.apply_round(a, b).unwrap();
        total += f64::from(u8::from(out.isolated())) + engine_expected_y(&next, horizon);
    }
    total / f64::from(st.n())
}

#[test]
fn exact_isolation_expectation_for_greedy() {
    for horizon in 4..=8 {
        let naive = naive_expected_y(&Naive::triangle(), &Naive::triangle(), horizon);
        let engine = engine_expected_y(&GameState::initial(), horizon);
        assert!((naive - engine).abs() < 1e-12, "horizon {horizon}: {naive} vs {engine}");
    }
    assert!((engine_expected_y(&GameState::initial(), 4) - 2.0 / 3.0).abs() < 1e-12);
}
