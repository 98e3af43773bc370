use std::collections::{BTreeMap, BTreeSet};

use pedigree_core::{EvolvingCycle, NodePair, Pedigree};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pedigree_strategy(max_n: u32) -> impl Strategy<Value = Pedigree> {
    (4..=max_n).prop_flat_map(|n| {
        let parts: Vec<_> = (3..n).map(|k| 1..=k).collect();
        parts.prop_map(move |choices| Pedigree::new(n, choices).unwrap())
    })
}

#[test]
fn counts_and_bijection_exhaustive() {
    for (n, expected) in [(3u32, 1usize), (4, 3), (5, 12), (6, 60), (7, 360), (8, 2520)] {
        let mut orders = BTreeSet::new();
        let mut count = 0;
        for p in Pedigree::enumerate(n).unwrap() {
            let c = p.to_cycle();
            assert_eq!(c.pedigree(), p);
            assert_eq!(Pedigree::from_order(&c.order()).unwrap(), p);
            orders.insert(c.order());
            count += 1;
        }
        assert_eq!(count, expected);
        assert_eq!(orders.len(), expected);
        assert_eq!(Pedigree::count(n), Some(expected as u64));
    }
}

#[test]
fn inserter_lookup_exhaustive() {
    for n in 4..=8u32 {
        for p in Pedigree::enumerate(n).unwrap() {
            let c = p.to_cycle();
            let stored: BTreeMap<NodePair, u32> = (4..=n).map(|m| (c.nu_pair(m).unwrap(), m)).collect();
            for j in 2..=n {
                for i in 1..j {
                    let pair = NodePair::new(i, j).unwrap();
                    let want = stored.get(&pair).copied();
                    assert_eq!(c.find_inserter(pair), want, "{p} {pair}");
                    assert_eq!(c.inserter_of(pair), want, "{p} {pair}");
                }
            }
        }
    }
}

#[test]
fn uniform_sampling_at_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut freq: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    let samples = 120_000;
    for _ in 0..samples {
        let p = Pedigree::sample_uniform(5, &mut rng).unwrap();
        *freq.entry(p.to_cycle().order()).or_default() += 1;
    }
    assert_eq!(freq.len(), 12);
    for (order, c) in freq {
        let f = f64::from(c) / f64::from(samples);
        assert!((f - 1.0 / 12.0).abs() <= 0.005, "{order:?}: {f}");
    }
}

#[test]
fn sampling_is_seeded() {
    let a = Pedigree::sample_uniform(50, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = Pedigree::sample_uniform(50, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a, b);
    assert_eq!(Pedigree::sample_uniform(3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap(), Pedigree::triangle());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bijection_round_trip(p in pedigree_strategy(120)) {
        let c = p.to_cycle();
        prop_assert_eq!(c.pedigree(), p.clone());
        prop_assert_eq!(Pedigree::from_order(&c.order()).unwrap(), p.clone());
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Pedigree>().unwrap(), p.clone());
        prop_assert_eq!(p.to_pair_string().parse::<Pedigree>().unwrap(), p.clone());
        prop_assert_eq!(Pedigree::from_pairs(p.n(), &p.to_pairs()).unwrap(), p);
    }

    #[test]
    fn walk_matches_record(p in pedigree_strategy(60)) {
        let c = p.to_cycle();
        for k in 2..=p.n() {
            let nu = c.nu(k).unwrap();
            prop_assert_eq!(c.nu_by_walk(k).unwrap(), (nu.minus, nu.plus));
        }
        prop_assert_eq!(c.nu_by_walk(3).unwrap(), (2, 1));
    }

    #[test]
    fn order_orientation(p in pedigree_strategy(60)) {
        let order = p.to_cycle().order();
        let pos = |x: u32| order.iter().position(|&y| y == x).unwrap();
        prop_assert_eq!(order[0], 1);
        prop_assert!(pos(2) < pos(3));
        prop_assert_eq!(EvolvingCycle::from_order(&order).unwrap(), p.to_cycle());
    }

    #[test]
    fn segments_are_stable(p in pedigree_strategy(25), i in 1u32..=25, j in 1u32..=25) {
        let n = p.n();
        prop_assume!(i != j && i <= n && j <= n);
        let c = p.to_cycle();
        let full = c.segment_between(i, j).unwrap();
        for m in i.max(j).max(3)..=n {
            let small = c.prefix(m).unwrap().segment_between(i, j).unwrap();
            let restricted: Vec<u32> = full.iter().copied().filter(|&x| x <= m).collect();
            prop_assert_eq!(small, restricted, "m = {}", m);
        }
    }
}
