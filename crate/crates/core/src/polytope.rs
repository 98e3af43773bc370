//! Pedigree vectors and an exact convex-hull adjacency oracle.
//!
//! A pedigree for `n` cities is the 0/1 vector with one coordinate per
//! (stage `k`, pair `{i, j}` with `i < j <= k − 1`), set exactly when node
//! `k` was inserted between `i` and `j`. Two pedigrees are adjacent on the
//! polytope iff their midpoint lies outside the hull of all other pedigrees.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;

use crate::error::PolytopeError;
use crate::game::GameRng;
use crate::graph::pedigree_adjacent;
use crate::pair::{Node, NodePair};
use crate::pedigree::Pedigree;
use crate::simplex::{feasibility, Feasibility};

/// Largest `n` the exhaustive oracle accepts.
pub const MAX_ORACLE_N: Node = 7;

fn choose2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

/// Number of coordinates for `n` cities, `Σ_{k=4}^{n} C(k − 1, 2)`.
pub fn dimension(n: Node) -> usize {
    (4..=n as usize).map(|k| choose2(k - 1)).sum()
}

/// Coordinate of "node `k` inserted into `pair`".
pub fn coordinate(k: Node, pair: NodePair) -> usize {
    debug_assert!(k >= 4 && pair.hi() < k);
    let offset = dimension(k - 1);
    offset + choose2(pair.hi() as usize - 1) + (pair.lo() as usize - 1)
}

/// Sparse 0/1 pedigree vector: the set coordinate of each stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PedigreeVector {
    n: Node,
    ones: Vec<usize>,
}

impl PedigreeVector {
    pub fn n(&self) -> Node {
        self.n
    }

    /// Set coordinates, one per stage `4..=n`, increasing.
    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn dense(&self) -> Vec<u8> {
        let mut v = vec![0u8; dimension(self.n)];
        for &i in &self.ones {
            v[i] = 1;
        }
        v
    }

    fn stage_coord(&self, stage: usize) -> usize {
        self.ones[stage]
    }
}

pub fn embed(p: &Pedigree) -> Result<PedigreeVector, PolytopeError> {
    if p.n() < 4 {
        return Err(PolytopeError::TooFewNodes(p.n()));
    }
    let ones = p.to_pairs().into_iter().zip(4..).map(|(pair, k)| coordinate(k, pair)).collect();
    Ok(PedigreeVector { n: p.n(), ones })
}

/// Every pedigree vector for `n` cities, in enumeration order.
pub fn all_vectors(n: Node) -> Result<Vec<PedigreeVector>, PolytopeError> {
    if n < 4 {
        return Err(PolytopeError::TooFewNodes(n));
    }
    Pedigree::enumerate(n)
        .map_err(|_| PolytopeError::TooFewNodes(n))?
        .map(|p| embed(&p))
        .collect()
}

/// Affine functional `x ↦ Σ coefficients[i]·x_i + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separator {
    pub coefficients: Vec<BigRational>,
    pub constant: BigRational,
}

impl Separator {
    pub fn eval(&self, v: &PedigreeVector) -> BigRational {
        v.ones.iter().fold(self.constant.clone(), |acc, &i| acc + &self.coefficients[i])
    }

    pub fn eval_midpoint(&self, u: &PedigreeVector, v: &PedigreeVector) -> BigRational {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        (self.eval(u) + self.eval(v) - &self.constant - &self.constant) * half + &self.constant
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HullVerdict {
    /// `separator` is positive at the midpoint and `<= 0` on every other
    /// pedigree.
    Adjacent { separator: Separator },
    /// Convex weights over indices of the vertex set reproducing the midpoint.
    NotAdjacent { combination: Vec<(usize, BigRational)> },
}

impl HullVerdict {
    pub fn is_adjacent(&self) -> bool {
        matches!(self, HullVerdict::Adjacent { .. })
    }
}

fn check_set(u: &PedigreeVector, v: &PedigreeVector, all: &[PedigreeVector]) -> Result<(usize, usize), PolytopeError> {
    if u.n != v.n {
        return Err(PolytopeError::SizeMismatch(u.n, v.n));
    }
    if u == v {
        return Err(PolytopeError::SameVertex);
    }
    let expected = Pedigree::count(u.n).unwrap_or(u64::MAX) as usize;
    if all.len() != expected || all.iter().any(|w| w.n != u.n) {
        return Err(PolytopeError::IncompleteVertexSet { expected, got: all.len() });
    }
    let iu = all.iter().position(|w| w == u).ok_or(PolytopeError::NotInSet)?;
    let iv = all.iter().position(|w| w == v).ok_or(PolytopeError::NotInSet)?;
    Ok((iu, iv))
}

/// Decides whether `u` and `v` span an edge of `conv(all)`, where `all` is
/// the complete pedigree vector set for their `n`.
pub fn hull_adjacent(u: &PedigreeVector, v: &PedigreeVector, all: &[PedigreeVector]) -> Result<HullVerdict, PolytopeError> {
    let (iu, iv) = check_set(u, v, all)?;
    Ok(hull_adjacent_indexed(iu, iv, all))
}

fn hull_adjacent_indexed(iu: usize, iv: usize, all: &[PedigreeVector]) -> HullVerdict {
    let (u, v) = (&all[iu], &all[iv]);
    let dim = dimension(u.n);
    let stages = u.ones.len();

    // Any point in a representation of the midpoint must vanish where both
    // u and v vanish, so only points living on u ∪ v can take part.
    let candidates: Vec<usize> = (0..all.len())
        .filter(|&w| w != iu && w != iv)
        .filter(|&w| (0..stages).all(|s| {
            let c = all[w].stage_coord(s);
            c == u.stage_coord(s) || c == v.stage_coord(s)
        }))
        .collect();

    let diff: Vec<usize> = (0..stages)
        .filter(|&s| u.stage_coord(s) != v.stage_coord(s))
        .flat_map(|s| [u.stage_coord(s), v.stage_coord(s)])
        .collect();

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let one = BigRational::one();
    let mut a: Vec<Vec<BigRational>> = diff
        .iter()
        .map(|&i| {
            candidates
                .iter()
                .map(|&w| if all[w].ones.binary_search(&i).is_ok() { one.clone() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    a.push(vec![one.clone(); candidates.len()]);
    let mut b = vec![half.clone(); diff.len()];
    b.push(one.clone());

    match feasibility(&a, &b) {
        Feasibility::Feasible(x) => HullVerdict::NotAdjacent {
            combination: candidates.iter().zip(x).filter(|(_, l)| !l.is_zero()).map(|(&w, l)| (w, l)).collect(),
        },
        Feasibility::Infeasible(y) => {
            let mut coefficients = vec![BigRational::zero(); dim];
            for (&i, yi) in diff.iter().zip(&y) {
                coefficients[i] = yi.clone();
            }
            let mut constant = y[diff.len()].clone();

            // Lift to all points: subtract M for every stage that leaves u ∪ v.
            let shared: Vec<usize> = (0..stages)
                .filter(|&s| u.stage_coord(s) == v.stage_coord(s))
                .map(|s| u.stage_coord(s))
                .collect();
            let base = Separator { coefficients: coefficients.clone(), constant: constant.clone() };
            let worst = (0..all.len())
                .filter(|&w| w != iu && w != iv && candidates.binary_search(&w).is_err())
                .map(|w| base.eval(&all[w]))
                .fold(BigRational::zero(), |m, f| if f > m { f } else { m });
            let penalty = worst + &one;
            // h(x) = Σ_shared (x_i − 1) − Σ_outside x_i.
            let in_union: BTreeSet<usize> = u.ones.iter().chain(&v.ones).copied().collect();
            for (i, c) in coefficients.iter_mut().enumerate() {
                if shared.binary_search(&i).is_ok() {
                    *c += &penalty;
                } else if !in_union.contains(&i) {
                    *c -= &penalty;
                }
            }
            constant -= &penalty * BigRational::from_integer(BigInt::from(shared.len()));
            HullVerdict::Adjacent { separator: Separator { coefficients, constant } }
        }
    }
}

/// Recomputes a verdict's certificate from scratch.
pub fn verify_certificate(u: &PedigreeVector, v: &PedigreeVector, all: &[PedigreeVector], verdict: &HullVerdict) -> bool {
    let Ok((iu, iv)) = check_set(u, v, all) else {
        return false;
    };
    match verdict {
        HullVerdict::Adjacent { separator } => {
            separator.coefficients.len() == dimension(u.n)
                && separator.eval_midpoint(u, v).is_positive()
                && all
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != iu && i != iv)
                    .all(|(_, w)| !separator.eval(w).is_positive())
        }
        HullVerdict::NotAdjacent { combination } => {
            let total: BigRational = combination.iter().map(|(_, l)| l.clone()).sum();
            if total != BigRational::one()
                || combination.iter().any(|(w, l)| *w >= all.len() || *w == iu || *w == iv || l.is_negative())
            {
                return false;
            }
            let dim = dimension(u.n);
            let mut point = vec![BigRational::zero(); dim];
            for (w, l) in combination {
                for &i in &all[*w].ones {
                    point[i] += l;
                }
            }
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let mut mid = vec![BigRational::zero(); dim];
            for &i in u.ones.iter().chain(&v.ones) {
                mid[i] += &half;
            }
            point == mid
        }
    }
}

/// Outcome of comparing graph connectivity with hull adjacency over pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub n: Node,
    pub vertices: usize,
    pub pairs: usize,
    pub adjacent_pairs: usize,
    /// Index pairs where the two tests disagree.
    pub disagreements: Vec<(usize, usize)>,
    /// Index pairs whose certificate failed independent verification.
    pub bad_certificates: Vec<(usize, usize)>,
    /// Only filled when every pair was checked.
    pub complete: Option<bool>,
    pub min_degree: Option<usize>,
    pub max_degree: Option<usize>,
}

impl CrossCheckReport {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty() && self.bad_certificates.is_empty()
    }
}

/// Checks graph-connectivity adjacency against the hull oracle on every pair
/// (`sample = None`) or on `sample` distinct pairs drawn with `seed`.
pub fn verify_adjacency_criterion(n: Node, sample: Option<(usize, u64)>) -> Result<CrossCheckReport, PolytopeError> {
    if !(4..=MAX_ORACLE_N).contains(&n) {
        return Err(PolytopeError::UnsupportedSize(n));
    }
    let peds: Vec<Pedigree> = Pedigree::enumerate(n).map_err(|_| PolytopeError::TooFewNodes(n))?.collect();
    let all: Vec<PedigreeVector> = peds.iter().map(embed).collect::<Result<_, _>>()?;
    let total = all.len() * (all.len() - 1) / 2;

    let pairs: Vec<(usize, usize)> = match sample {
        Some((k, seed)) if k < total => {
            let mut rng = GameRng::seed_from_u64(seed);
            let mut chosen = BTreeSet::new();
            while chosen.len() < k {
                let i = rng.gen_range(0..all.len());
                let j = rng.gen_range(0..all.len());
                if i != j {
                    chosen.insert((i.min(j), i.max(j)));
                }
            }
            chosen.into_iter().collect()
        }
        _ => (0..all.len()).flat_map(|i| (i + 1..all.len()).map(move |j| (i, j))).collect(),
    };
    let full = pairs.len() == total;

    let mut degree = vec![0usize; all.len()];
    let mut report = CrossCheckReport {
        n,
        vertices: all.len(),
        pairs: pairs.len(),
        adjacent_pairs: 0,
        disagreements: Vec::new(),
        bad_certificates: Vec::new(),
        complete: None,
        min_degree: None,
        max_degree: None,
    };
    for (i, j) in pairs {
        let verdict = hull_adjacent_indexed(i, j, &all);
        if !verify_certificate(&all[i], &all[j], &all, &verdict) {
            report.bad_certificates.push((i, j));
        }
        let graph = pedigree_adjacent(&peds[i], &peds[j]).expect("distinct pedigrees of equal size");
        if graph != verdict.is_adjacent() {
            report.disagreements.push((i, j));
        }
        if verdict.is_adjacent() {
            report.adjacent_pairs += 1;
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    if full {
        report.complete = Some(report.adjacent_pairs == total);
        report.min_degree = degree.iter().copied().min();
        report.max_degree = degree.iter().copied().max();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(dimension(4), 3);
        assert_eq!(dimension(5), 9);
        assert_eq!(dimension(6), 19);
        assert_eq!(dimension(7), 34);
    }

    #[test]
    fn coordinates_are_a_bijection_per_stage() {
        for n in 4..=7u32 {
            let mut seen = BTreeSet::new();
            for k in 4..=n {
                for j in 2..k {
                    for i in 1..j {
                        assert!(seen.insert(coordinate(k, NodePair::new(i, j).unwrap())));
                    }
                }
            }
            assert_eq!(seen.len(), dimension(n));
            assert_eq!(seen.iter().max().copied(), Some(dimension(n) - 1));
        }
    }

    #[test]
    fn n4_is_a_triangle() {
        let all = all_vectors(4).unwrap();
        assert_eq!(all.len(), 3);
        for i in 0..3 {
            for j in i + 1..3 {
                let verdict = hull_adjacent(&all[i], &all[j], &all).unwrap();
                assert!(verdict.is_adjacent());
                assert!(verify_certificate(&all[i], &all[j], &all, &verdict));
            }
        }
    }

    #[test]
    fn errors() {
        let all = all_vectors(5).unwrap();
        assert_eq!(hull_adjacent(&all[0], &all[0], &all), Err(PolytopeError::SameVertex));
        assert!(matches!(
            hull_adjacent(&all[0], &all[1], &all[..5]),
            Err(PolytopeError::IncompleteVertexSet { .. })
        ));
        assert_eq!(verify_adjacency_criterion(8, None).unwrap_err(), PolytopeError::UnsupportedSize(8));
    }

    #[test]
    fn n5_agrees_with_graph_test() {
        let r = verify_adjacency_criterion(5, None).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.pairs, 66);
        assert_eq!(r.complete, Some(false));
    }
}
