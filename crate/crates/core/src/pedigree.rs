//! Insertion-choice encodings of cycles.
//!
//! A pedigree for `n` cities is the sequence `c_3, …, c_{n−1}` with
//! `1 <= c_k <= k`: node `k + 1` subdivides the `c_k`-th edge of the cycle on
//! `[k]`. There are `(n − 1)!/2` of them, one per cycle on `[n]`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::cycle::EvolvingCycle;
use crate::error::CycleError;
use crate::pair::{Node, NodePair};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pedigree {
    n: Node,
    choices: Vec<Node>,
}

impl Pedigree {
    pub fn new(n: Node, choices: Vec<Node>) -> Result<Self, CycleError> {
        if n < 3 {
            return Err(CycleError::TooFewNodes(n));
        }
        let expected = (n - 3) as usize;
        if choices.len() != expected {
            return Err(CycleError::WrongLength { expected, got: choices.len() });
        }
        for (i, &c) in choices.iter().enumerate() {
            let k = i as Node + 3;
            if c == 0 || c > k {
                return Err(CycleError::BadChoice { k, choice: c });
            }
        }
        Ok(Pedigree { n, choices })
    }

    /// The pedigree of the triangle (no choices).
    pub fn triangle() -> Self {
        Pedigree { n: 3, choices: Vec::new() }
    }

    /// Pedigree whose node `k` subdivides `pairs[k − 4]`, for `k = 4..=n`.
    pub fn from_pairs(n: Node, pairs: &[NodePair]) -> Result<Self, CycleError> {
        if n < 3 {
            return Err(CycleError::TooFewNodes(n));
        }
        let expected = (n - 3) as usize;
        if pairs.len() != expected {
            return Err(CycleError::WrongLength { expected, got: pairs.len() });
        }
        let mut cycle = EvolvingCycle::base();
        for &p in pairs {
            cycle.insert_mut(p)?;
        }
        Ok(cycle.pedigree())
    }

    /// Recovers the pedigree of a cyclic order of `[n]` given in either
    /// direction from any starting node.
    ///
    /// `ν⁻(k)` is the nearest smaller node walking backwards from `k`, found
    /// for all nodes at once with a monotone stack over the doubled order. The
    /// choice `c_{k−1}` is the position of `ν⁻(k)` among the nodes `< k`,
    /// maintained with a Fenwick tree while peeling nodes from the largest.
    pub fn from_order(order: &[Node]) -> Result<Self, CycleError> {
        let n = order.len() as Node;
        if n < 3 {
            return Err(CycleError::TooFewNodes(n));
        }
        let mut seen = vec![false; n as usize + 1];
        for &v in order {
            if v == 0 || v > n || seen[v as usize] {
                return Err(CycleError::NotACycle(n));
            }
            seen[v as usize] = true;
        }
        let start = order.iter().position(|v| *v == 1).expect("permutation contains 1");
        let mut oriented: Vec<Node> = order[start..].iter().chain(&order[..start]).copied().collect();
        let pos2 = oriented.iter().position(|v| *v == 2).expect("contains 2");
        let pos3 = oriented.iter().position(|v| *v == 3).expect("contains 3");
        if pos3 < pos2 {
            oriented[1..].reverse();
        }

        let len = oriented.len();
        let mut pos = vec![0usize; len + 1];
        for (i, &v) in oriented.iter().enumerate() {
            pos[v as usize] = i;
        }
        let mut nu_minus = vec![0 as Node; len + 1];
        let mut stack: Vec<Node> = Vec::with_capacity(len);
        for i in 0..2 * len {
            let v = oriented[i % len];
            while stack.last().is_some_and(|top| *top > v) {
                stack.pop();
            }
            if i >= len {
                nu_minus[v as usize] = stack.last().copied().unwrap_or(0);
            }
            stack.push(v);
        }

        let mut fenwick = Fenwick::full(len);
        let mut choices = vec![0 as Node; len - 3];
        for k in (4..=len).rev() {
            fenwick.remove(pos[k]);
            let anchor = nu_minus[k] as usize;
            choices[k - 4] = fenwick.prefix(pos[anchor]) as Node;
        }
        Pedigree::new(n, choices)
    }

    #[inline]
    pub fn n(&self) -> Node {
        self.n
    }

    /// `c_3, …, c_{n−1}`.
    #[inline]
    pub fn choices(&self) -> &[Node] {
        &self.choices
    }

    /// The insertion pairs `ν(4), …, ν(n)`.
    pub fn to_pairs(&self) -> Vec<NodePair> {
        let cycle = self.to_cycle();
        (4..=self.n).map(|k| cycle.nu_pair(k).expect("k >= 4")).collect()
    }

    pub fn to_cycle(&self) -> EvolvingCycle {
        EvolvingCycle::from_pedigree(self)
    }

    /// Number of pedigrees for `n` cities, `(n − 1)!/2`; `None` on overflow.
    pub fn count(n: Node) -> Option<u64> {
        if n < 3 {
            return None;
        }
        (3..n).try_fold(1u64, |acc, k| acc.checked_mul(u64::from(k)))
    }

    /// All pedigrees for `n` cities in lexicographic order of their choices.
    pub fn enumerate(n: Node) -> Result<Enumerate, CycleError> {
        if n < 3 {
            return Err(CycleError::TooFewNodes(n));
        }
        Ok(Enumerate { n, next: Some(vec![1; (n - 3) as usize]) })
    }

    /// Each `c_k` drawn independently and uniformly from `[k]`.
    pub fn sample_uniform<R: Rng + ?Sized>(n: Node, rng: &mut R) -> Result<Self, CycleError> {
        if n < 3 {
            return Err(CycleError::TooFewNodes(n));
        }
        let choices = (3..n).map(|k| rng.gen_range(1..=k)).collect();
        Ok(Pedigree { n, choices })
    }

    /// Pair-form text: `n:10;nu:1-2,2-4,…`.
    pub fn to_pair_string(&self) -> String {
        let body: Vec<String> = self.to_pairs().iter().map(|p| format!("{}-{}", p.lo(), p.hi())).collect();
        format!("n:{};nu:{}", self.n, body.join(","))
    }
}

/// Index-form text: `n:10;idx:1,2,4,2,6,8,8`.
impl fmt::Display for Pedigree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n:{};idx:", self.n)?;
        for (i, c) in self.choices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Accepts both `n:<n>;idx:<c_3,…>` and `n:<n>;nu:<i-j,…>`.
impl FromStr for Pedigree {
    type Err = CycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| CycleError::Parse(format!("{msg} in `{s}`"));
        let (head, body) = s.trim().split_once(';').ok_or_else(|| bad("missing `;`"))?;
        let n: Node = head
            .strip_prefix("n:")
            .ok_or_else(|| bad("missing `n:`"))?
            .trim()
            .parse()
            .map_err(|_| bad("bad node count"))?;
        let items = |list: &str| -> Vec<String> {
            list.split(',').map(str::trim).filter(|t| !t.is_empty()).map(ToString::to_string).collect()
        };
        if let Some(list) = body.strip_prefix("idx:") {
            let choices = items(list)
                .iter()
                .map(|t| t.parse::<Node>().map_err(|_| bad("bad edge index")))
                .collect::<Result<Vec<_>, _>>()?;
            Pedigree::new(n, choices)
        } else if let Some(list) = body.strip_prefix("nu:") {
            let pairs = items(list)
                .iter()
                .map(|t| {
                    let (a, b) = t.split_once('-').ok_or_else(|| bad("bad pair"))?;
                    let a = a.parse::<Node>().map_err(|_| bad("bad pair"))?;
                    let b = b.parse::<Node>().map_err(|_| bad("bad pair"))?;
                    NodePair::new(a, b)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Pedigree::from_pairs(n, &pairs)
        } else {
            Err(bad("expected `idx:` or `nu:`"))
        }
    }
}

/// Odometer over all pedigrees of a fixed size; the last choice varies fastest.
#[derive(Debug, Clone)]
pub struct Enumerate {
    n: Node,
    next: Option<Vec<Node>>,
}

impl Iterator for Enumerate {
    type Item = Pedigree;

    fn next(&mut self) -> Option<Pedigree> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            let k = i as Node + 3;
            if succ[i] < k {
                succ[i] += 1;
                advanced = true;
                break;
            }
            succ[i] = 1;
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(Pedigree { n: self.n, choices: current })
    }
}

struct Fenwick {
    tree: Vec<i32>,
}

impl Fenwick {
    fn full(len: usize) -> Self {
        let mut tree = vec![0; len + 1];
        for i in 1..=len {
            tree[i] += 1;
            let j = i + (i & i.wrapping_neg());
            if j <= len {
                tree[j] += tree[i];
            }
        }
        Fenwick { tree }
    }

    fn remove(&mut self, index: usize) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] -= 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of present positions `<= index`.
    fn prefix(&self, index: usize) -> i32 {
        let mut i = index + 1;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    const ALICE_IDX: [Node; 7] = [1, 2, 4, 2, 6, 8, 8];
    const BOB_IDX: [Node; 7] = [3, 1, 3, 5, 7, 8, 3];

    #[test]
    fn validation() {
        assert!(Pedigree::new(2, vec![]).is_err());
        assert_eq!(Pedigree::new(5, vec![1]), Err(CycleError::WrongLength { expected: 2, got: 1 }));
        assert_eq!(Pedigree::new(5, vec![4, 1]), Err(CycleError::BadChoice { k: 3, choice: 4 }));
        assert_eq!(Pedigree::new(5, vec![1, 0]), Err(CycleError::BadChoice { k: 4, choice: 0 }));
        assert!(Pedigree::new(5, vec![3, 4]).is_ok());
    }

    #[test]
    fn worked_example_round_trip() {
        let a = Pedigree::new(10, ALICE_IDX.to_vec()).unwrap();
        let cycle = a.to_cycle();
        assert_eq!(cycle.order(), vec![1, 4, 7, 5, 2, 6, 8, 3, 10, 9]);
        assert_eq!(cycle.pedigree(), a);

        let b = Pedigree::new(10, BOB_IDX.to_vec()).unwrap();
        let expect: Vec<NodePair> = [(1, 3), (1, 2), (2, 3), (3, 4), (1, 4), (1, 8), (2, 6)]
            .iter()
            .map(|&(x, y)| NodePair::new(x, y).unwrap())
            .collect();
        assert_eq!(b.to_pairs(), expect);
    }

    #[test]
    fn text_forms() {
        let a: Pedigree = "n:10;idx:1,2,4,2,6,8,8".parse().unwrap();
        assert_eq!(a.choices(), &ALICE_IDX);
        assert_eq!(a.to_string(), "n:10;idx:1,2,4,2,6,8,8");
        assert_eq!(a.to_pair_string(), "n:10;nu:1-2,2-4,2-3,4-5,3-6,1-3,3-9");
        let via_pairs: Pedigree = "n:10;nu:1-2,2-4,2-3,4-5,3-6,1-3,3-9".parse().unwrap();
        assert_eq!(via_pairs, a);
        assert_eq!("n:3;idx:".parse::<Pedigree>().unwrap(), Pedigree::triangle());
        assert_eq!(Pedigree::triangle().to_string(), "n:3;idx:");
        assert!("n:4;nu:1-4".parse::<Pedigree>().is_err());
        assert!("10;idx:1".parse::<Pedigree>().is_err());
        assert!("n:5;idx:1,x".parse::<Pedigree>().is_err());
        assert!("n:5;foo:1,1".parse::<Pedigree>().is_err());
    }

    #[test]
    fn from_order_accepts_any_rotation_and_direction() {
        let a = Pedigree::new(10, ALICE_IDX.to_vec()).unwrap();
        let order = [1, 4, 7, 5, 2, 6, 8, 3, 10, 9];
        let mut rotated: Vec<Node> = order[4..].iter().chain(&order[..4]).copied().collect();
        assert_eq!(Pedigree::from_order(&rotated).unwrap(), a);
        rotated.reverse();
        assert_eq!(Pedigree::from_order(&rotated).unwrap(), a);
        assert!(Pedigree::from_order(&[1, 2, 2]).is_err());
        assert!(Pedigree::from_order(&[1, 2]).is_err());
    }

    #[test]
    fn counts_and_enumeration() {
        let expected = [(3, 1), (4, 3), (5, 12), (6, 60), (7, 360), (8, 2520)];
        for (n, count) in expected {
            assert_eq!(Pedigree::count(n), Some(count));
            let all: Vec<_> = Pedigree::enumerate(n).unwrap().collect();
            assert_eq!(all.len() as u64, count);
            let orders: BTreeSet<_> = all.iter().map(|p| p.to_cycle().order()).collect();
            assert_eq!(orders.len() as u64, count);
        }
        assert!(Pedigree::enumerate(2).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let mut r1 = ChaCha8Rng::seed_from_u64(11);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        let a = Pedigree::sample_uniform(40, &mut r1).unwrap();
        let b = Pedigree::sample_uniform(40, &mut r2).unwrap();
        assert_eq!(a, b);
        assert_eq!(Pedigree::sample_uniform(3, &mut r1).unwrap(), Pedigree::triangle());
    }
}
