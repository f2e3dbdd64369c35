//! Pairwise cycle metrics and union connectivity of factor subsets.

use serde::Serialize;

use crate::matching::{union_cycle_stats, Factorization};

/// Smallest, over unordered factor pairs, of the longest cycle in the pair's
/// union.
pub fn min_longest_cycle(f: &Factorization) -> usize {
    pair_stats(f).map(|(_, longest)| longest).min().unwrap_or(0)
}

/// Largest, over unordered factor pairs, of the number of cycles in the
/// pair's union.
pub fn max_pair_cycle_count(f: &Factorization) -> usize {
    pair_stats(f).map(|(count, _)| count).max().unwrap_or(0)
}

/// `(cycle count, longest cycle)` for every pair `i < j`, row by row.
pub(crate) fn pair_stats(f: &Factorization) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = f.len();
    let mut scratch = Vec::new();
    (0..n)
        .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
        .map(move |(i, j)| union_cycle_stats(f.factor(i).partners(), f.factor(j).partners(), &mut scratch))
}

/// Union-find with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns true if `a` and `b` were in different sets.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityThreshold {
    /// Least `r` such that every `r` factors have a connected union.
    pub threshold: usize,
    /// A `(threshold - 1)`-subset with disconnected union, if `threshold > 1`.
    pub disconnected_witness: Option<Vec<usize>>,
}

/// Scans subset sizes upward; connectivity is monotone under adding factors,
/// so the first size with no disconnected subset is the threshold.
pub fn union_connectivity_threshold(f: &Factorization) -> ConnectivityThreshold {
    let d = f.len();
    let n = f.dim().vertex_count();
    let mut witness = None;
    for r in 1..=d {
        let disconnected = subsets_of_size(d, r).find(|subset| {
            let mut sets = DisjointSets::new(n);
            for &i in subset {
                for (u, v) in f.factor(i).edges() {
                    sets.union(u, v);
                }
            }
            sets.components() > 1
        });
        match disconnected {
            Some(s) => witness = Some(s),
            None => {
                return ConnectivityThreshold {
                    threshold: r,
                    disconnected_witness: witness,
                }
            }
        }
    }
    // the union of all d factors is Q_d itself
    ConnectivityThreshold {
        threshold: d + 1,
        disconnected_witness: witness,
    }
}

/// `r`-subsets of `0..n` in lexicographic order.
fn subsets_of_size(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n)
        .filter(move |m| m.count_ones() as usize == r)
        .map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}
