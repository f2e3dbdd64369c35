//! The perfection graph `G[M]` of a factorization: factors as vertices, an
//! edge wherever two factors union to a Hamilton cycle.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::matching::{hamilton_walk, Factorization};

/// Factor count is bounded by the cube dimension, so rows fit in a `u32`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PerfectionGraph {
    n: usize,
    rows: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("part sizes {k} + {l} do not add up to {n} vertices")]
    PartSizes { k: usize, l: usize, n: usize },
    #[error("graph on {0} vertices exceeds the 32-vertex limit")]
    TooLarge(usize),
}

impl PerfectionGraph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > 32 {
            return Err(GraphError::TooLarge(n));
        }
        Ok(PerfectionGraph { n, rows: vec![0; n] })
    }

    /// Builds a graph from an edge list; loops and duplicates are ignored.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = PerfectionGraph::empty(n)?;
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// `K_{k,l}` with parts `0..k` and `k..k+l`.
    pub fn complete_bipartite(k: usize, l: usize) -> Result<Self, GraphError> {
        let mut g = PerfectionGraph::empty(k + l)?;
        for i in 0..k {
            for j in k..k + l {
                g.add_edge(i, j);
            }
        }
        Ok(g)
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.rows[i] |= 1 << j;
            self.rows[j] |= 1 << i;
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    /// Degrees in non-decreasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = (0..self.n).map(|i| self.degree(i)).collect();
        degrees.sort_unstable();
        degrees
    }

    /// Graphviz rendering with nodes `M1..Mn`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for i in 0..self.n {
            let _ = writeln!(out, "  M{};", i + 1);
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  M{} -- M{};", i + 1, j + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// `G[F]`: an edge `{i, j}` iff `F_i ∪ F_j` is a Hamilton cycle.
pub fn perfection_graph(f: &Factorization) -> PerfectionGraph {
    let n = f.len();
    let mut g = PerfectionGraph::empty(n).expect("factor count bounded by dimension");
    for i in 0..n {
        for j in i + 1..n {
            if hamilton_walk(f.factor(i).partners(), f.factor(j).partners()) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Result of a bipartiteness test, with a certificate either way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bipartiteness {
    /// `coloring[v]` is 0 or 1; every edge joins different colors.
    Bipartite { coloring: Vec<u8> },
    /// A closed walk `v_0, ..., v_{m-1}` of odd length `m`, simple as a cycle.
    OddCycle { cycle: Vec<usize> },
}

impl Bipartiteness {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartiteness::Bipartite { .. })
    }

    /// Re-checks the certificate against `g`.
    pub fn certifies(&self, g: &PerfectionGraph) -> bool {
        match self {
            Bipartiteness::Bipartite { coloring } => {
                coloring.len() == g.n
                    && coloring.iter().all(|&c| c <= 1)
                    && g.edges().iter().all(|&(i, j)| coloring[i] != coloring[j])
            }
            Bipartiteness::OddCycle { cycle } => {
                let m = cycle.len();
                let mut seen = vec![false; g.n];
                m % 2 == 1
                    && cycle.iter().all(|&v| v < g.n && !std::mem::replace(&mut seen[v], true))
                    && (0..m).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % m]))
            }
        }
    }
}

/// BFS 2-coloring; on failure returns the odd cycle closed by the first
/// monochromatic edge.
pub fn is_bipartite(g: &PerfectionGraph) -> Bipartiteness {
    let n = g.n;
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for root in 0..n {
        if color[root] != u8::MAX {
            continue;
        }
        color[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u) {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return Bipartiteness::OddCycle {
                        cycle: close_cycle(u, v, &parent, &depth),
                    };
                }
            }
        }
    }
    Bipartiteness::Bipartite { coloring: color }
}

fn close_cycle(u: usize, v: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut a, mut b) = (u, v);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

/// A bipartition `(first, second)` witnessing `G ≅ K_{k,l}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Searches for parts of sizes `k` and `l` with every cross pair adjacent and
/// no pair inside a part adjacent. Backtracks over part assignment, pruning
/// on degrees and on adjacency with already-placed vertices.
pub fn is_complete_bipartite(
    g: &PerfectionGraph,
    k: usize,
    l: usize,
) -> Result<Option<Bipartition>, GraphError> {
    if k + l != g.n {
        return Err(GraphError::PartSizes { k, l, n: g.n });
    }
    if g.edge_count() != k * l {
        return Ok(None);
    }
    let mut side = vec![0u8; g.n];
    if assign(g, 0, k, l, &mut side) {
        let first = (0..g.n).filter(|&v| side[v] == 0).collect();
        let second = (0..g.n).filter(|&v| side[v] == 1).collect();
        Ok(Some(Bipartition { first, second }))
    } else {
        Ok(None)
    }
}

fn assign(g: &PerfectionGraph, v: usize, k_left: usize, l_left: usize, side: &mut [u8]) -> bool {
    if v == g.n {
        return true;
    }
    let placed_first = side[..v].iter().filter(|&&x| x == 0).count();
    let k = placed_first + k_left;
    let l = (v - placed_first) + l_left;
    for (s, room, degree) in [(0u8, k_left, l), (1u8, l_left, k)] {
        if room == 0 || g.degree(v) != degree {
            continue;
        }
        side[v] = s;
        if (0..v).all(|u| g.has_edge(u, v) == (side[u] != s)) {
            let (k2, l2) = if s == 0 { (k_left - 1, l_left) } else { (k_left, l_left - 1) };
            if assign(g, v + 1, k2, l2, side) {
                return true;
            }
        }
    }
    false
}

/// True iff every pair `(i, j)` with `i < k <= j` is an edge of `g`.
pub fn has_cross_edges(g: &PerfectionGraph, k: usize) -> bool {
    first_missing_cross_edge(g, k).is_none()
}

/// First pair `(i, j)`, `i < k <= j`, that is not an edge.
pub fn first_missing_cross_edge(g: &PerfectionGraph, k: usize) -> Option<(usize, usize)> {
    (0..k.min(g.n))
        .flat_map(|i| (k..g.n).map(move |j| (i, j)))
        .find(|&(i, j)| !g.has_edge(i, j))
}

/// First edge inside one of the parts `0..k`, `k..n`.
pub fn first_within_part_edge(g: &PerfectionGraph, k: usize) -> Option<(usize, usize)> {
    g.edges().into_iter().find(|&(i, j)| (i < k) == (j < k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Dimension;

    #[test]
    fn directional_graphs() {
        let g = perfection_graph(&Factorization::directional(Dimension::new(3).unwrap()));
        assert_eq!(g.edge_count(), 0);
        let g = perfection_graph(&Factorization::directional(Dimension::new(2).unwrap()));
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(
            is_complete_bipartite(&g, 1, 1).unwrap(),
            Some(Bipartition { first: vec![0], second: vec![1] })
        );
    }

    #[test]
    fn bipartite_certificates() {
        let empty = PerfectionGraph::empty(3).unwrap();
        let b = is_bipartite(&empty);
        assert!(b.is_bipartite() && b.certifies(&empty));

        let triangle = PerfectionGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let b = is_bipartite(&triangle);
        assert!(!b.is_bipartite());
        assert!(b.certifies(&triangle));
        if let Bipartiteness::OddCycle { cycle } = b {
            assert_eq!(cycle.len(), 3);
        }

        let pentagon_tail =
            PerfectionGraph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 2)])
                .unwrap();
        let b = is_bipartite(&pentagon_tail);
        assert!(b.certifies(&pentagon_tail));
        assert!(matches!(b, Bipartiteness::OddCycle { ref cycle } if cycle.len() == 5));

        let c6 = PerfectionGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        assert!(is_bipartite(&c6).certifies(&c6));
        assert!(is_bipartite(&c6).is_bipartite());
    }

    #[test]
    fn complete_bipartite_recognition() {
        let empty = PerfectionGraph::empty(3).unwrap();
        assert_eq!(is_complete_bipartite(&empty, 1, 2).unwrap(), None);
        assert_eq!(is_complete_bipartite(&empty, 0, 3).unwrap().unwrap().second, vec![0, 1, 2]);
        assert!(is_complete_bipartite(&empty, 1, 1).is_err());

        // K_{2,3} with scrambled labels
        let g = PerfectionGraph::from_edges(5, &[(1, 0), (1, 2), (1, 4), (3, 0), (3, 2), (3, 4)]).unwrap();
        let parts = is_complete_bipartite(&g, 2, 3).unwrap().unwrap();
        assert_eq!(parts.first, vec![1, 3]);
        assert_eq!(parts.second, vec![0, 2, 4]);
        let parts = is_complete_bipartite(&g, 3, 2).unwrap().unwrap();
        assert_eq!(parts.first, vec![0, 2, 4]);
        assert_eq!(is_complete_bipartite(&g, 1, 4).unwrap(), None);

        // a 4-cycle is K_{2,2}; a 4-path has the same edge count but is not
        let c4 = PerfectionGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(is_complete_bipartite(&c4, 2, 2).unwrap().is_some());
        let p4 = PerfectionGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        assert_eq!(is_complete_bipartite(&p4, 2, 2).unwrap(), None);
    }

    #[test]
    fn counts_and_degrees() {
        let k22 = PerfectionGraph::complete_bipartite(2, 2).unwrap();
        assert_eq!(k22.edge_count(), 4);
        let k34 = PerfectionGraph::complete_bipartite(3, 4).unwrap();
        assert_eq!(k34.edge_count(), 12);
        assert_eq!(k34.edge_count(), 7 * 7 / 4);
        assert_eq!(k34.degree_sequence(), vec![3, 3, 3, 3, 4, 4, 4]);
        assert_eq!(PerfectionGraph::empty(5).unwrap().edge_count(), 0);
    }

    #[test]
    fn cross_edge_helpers() {
        let g = PerfectionGraph::from_edges(3, &[(0, 2)]).unwrap();
        assert_eq!(first_missing_cross_edge(&g, 1), Some((0, 1)));
        assert_eq!(first_missing_cross_edge(&g, 2), Some((1, 2)));
        let k21 = PerfectionGraph::complete_bipartite(2, 1).unwrap();
        assert!(has_cross_edges(&k21, 2));
        assert_eq!(first_within_part_edge(&k21, 2), None);
        assert_eq!(first_within_part_edge(&k21, 1), Some((1, 2)));
    }

    #[test]
    fn dot_output() {
        let g = PerfectionGraph::complete_bipartite(1, 1).unwrap();
        assert_eq!(g.to_dot(), "graph G {\n  M1;\n  M2;\n  M1 -- M2;\n}\n");
    }
}
