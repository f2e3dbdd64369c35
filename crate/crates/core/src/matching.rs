//! Perfect matchings and 1-factorizations of `Q_d`.
//!
//! A matching is stored as its full partner table, so `M(v)` is a lookup and
//! the union of two matchings can be walked without building adjacency lists.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{
    compose_vertex, decompose_vertex, low_mask, permute_coordinates,
    CubeError, Dimension, Direction, Vertex,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error("partner table has length {found}, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("vertex {0} is matched to itself")]
    FixedPoint(Vertex),
    #[error("partner table is not an involution at vertex {0}")]
    NotInvolution(Vertex),
    #[error("pair ({0}, {1}) is not a hypercube edge")]
    NotHypercubeEdge(Vertex, Vertex),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("matchings share the edge ({0}, {1})")]
    SharedEdge(Vertex, Vertex),
    #[error("edge ({0}, {1}) leaves the subcube")]
    EscapingEdge(Vertex, Vertex),
    #[error("expected {expected} factors, found {found}")]
    WrongFactorCount { expected: usize, found: usize },
    #[error("factors {first} and {second} share the edge ({u}, {v})")]
    OverlappingFactors {
        first: usize,
        second: usize,
        u: Vertex,
        v: Vertex,
    },
    #[error("expected {expected} subcube parts, found {found}")]
    MissingCopy { expected: usize, found: usize },
    #[error("split {k} is not inside 1..{d}")]
    BadSplit { k: u32, d: u32 },
    #[error("malformed factorization JSON: {0}")]
    Json(String),
}

/// A perfect matching of `Q_d` given by its partner map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerfectMatching {
    dim: Dimension,
    partner: Vec<Vertex>,
}

impl PerfectMatching {
    /// Validates the partner table: full length, fixed-point free,
    /// involutive, and every pair a hypercube edge.
    pub fn from_partners(dim: Dimension, partner: Vec<Vertex>) -> Result<Self, MatchingError> {
        let n = dim.vertex_count();
        if partner.len() != n {
            return Err(MatchingError::WrongLength {
                expected: n,
                found: partner.len(),
            });
        }
        for (v, &p) in partner.iter().enumerate() {
            let v = v as Vertex;
            dim.check_vertex(p)?;
            if p == v {
                return Err(MatchingError::FixedPoint(v));
            }
            if partner[p as usize] != v {
                return Err(MatchingError::NotInvolution(v));
            }
            if !(v ^ p).is_power_of_two() {
                return Err(MatchingError::NotHypercubeEdge(v, p));
            }
        }
        Ok(PerfectMatching { dim, partner })
    }

    pub(crate) fn from_partners_unchecked(dim: Dimension, partner: Vec<Vertex>) -> Self {
        debug_assert!(PerfectMatching::from_partners(dim, partner.clone()).is_ok());
        PerfectMatching { dim, partner }
    }

    /// `D_i`: every edge in direction `dir`.
    pub fn directional(dim: Dimension, dir: Direction) -> Result<Self, MatchingError> {
        let dir = Direction::new(dir.get(), dim)?;
        let partner = dim.vertices().map(|v| v ^ dir.mask()).collect();
        Ok(PerfectMatching { dim, partner })
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    #[inline]
    pub fn partner(&self, v: Vertex) -> Vertex {
        self.partner[v as usize]
    }

    pub fn partners(&self) -> &[Vertex] {
        &self.partner
    }

    pub(crate) fn partners_mut(&mut self) -> &mut [Vertex] {
        &mut self.partner
    }

    /// Direction of the matching edge at `v`.
    pub fn direction_at(&self, v: Vertex) -> Direction {
        Direction::from_bit((v ^ self.partner(v)).trailing_zeros())
    }

    /// Edges as `(smaller, larger)` pairs, sorted by smaller endpoint.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(v, &p)| (v as Vertex) < p)
            .map(|(v, &p)| (v as Vertex, p))
            .collect()
    }

    pub fn contains_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.dim.contains(u) && self.partner(u) == v
    }

    /// True iff every edge of the matching lies in a direction from `dirs`.
    pub fn uses_only_directions(&self, dirs: std::ops::RangeInclusive<u32>) -> bool {
        self.partner
            .iter()
            .enumerate()
            .all(|(v, &p)| dirs.contains(&((v as Vertex ^ p).trailing_zeros() + 1)))
    }

    /// Relabels coordinates; see [`permute_coordinates`].
    pub fn permute_coordinates(&self, perm: &[u32]) -> PerfectMatching {
        let mut partner = vec![0; self.partner.len()];
        for (v, &p) in self.partner.iter().enumerate() {
            partner[permute_coordinates(v as Vertex, perm) as usize] = permute_coordinates(p, perm);
        }
        PerfectMatching::from_partners_unchecked(self.dim, partner)
    }

    fn same_dim(&self, other: &PerfectMatching) -> Result<(), MatchingError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(MatchingError::DimensionMismatch(self.dim.get(), other.dim.get()))
        }
    }
}

/// Vertex-disjoint cycles making up the union of two disjoint matchings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStructure {
    /// Each cycle starts at its smallest vertex and follows the first matching.
    pub cycles: Vec<Vec<Vertex>>,
}

impl CycleStructure {
    /// Sorted cycle lengths (vertex counts).
    pub fn lengths(&self) -> Vec<usize> {
        let mut lengths: Vec<usize> = self.cycles.iter().map(Vec::len).collect();
        lengths.sort_unstable();
        lengths
    }

    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    pub fn longest(&self) -> usize {
        self.cycles.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Decomposes `M ∪ N` into its alternating cycles.
pub fn union_cycles(m: &PerfectMatching, n: &PerfectMatching) -> Result<CycleStructure, MatchingError> {
    m.same_dim(n)?;
    if let Some(v) = (0..m.partner.len()).find(|&v| m.partner[v] == n.partner[v]) {
        let v = v as Vertex;
        let p = m.partner(v);
        return Err(MatchingError::SharedEdge(v.min(p), v.max(p)));
    }
    let mut visited = vec![false; m.partner.len()];
    let mut cycles = Vec::new();
    for start in m.dim.vertices() {
        if visited[start as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        loop {
            visited[v as usize] = true;
            cycle.push(v);
            let w = m.partner(v);
            visited[w as usize] = true;
            cycle.push(w);
            v = n.partner(w);
            if v == start {
                break;
            }
        }
        cycles.push(cycle);
    }
    Ok(CycleStructure { cycles })
}

/// Counts the cycles of `M ∪ N` without materializing them.
pub(crate) fn union_cycle_stats(m: &[Vertex], n: &[Vertex], scratch: &mut Vec<bool>) -> (usize, usize) {
    scratch.clear();
    scratch.resize(m.len(), false);
    let mut count = 0;
    let mut longest = 0;
    for start in 0..m.len() {
        if scratch[start] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        loop {
            scratch[v] = true;
            let w = m[v] as usize;
            scratch[w] = true;
            len += 2;
            v = n[w] as usize;
            if v == start {
                break;
            }
        }
        count += 1;
        longest = longest.max(len);
    }
    (count, longest)
}

/// True iff `M ∪ N` is a single Hamilton cycle.
pub fn is_hamilton_pair(m: &PerfectMatching, n: &PerfectMatching) -> Result<bool, MatchingError> {
    m.same_dim(n)?;
    if let Some(v) = (0..m.partner.len()).find(|&v| m.partner[v] == n.partner[v]) {
        let v = v as Vertex;
        let p = m.partner(v);
        return Err(MatchingError::SharedEdge(v.min(p), v.max(p)));
    }
    Ok(hamilton_walk(&m.partner, &n.partner))
}

#[inline]
pub(crate) fn hamilton_walk(m: &[Vertex], n: &[Vertex]) -> bool {
    let total = m.len();
    let mut v = 0usize;
    let mut len = 0;
    loop {
        v = n[m[v] as usize] as usize;
        len += 2;
        if v == 0 {
            return len == total;
        }
    }
}

/// Restricts `M` to the copy of `Q_k` whose high coordinates equal `fixed_high`.
pub fn restrict_to_subcube(
    m: &PerfectMatching,
    fixed_high: Vertex,
    k: u32,
) -> Result<PerfectMatching, MatchingError> {
    let d = m.dim.get();
    if k == 0 || k > d {
        return Err(MatchingError::BadSplit { k, d });
    }
    let sub = Dimension::new(k)?;
    if fixed_high > low_mask(d - k) {
        return Err(CubeError::VertexOutOfRange { vertex: fixed_high, d: d - k }.into());
    }
    let mut partner = Vec::with_capacity(sub.vertex_count());
    for low in sub.vertices() {
        let v = compose_vertex(low, fixed_high, k);
        let p = m.partner(v);
        let (p_low, p_high) = decompose_vertex(p, k);
        if p_high != fixed_high {
            return Err(MatchingError::EscapingEdge(v, p));
        }
        partner.push(p_low);
    }
    Ok(PerfectMatching::from_partners_unchecked(sub, partner))
}

/// Restricts `M` to the copy of `Q_{d-k}` whose low `k` coordinates equal
/// `fixed_low`.
pub fn restrict_to_high_subcube(
    m: &PerfectMatching,
    fixed_low: Vertex,
    k: u32,
) -> Result<PerfectMatching, MatchingError> {
    let d = m.dim.get();
    if k >= d {
        return Err(MatchingError::BadSplit { k, d });
    }
    let sub = Dimension::new(d - k)?;
    if fixed_low > low_mask(k) {
        return Err(CubeError::VertexOutOfRange { vertex: fixed_low, d: k }.into());
    }
    let mut partner = Vec::with_capacity(sub.vertex_count());
    for high in sub.vertices() {
        let v = compose_vertex(fixed_low, high, k);
        let p = m.partner(v);
        let (p_low, p_high) = decompose_vertex(p, k);
        if p_low != fixed_low {
            return Err(MatchingError::EscapingEdge(v, p));
        }
        partner.push(p_high);
    }
    Ok(PerfectMatching::from_partners_unchecked(sub, partner))
}

/// Builds a matching of `Q_d` acting in directions `1..=k`: on the copy of
/// `Q_k` with high coordinates `h` it agrees with `parts[h]`.
pub fn assemble_low_block(
    d: Dimension,
    k: u32,
    parts: &[&PerfectMatching],
) -> Result<PerfectMatching, MatchingError> {
    if k == 0 || k > d.get() {
        return Err(MatchingError::BadSplit { k, d: d.get() });
    }
    let copies = 1usize << (d.get() - k);
    if parts.len() != copies {
        return Err(MatchingError::MissingCopy {
            expected: copies,
            found: parts.len(),
        });
    }
    if let Some(p) = parts.iter().find(|p| p.dim.get() != k) {
        return Err(MatchingError::DimensionMismatch(p.dim.get(), k));
    }
    let partner = d
        .vertices()
        .map(|v| {
            let (low, high) = decompose_vertex(v, k);
            compose_vertex(parts[high as usize].partner(low), high, k)
        })
        .collect();
    Ok(PerfectMatching::from_partners_unchecked(d, partner))
}

/// Builds a matching of `Q_d` acting in directions `k+1..=d`: on the copy of
/// `Q_{d-k}` with low coordinates `u` it agrees with `parts[u]`.
pub fn assemble_high_block(
    d: Dimension,
    k: u32,
    parts: &[&PerfectMatching],
) -> Result<PerfectMatching, MatchingError> {
    if k >= d.get() {
        return Err(MatchingError::BadSplit { k, d: d.get() });
    }
    let copies = 1usize << k;
    if parts.len() != copies {
        return Err(MatchingError::MissingCopy {
            expected: copies,
            found: parts.len(),
        });
    }
    let l = d.get() - k;
    if let Some(p) = parts.iter().find(|p| p.dim.get() != l) {
        return Err(MatchingError::DimensionMismatch(p.dim.get(), l));
    }
    let partner = d
        .vertices()
        .map(|v| {
            let (low, high) = decompose_vertex(v, k);
            compose_vertex(low, parts[low as usize].partner(high), k)
        })
        .collect();
    Ok(PerfectMatching::from_partners_unchecked(d, partner))
}

/// An ordered partition of `E(Q_d)` into `d` perfect matchings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    dim: Dimension,
    factors: Vec<PerfectMatching>,
}

impl Factorization {
    /// Validates that there are `d` factors of dimension `d`, pairwise
    /// edge-disjoint. Disjointness plus the count implies covering.
    pub fn new(dim: Dimension, factors: Vec<PerfectMatching>) -> Result<Self, MatchingError> {
        let d = dim.get() as usize;
        if factors.len() != d {
            return Err(MatchingError::WrongFactorCount {
                expected: d,
                found: factors.len(),
            });
        }
        for f in &factors {
            if f.dim != dim {
                return Err(MatchingError::DimensionMismatch(f.dim.get(), dim.get()));
            }
        }
        // at each vertex the d factors must use d distinct directions
        let mut owner = vec![usize::MAX; d];
        for v in dim.vertices() {
            owner.fill(usize::MAX);
            for (i, f) in factors.iter().enumerate() {
                let bit = f.direction_at(v).bit() as usize;
                if owner[bit] != usize::MAX {
                    return Err(MatchingError::OverlappingFactors {
                        first: owner[bit],
                        second: i,
                        u: v.min(f.partner(v)),
                        v: v.max(f.partner(v)),
                    });
                }
                owner[bit] = i;
            }
        }
        Ok(Factorization { dim, factors })
    }

    pub(crate) fn new_unchecked(dim: Dimension, factors: Vec<PerfectMatching>) -> Self {
        debug_assert!(Factorization::new(dim, factors.clone()).is_ok());
        Factorization { dim, factors }
    }

    /// `{D_1, ..., D_d}` in direction order.
    pub fn directional(dim: Dimension) -> Self {
        let factors = dim
            .directions()
            .map(|dir| PerfectMatching::directional(dim, dir).expect("direction in range"))
            .collect();
        Factorization { dim, factors }
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn factors(&self) -> &[PerfectMatching] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &PerfectMatching {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub(crate) fn factors_mut(&mut self) -> &mut [PerfectMatching] {
        &mut self.factors
    }

    pub fn into_factors(self) -> Vec<PerfectMatching> {
        self.factors
    }

    /// Table of which factor owns each edge, indexed by `v * d + bit`. Both
    /// endpoints of an edge carry the same owner.
    pub fn edge_owner(&self) -> Vec<u8> {
        let d = self.dim.get() as usize;
        let mut owner = vec![0u8; self.dim.vertex_count() * d];
        for (i, f) in self.factors.iter().enumerate() {
            for v in self.dim.vertices() {
                owner[v as usize * d + f.direction_at(v).bit() as usize] = i as u8;
            }
        }
        owner
    }

    /// Reorders factors: the result's factor `i` is `self.factor(order[i])`.
    pub fn reordered(&self, order: &[usize]) -> Result<Factorization, MatchingError> {
        let factors = order.iter().map(|&i| self.factors[i].clone()).collect();
        Factorization::new(self.dim, factors)
    }

    /// Applies a relabelling of coordinates to every factor.
    pub fn permute_coordinates(&self, perm: &[u32]) -> Factorization {
        let factors = self.factors.iter().map(|f| f.permute_coordinates(perm)).collect();
        Factorization::new_unchecked(self.dim, factors)
    }

    /// Factors sorted by partner table; identifies the unordered partition.
    pub fn canonical_unordered(&self) -> Factorization {
        let mut factors = self.factors.clone();
        factors.sort();
        Factorization {
            dim: self.dim,
            factors,
        }
    }

    /// Every edge exactly once, as `(factor, smaller, larger)`.
    pub fn all_edges(&self) -> Vec<(usize, Vertex, Vertex)> {
        self.factors
            .iter()
            .enumerate()
            .flat_map(|(i, f)| f.edges().into_iter().map(move |(u, v)| (i, u, v)))
            .collect()
    }

    pub fn to_json_value(&self) -> FactorizationJson {
        FactorizationJson {
            d: self.dim.get(),
            factors: self.factors.iter().map(|f| f.partner.clone()).collect(),
        }
    }

    /// Canonical JSON text: `{"d":..,"factors":[[..],..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MatchingError> {
        let raw: FactorizationJson =
            serde_json::from_str(text).map_err(|e| MatchingError::Json(e.to_string()))?;
        Factorization::try_from(raw)
    }
}

/// Wire form of a factorization: dimension plus one partner table per factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub d: u32,
    pub factors: Vec<Vec<Vertex>>,
}

impl TryFrom<FactorizationJson> for Factorization {
    type Error = MatchingError;

    fn try_from(raw: FactorizationJson) -> Result<Self, MatchingError> {
        let dim = Dimension::new(raw.d)?;
        let factors = raw
            .factors
            .into_iter()
            .map(|p| PerfectMatching::from_partners(dim, p))
            .collect::<Result<Vec<_>, _>>()?;
        Factorization::new(dim, factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn dir(i: u32) -> Direction {
        Direction::from_bit(i - 1)
    }

    #[test]
    fn directional_tables() {
        let m = PerfectMatching::directional(dim(2), dir(1)).unwrap();
        assert_eq!(m.partners(), &[1, 0, 3, 2]);
        let m = PerfectMatching::directional(dim(3), dir(3)).unwrap();
        for v in 0..8 {
            assert_eq!(m.partner(v), v ^ 4);
        }
        assert!(PerfectMatching::directional(dim(2), dir(3)).is_err());
    }

    #[test]
    fn rejects_bad_tables() {
        let d = dim(2);
        assert_eq!(
            PerfectMatching::from_partners(d, vec![1, 0, 3]),
            Err(MatchingError::WrongLength { expected: 4, found: 3 })
        );
        assert_eq!(
            PerfectMatching::from_partners(d, vec![0, 1, 3, 2]),
            Err(MatchingError::FixedPoint(0))
        );
        assert_eq!(
            PerfectMatching::from_partners(d, vec![1, 2, 3, 0]),
            Err(MatchingError::NotInvolution(0))
        );
        assert_eq!(
            PerfectMatching::from_partners(d, vec![3, 2, 1, 0]),
            Err(MatchingError::NotHypercubeEdge(0, 3))
        );
        assert!(PerfectMatching::from_partners(d, vec![1, 0, 3, 9]).is_err());
    }

    #[test]
    fn directional_union_cycles() {
        let d3 = dim(3);
        let d1 = PerfectMatching::directional(d3, dir(1)).unwrap();
        let d2 = PerfectMatching::directional(d3, dir(2)).unwrap();
        assert_eq!(union_cycles(&d1, &d2).unwrap().lengths(), vec![4, 4]);
        assert!(!is_hamilton_pair(&d1, &d2).unwrap());

        let q2 = dim(2);
        let a = PerfectMatching::directional(q2, dir(1)).unwrap();
        let b = PerfectMatching::directional(q2, dir(2)).unwrap();
        assert_eq!(union_cycles(&a, &b).unwrap().lengths(), vec![4]);
        assert!(is_hamilton_pair(&a, &b).unwrap());
    }

    #[test]
    fn union_of_d_i_d_j_is_all_four_cycles() {
        for d in 2..=7 {
            let f = Factorization::directional(dim(d));
            for i in 0..d as usize {
                for j in i + 1..d as usize {
                    let c = union_cycles(f.factor(i), f.factor(j)).unwrap();
                    assert_eq!(c.lengths(), vec![4; 1 << (d - 2)]);
                }
            }
        }
    }

    #[test]
    fn shared_edges_and_dimension_mismatch() {
        let m = PerfectMatching::directional(dim(3), dir(1)).unwrap();
        assert_eq!(union_cycles(&m, &m), Err(MatchingError::SharedEdge(0, 1)));
        let other = PerfectMatching::directional(dim(2), dir(2)).unwrap();
        assert_eq!(
            union_cycles(&m, &other),
            Err(MatchingError::DimensionMismatch(3, 2))
        );
    }

    #[test]
    fn factorization_validation() {
        let f = Factorization::directional(dim(4));
        assert_eq!(f.all_edges().len(), dim(4).edge_count());
        let mut factors = f.clone().into_factors();
        factors[1] = factors[0].clone();
        assert!(matches!(
            Factorization::new(dim(4), factors.clone()),
            Err(MatchingError::OverlappingFactors { first: 0, second: 1, .. })
        ));
        factors.pop();
        assert!(matches!(
            Factorization::new(dim(4), factors),
            Err(MatchingError::WrongFactorCount { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let f = Factorization::directional(dim(2));
        let text = f.to_json();
        assert_eq!(text, r#"{"d":2,"factors":[[1,0,3,2],[2,3,0,1]]}"#);
        assert_eq!(Factorization::from_json(&text).unwrap(), f);
        assert!(Factorization::from_json(r#"{"d":2,"factors":[[1,0,3,2],[1,0,3,2]]}"#).is_err());
        assert!(Factorization::from_json(r#"{"d":2,"factors":[[1,0,3,2]]}"#).is_err());
        assert!(Factorization::from_json(r#"{"d":0,"factors":[]}"#).is_err());
        assert!(Factorization::from_json("not json").is_err());
    }

    #[test]
    fn restriction() {
        let d5 = dim(5);
        let d1 = PerfectMatching::directional(d5, dir(1)).unwrap();
        for high in 0..4 {
            let r = restrict_to_subcube(&d1, high, 3).unwrap();
            assert_eq!(r, PerfectMatching::directional(dim(3), dir(1)).unwrap());
        }
        let d4 = PerfectMatching::directional(d5, dir(4)).unwrap();
        assert!(matches!(
            restrict_to_subcube(&d4, 0, 3),
            Err(MatchingError::EscapingEdge(0, 8))
        ));
        let r = restrict_to_high_subcube(&d4, 5, 3).unwrap();
        assert_eq!(r, PerfectMatching::directional(dim(2), dir(1)).unwrap());
        assert!(restrict_to_high_subcube(&d1, 0, 3).is_err());
    }

    #[test]
    fn assembly_from_identical_parts_is_directional() {
        let q3 = dim(3);
        let part = PerfectMatching::directional(q3, dir(1)).unwrap();
        let parts = vec![&part; 4];
        let m = assemble_low_block(dim(5), 3, &parts).unwrap();
        assert_eq!(m, PerfectMatching::directional(dim(5), dir(1)).unwrap());
        assert!(matches!(
            assemble_low_block(dim(5), 3, &parts[..3]),
            Err(MatchingError::MissingCopy { expected: 4, found: 3 })
        ));

        let high_part = PerfectMatching::directional(dim(2), dir(2)).unwrap();
        let parts = vec![&high_part; 8];
        let m = assemble_high_block(dim(5), 3, &parts).unwrap();
        assert_eq!(m, PerfectMatching::directional(dim(5), dir(5)).unwrap());
        assert!(matches!(
            assemble_high_block(dim(5), 3, &[&part; 8]),
            Err(MatchingError::DimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn assemble_then_restrict_recovers_parts() {
        let q2 = dim(2);
        let a = PerfectMatching::directional(q2, dir(1)).unwrap();
        let b = PerfectMatching::directional(q2, dir(2)).unwrap();
        let parts = vec![&a, &b, &b, &a];
        let m = assemble_low_block(dim(4), 2, &parts).unwrap();
        for (high, part) in parts.iter().enumerate() {
            assert_eq!(&&restrict_to_subcube(&m, high as u32, 2).unwrap(), part);
        }
        let m = assemble_high_block(dim(4), 2, &parts).unwrap();
        for (low, part) in parts.iter().enumerate() {
            assert_eq!(&&restrict_to_high_subcube(&m, low as u32, 2).unwrap(), part);
        }
    }
}
