//! Bit-level model of the hypercube `Q_d`.
//!
//! A vertex is a subset of `{1, ..., d}` stored as a `d`-bit integer: element
//! `i` is present iff bit `i - 1` is set. Directions are 1-indexed at the API
//! boundary and converted to bit positions only inside this module.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A vertex of `Q_d`.
pub type Vertex = u32;

/// Largest supported dimension; `2^24` vertex tables still fit comfortably.
pub const MAX_DIMENSION: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("dimension {0} outside 1..={MAX_DIMENSION}")]
    BadDimension(u32),
    #[error("direction {dir} outside 1..={d}")]
    DirectionOutOfRange { dir: u32, d: u32 },
    #[error("vertex {vertex} outside Q_{d}")]
    VertexOutOfRange { vertex: Vertex, d: u32 },
    #[error("vertices {0} and {1} do not span a hypercube edge")]
    NotAnEdge(Vertex, Vertex),
}

/// Number of coordinate directions of a hypercube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(d: u32) -> Result<Self, CubeError> {
        if (1..=MAX_DIMENSION).contains(&d) {
            Ok(Dimension(d))
        } else {
            Err(CubeError::BadDimension(d))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// `2^d`.
    #[inline]
    pub fn vertex_count(self) -> usize {
        1usize << self.0
    }

    /// `d * 2^(d-1)`.
    pub fn edge_count(self) -> usize {
        self.0 as usize * (self.vertex_count() / 2)
    }

    pub fn contains(self, v: Vertex) -> bool {
        (v as usize) < self.vertex_count()
    }

    pub fn check_vertex(self, v: Vertex) -> Result<Vertex, CubeError> {
        if self.contains(v) {
            Ok(v)
        } else {
            Err(CubeError::VertexOutOfRange { vertex: v, d: self.0 })
        }
    }

    pub fn directions(self) -> impl Iterator<Item = Direction> {
        (1..=self.0).map(Direction)
    }

    pub fn vertices(self) -> std::ops::Range<Vertex> {
        0..(1u32 << self.0)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = CubeError;
    fn try_from(d: u32) -> Result<Self, CubeError> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A coordinate direction, 1-indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(u32);

impl Direction {
    pub fn new(dir: u32, d: Dimension) -> Result<Self, CubeError> {
        if dir >= 1 && dir <= d.get() {
            Ok(Direction(dir))
        } else {
            Err(CubeError::DirectionOutOfRange { dir, d: d.get() })
        }
    }

    /// Direction flipping bit position `bit` (0-indexed).
    #[inline]
    pub fn from_bit(bit: u32) -> Self {
        Direction(bit + 1)
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn bit(self) -> u32 {
        self.0 - 1
    }

    #[inline]
    pub fn mask(self) -> Vertex {
        1 << (self.0 - 1)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_even(self) -> bool {
        self == Parity::Even
    }
}

#[inline]
pub fn parity(v: Vertex) -> Parity {
    if v.count_ones().is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

#[inline]
pub fn is_even(v: Vertex) -> bool {
    v.count_ones().is_multiple_of(2)
}

/// Flips coordinate `dir` of `v`.
#[inline]
pub fn neighbor(v: Vertex, dir: Direction) -> Vertex {
    v ^ dir.mask()
}

/// Checked variant of [`neighbor`] for callers holding raw inputs.
pub fn neighbor_in(d: Dimension, v: Vertex, dir: u32) -> Result<Vertex, CubeError> {
    let v = d.check_vertex(v)?;
    Ok(neighbor(v, Direction::new(dir, d)?))
}

/// The direction of the edge `uv`, or `NotAnEdge` if `u` and `v` differ in
/// anything other than exactly one element.
pub fn edge_direction(u: Vertex, v: Vertex) -> Result<Direction, CubeError> {
    let diff = u ^ v;
    if diff.is_power_of_two() {
        Ok(Direction::from_bit(diff.trailing_zeros()))
    } else {
        Err(CubeError::NotAnEdge(u, v))
    }
}

/// Embeds a `Q_k` vertex and a `Q_l` vertex into `Q_{k+l}`: the `Q_k` block
/// occupies directions `1..=k`, the `Q_l` block directions `k+1..=k+l`.
#[inline]
pub fn compose_vertex(low: Vertex, high: Vertex, k: u32) -> Vertex {
    low | (high << k)
}

/// Inverse of [`compose_vertex`].
#[inline]
pub fn decompose_vertex(v: Vertex, k: u32) -> (Vertex, Vertex) {
    (v & low_mask(k), v >> k)
}

/// Checked [`compose_vertex`] for a split of `Q_d` into low block `k`.
pub fn compose_checked(
    low: Vertex,
    high: Vertex,
    k: Dimension,
    l: Dimension,
) -> Result<Vertex, CubeError> {
    k.check_vertex(low)?;
    l.check_vertex(high)?;
    Dimension::new(k.get() + l.get())?;
    Ok(compose_vertex(low, high, k.get()))
}

#[inline]
pub fn low_mask(k: u32) -> Vertex {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// Applies a relabelling of directions to a vertex: coordinate `i` of `v`
/// becomes coordinate `perm[i-1]` of the result (both 1-indexed).
pub fn permute_coordinates(v: Vertex, perm: &[u32]) -> Vertex {
    let mut out = 0;
    for (bit, &target) in perm.iter().enumerate() {
        if v >> bit & 1 == 1 {
            out |= 1 << (target - 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(0), Parity::Even);
        assert_eq!(parity(0b101), Parity::Even);
        assert_eq!(parity(0b010), Parity::Odd);
    }

    #[test]
    fn neighbor_examples() {
        let d = dim(3);
        assert_eq!(neighbor_in(d, 0, 1).unwrap(), 0b001);
        assert_eq!(neighbor_in(d, 0b011, 2).unwrap(), 0b001);
        assert_eq!(neighbor_in(d, 0b100, 3).unwrap(), 0);
        assert_eq!(
            neighbor_in(d, 0, 4),
            Err(CubeError::DirectionOutOfRange { dir: 4, d: 3 })
        );
        assert!(neighbor_in(d, 0, 0).is_err());
    }

    #[test]
    fn edge_direction_examples() {
        assert_eq!(edge_direction(0, 0b010).unwrap().get(), 2);
        assert_eq!(edge_direction(0b001, 0b101).unwrap().get(), 3);
        assert_eq!(edge_direction(0, 0b011), Err(CubeError::NotAnEdge(0, 0b011)));
        assert!(edge_direction(5, 5).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(compose_vertex(0, 0, 3), 0);
        assert_eq!(compose_vertex(0b1, 0b10, 3), 0b10001);
        assert!(compose_checked(8, 0, dim(3), dim(2)).is_err());
        assert!(compose_checked(0, 4, dim(3), dim(2)).is_err());
        for u in 0..8 {
            for v in 0..4 {
                assert_eq!(decompose_vertex(compose_vertex(u, v, 3), 3), (u, v));
            }
        }
    }

    #[test]
    fn dimension_bounds() {
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(25).is_err());
        assert_eq!(dim(24).vertex_count(), 1 << 24);
        assert_eq!(dim(4).edge_count(), 32);
    }

    #[test]
    fn cube_graph_is_connected_bipartite_regular() {
        for d in 1..=6 {
            let d = dim(d);
            let n = d.vertex_count();
            let mut seen = vec![false; n];
            let mut stack = vec![0u32];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                let mut degree = 0;
                for dir in d.directions() {
                    let w = neighbor(v, dir);
                    assert_ne!(w, v);
                    assert_eq!(neighbor(w, dir), v);
                    assert_ne!(parity(v), parity(w));
                    degree += 1;
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
                assert_eq!(degree, d.get());
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn coordinate_permutation_moves_bits() {
        // 1 -> 2 -> 3 -> 1
        let perm = [2, 3, 1];
        assert_eq!(permute_coordinates(0b001, &perm), 0b010);
        assert_eq!(permute_coordinates(0b100, &perm), 0b001);
        assert_eq!(permute_coordinates(0b011, &perm), 0b110);
    }
}
