//! Semi-perfect 1-factorizations of hypercubes.
//!
//! A 1-factorization of `Q_d` is `k`-semi-perfect when, for some split of
//! its factors into `k` and `l = d - k`, every pair taken across the split
//! unions to a Hamilton cycle. Equivalently its perfection graph contains
//! `K_{k,l}`. The crate builds such factorizations, verifies them, computes
//! the sign invariant that rules some of them out, and searches for the
//! cases no construction covers.

pub mod construct;
pub mod cube;
pub mod matching;
pub mod perfection;
pub mod search;
pub mod sign;

pub use construct::{construct_semi_perfect, ConstructError, DirectedHamiltonDecomposition};
pub use cube::{Dimension, Direction, Vertex};
pub use matching::{Factorization, PerfectMatching};
pub use perfection::{perfection_graph, PerfectionGraph};
pub use sign::{factorization_sign, FactorizationSign, SwitchMove};
