//! Permutation parity of factorizations and the sign-preserving switch.
//!
//! Two perfect matchings `M`, `N` of `Q_d` induce a permutation of the even
//! vertices, `x ↦ N(M(x))`. The sign of a factorization is the product of the
//! signs of these permutations over all unordered factor pairs. A switch
//! recolors a 4-cycle whose opposite edges lie in two factors, and leaves
//! the sign unchanged.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{compose_vertex, is_even, Dimension, Direction, Vertex};
use crate::matching::{
    restrict_to_high_subcube, restrict_to_subcube, Factorization, MatchingError, PerfectMatching,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("square at {anchor} in directions {a},{b} is not switchable between factors {s} and {t}")]
    NotSwitchable {
        anchor: Vertex,
        a: u32,
        b: u32,
        s: usize,
        t: usize,
    },
    #[error("factorization is not direction respecting with split {0}")]
    NotDirectionRespecting(u32),
    #[error("block of dimension {0} is too large for switch-path search (limit 3)")]
    BlockTooLarge(u32),
    #[error("switch path search failed to reach the target block factorization")]
    Unreachable,
}

/// Rank of an even vertex among the even vertices in increasing order.
#[inline]
pub fn even_rank(v: Vertex) -> usize {
    debug_assert!(is_even(v));
    (v >> 1) as usize
}

/// Inverse of [`even_rank`].
#[inline]
pub fn even_unrank(r: usize) -> Vertex {
    let w = r as Vertex;
    (w << 1) | (w.count_ones() & 1)
}

/// A permutation of the `2^(d-1)` even vertices, indexed by rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvenPermutation {
    map: Vec<u32>,
}

impl EvenPermutation {
    pub fn from_ranks(map: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x as usize >= map.len() || std::mem::replace(&mut seen[x as usize], true) {
                return None;
            }
        }
        Some(EvenPermutation { map })
    }

    pub fn identity(n: usize) -> Self {
        EvenPermutation {
            map: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Image of an even vertex.
    pub fn apply(&self, v: Vertex) -> Vertex {
        even_unrank(self.map[even_rank(v)] as usize)
    }

    pub fn ranks(&self) -> &[u32] {
        &self.map
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &EvenPermutation) -> EvenPermutation {
        EvenPermutation {
            map: other.map.iter().map(|&x| self.map[x as usize]).collect(),
        }
    }

    /// Cycle lengths, sorted.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.map.len()];
        let mut lengths = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.map[x] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        lengths
    }
}

/// `x ↦ N(M(x))` on the even vertices.
pub fn pair_permutation(m: &PerfectMatching, n: &PerfectMatching) -> Result<EvenPermutation, SignError> {
    if m.dim() != n.dim() {
        return Err(MatchingError::DimensionMismatch(m.dim().get(), n.dim().get()).into());
    }
    let half = m.dim().vertex_count() / 2;
    let map = (0..half)
        .map(|r| even_rank(n.partner(m.partner(even_unrank(r)))) as u32)
        .collect();
    Ok(EvenPermutation { map })
}

/// `(-1)^(n - cycles)`.
pub fn permutation_sign(p: &EvenPermutation) -> i8 {
    let n = p.len();
    let cycles = p.cycle_type().len();
    if (n - cycles).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn pair_sign(m: &[Vertex], n: &[Vertex], seen: &mut Vec<bool>) -> i8 {
    // cycles of the even-vertex permutation, walked directly on the tables
    seen.clear();
    seen.resize(m.len(), false);
    let mut parity = 0usize;
    for start in (0..m.len() as Vertex).filter(|&v| is_even(v)) {
        if seen[start as usize] {
            continue;
        }
        let mut x = start;
        let mut len = 0;
        while !seen[x as usize] {
            seen[x as usize] = true;
            x = n[m[x as usize] as usize];
            len += 1;
        }
        parity += len - 1;
    }
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `±1`, the product of pair-permutation signs over all `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum FactorizationSign {
    Plus,
    Minus,
}

impl FactorizationSign {
    pub fn from_i8(s: i8) -> Option<Self> {
        match s {
            1 => Some(FactorizationSign::Plus),
            -1 => Some(FactorizationSign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            FactorizationSign::Plus => 1,
            FactorizationSign::Minus => -1,
        }
    }

    /// `(-1)^e`.
    pub fn power(e: usize) -> Self {
        if e.is_multiple_of(2) {
            FactorizationSign::Plus
        } else {
            FactorizationSign::Minus
        }
    }
}

impl From<FactorizationSign> for i8 {
    fn from(s: FactorizationSign) -> i8 {
        s.value()
    }
}

impl TryFrom<i8> for FactorizationSign {
    type Error = String;
    fn try_from(s: i8) -> Result<Self, String> {
        FactorizationSign::from_i8(s).ok_or_else(|| format!("sign must be 1 or -1, got {s}"))
    }
}

pub fn factorization_sign(f: &Factorization) -> FactorizationSign {
    let mut seen = Vec::new();
    let mut negatives = 0;
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            if pair_sign(f.factor(i).partners(), f.factor(j).partners(), &mut seen) < 0 {
                negatives += 1;
            }
        }
    }
    FactorizationSign::power(negatives)
}

/// A 4-cycle `{x, x+a, x+b, x+a+b}` together with the two factors that hold
/// its opposite edge pairs. Factor indices are 0-based positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SwitchMove {
    /// Smaller of the square's two even vertices.
    pub anchor: Vertex,
    /// Directions spanning the square, `dirs[0] < dirs[1]`.
    pub dirs: [u32; 2],
    pub s: usize,
    pub t: usize,
}

impl SwitchMove {
    /// Canonical move for the square through `v` spanned by directions
    /// `a != b`, between factors `s != t`.
    pub fn on_square(v: Vertex, a: Direction, b: Direction, s: usize, t: usize) -> Self {
        let span = a.mask() | b.mask();
        let x = if is_even(v) { v } else { v ^ a.mask() };
        let anchor = x.min(x ^ span);
        let (a, b) = (a.get().min(b.get()), a.get().max(b.get()));
        SwitchMove {
            anchor,
            dirs: [a, b],
            s: s.min(t),
            t: s.max(t),
        }
    }

    /// Vertices `[x, x+a, x+a+b, x+b]` in cyclic order.
    pub fn square(&self) -> [Vertex; 4] {
        let (ma, mb) = self.masks();
        let x = self.anchor;
        [x, x ^ ma, x ^ ma ^ mb, x ^ mb]
    }

    fn masks(&self) -> (Vertex, Vertex) {
        (1 << (self.dirs[0] - 1), 1 << (self.dirs[1] - 1))
    }

    fn not_switchable(&self) -> SignError {
        SignError::NotSwitchable {
            anchor: self.anchor,
            a: self.dirs[0],
            b: self.dirs[1],
            s: self.s,
            t: self.t,
        }
    }
}

/// Every square of `Q_d` whose two direction-`a` edges share a factor and
/// whose two direction-`b` edges share another factor; each square once.
pub fn find_switchable_squares(f: &Factorization) -> Vec<SwitchMove> {
    let mut out = Vec::new();
    let owner = f.edge_owner();
    collect_switchable(f.dim(), &owner, &mut out);
    out
}

pub(crate) fn collect_switchable(dim: Dimension, owner: &[u8], out: &mut Vec<SwitchMove>) {
    out.clear();
    let d = dim.get() as usize;
    for x in dim.vertices().filter(|&x| is_even(x)) {
        for a in 0..d {
            for b in a + 1..d {
                let span = (1 << a) | (1 << b);
                if x > x ^ span {
                    continue;
                }
                let p = owner[x as usize * d + a];
                let q = owner[x as usize * d + b];
                if owner[(x ^ 1 << b) as usize * d + a] == p && owner[(x ^ 1 << a) as usize * d + b] == q {
                    out.push(SwitchMove {
                        anchor: x,
                        dirs: [a as u32 + 1, b as u32 + 1],
                        s: p.min(q) as usize,
                        t: p.max(q) as usize,
                    });
                }
            }
        }
    }
}

/// Returns the factorization with factors `s` and `t` exchanged on the square.
pub fn apply_switch(f: &Factorization, mv: &SwitchMove) -> Result<Factorization, SignError> {
    let mut out = f.clone();
    apply_switch_in_place(&mut out, mv)?;
    Ok(out)
}

pub fn apply_switch_in_place(f: &mut Factorization, mv: &SwitchMove) -> Result<(), SignError> {
    let d = f.dim().get();
    let n = f.len();
    if mv.s == mv.t
        || mv.s >= n
        || mv.t >= n
        || mv.dirs[0] == mv.dirs[1]
        || mv.dirs.iter().any(|&x| x == 0 || x > d)
        || !f.dim().contains(mv.anchor)
        || !is_even(mv.anchor)
    {
        return Err(mv.not_switchable());
    }
    let [x, xa, xab, xb] = mv.square();
    let (fs, ft) = (f.factor(mv.s), f.factor(mv.t));
    let a_in_s = fs.partner(x) == xa && fs.partner(xb) == xab && ft.partner(x) == xb && ft.partner(xa) == xab;
    let a_in_t = ft.partner(x) == xa && ft.partner(xb) == xab && fs.partner(x) == xb && fs.partner(xa) == xab;
    if !(a_in_s || a_in_t) {
        return Err(mv.not_switchable());
    }
    let (lo, hi) = (mv.s.min(mv.t), mv.s.max(mv.t));
    let (left, right) = f.factors_mut().split_at_mut(hi);
    let (ms, mt) = (left[lo].partners_mut(), right[0].partners_mut());
    for v in [x, xa, xab, xb] {
        std::mem::swap(&mut ms[v as usize], &mut mt[v as usize]);
    }
    Ok(())
}

/// Applies `moves` in order to the directional factorization of `Q_d`.
pub fn replay_switches(dim: Dimension, moves: &[SwitchMove]) -> Result<Factorization, SignError> {
    let mut f = Factorization::directional(dim);
    for mv in moves {
        apply_switch_in_place(&mut f, mv)?;
    }
    Ok(f)
}

/// True iff the first `k` factors use only directions `1..=k` and the rest
/// only directions `k+1..=d`.
pub fn is_direction_respecting(f: &Factorization, k: u32) -> bool {
    let d = f.dim().get();
    if k == 0 || k >= d {
        return false;
    }
    f.factors().iter().enumerate().all(|(i, m)| {
        if (i as u32) < k {
            m.uses_only_directions(1..=k)
        } else {
            m.uses_only_directions(k + 1..=d)
        }
    })
}

/// Breadth-first tree over the ordered factorizations of a small cube
/// reachable from the directional one, with switches as edges.
#[derive(Debug, Clone)]
pub struct SwitchSpace {
    dim: Dimension,
    nodes: Vec<Factorization>,
    index: HashMap<Factorization, usize>,
    parent: Vec<Option<(usize, SwitchMove)>>,
}

impl SwitchSpace {
    pub fn explore(dim: Dimension) -> Result<Self, SignError> {
        if dim.get() > 3 {
            return Err(SignError::BlockTooLarge(dim.get()));
        }
        let root = Factorization::directional(dim);
        let mut space = SwitchSpace {
            dim,
            nodes: vec![root.clone()],
            index: HashMap::from([(root, 0)]),
            parent: vec![None],
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let here = space.nodes[i].clone();
            for mv in find_switchable_squares(&here) {
                let next = apply_switch(&here, &mv)?;
                if !space.index.contains_key(&next) {
                    let j = space.nodes.len();
                    space.index.insert(next.clone(), j);
                    space.nodes.push(next);
                    space.parent.push(Some((i, mv)));
                    queue.push_back(j);
                }
            }
        }
        Ok(space)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Number of reachable ordered factorizations.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Factorization] {
        &self.nodes
    }

    /// A shortest switch sequence from the directional factorization.
    pub fn path_to(&self, target: &Factorization) -> Option<Vec<SwitchMove>> {
        let mut i = *self.index.get(target)?;
        let mut moves = Vec::new();
        while let Some((p, mv)) = self.parent[i] {
            moves.push(mv);
            i = p;
        }
        moves.reverse();
        Some(moves)
    }
}

/// Switches turning the directional factorization of `Q_d` into `f`, found
/// copy by copy: each `Q_k` copy of the first `k` factors and each `Q_{d-k}`
/// copy of the rest is reached by a shortest path in its [`SwitchSpace`].
pub fn derive_switch_sequence(f: &Factorization, k: u32) -> Result<Vec<SwitchMove>, SignError> {
    let d = f.dim().get();
    if !is_direction_respecting(f, k) {
        return Err(SignError::NotDirectionRespecting(k));
    }
    let l = d - k;
    if k > 3 || l > 3 {
        return Err(SignError::BlockTooLarge(k.max(l)));
    }
    let low_space = SwitchSpace::explore(Dimension::new(k).map_err(MatchingError::from)?)?;
    let high_space = SwitchSpace::explore(Dimension::new(l).map_err(MatchingError::from)?)?;
    let kk = k as usize;
    let mut moves = Vec::new();

    for high in 0..1u32 << l {
        let parts = f.factors()[..kk]
            .iter()
            .map(|m| restrict_to_subcube(m, high, k))
            .collect::<Result<Vec<_>, _>>()?;
        let block = Factorization::new(low_space.dim(), parts)?;
        let path = low_space.path_to(&block).ok_or(SignError::Unreachable)?;
        moves.extend(path.into_iter().map(|mv| {
            SwitchMove::on_square(
                compose_vertex(mv.anchor, high, k),
                Direction::from_bit(mv.dirs[0] - 1),
                Direction::from_bit(mv.dirs[1] - 1),
                mv.s,
                mv.t,
            )
        }));
    }
    for low in 0..1u32 << k {
        let parts = f.factors()[kk..]
            .iter()
            .map(|m| restrict_to_high_subcube(m, low, k))
            .collect::<Result<Vec<_>, _>>()?;
        let block = Factorization::new(high_space.dim(), parts)?;
        let path = high_space.path_to(&block).ok_or(SignError::Unreachable)?;
        moves.extend(path.into_iter().map(|mv| {
            SwitchMove::on_square(
                compose_vertex(low, mv.anchor, k),
                Direction::from_bit(mv.dirs[0] - 1 + k),
                Direction::from_bit(mv.dirs[1] - 1 + k),
                mv.s + kk,
                mv.t + kk,
            )
        }));
    }
    Ok(moves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn even_ranking_is_increasing() {
        let evens: Vec<Vertex> = (0..64).filter(|&v| is_even(v)).collect();
        for (r, &v) in evens.iter().enumerate() {
            assert_eq!(even_rank(v), r);
            assert_eq!(even_unrank(r), v);
        }
    }

    #[test]
    fn pair_permutation_examples() {
        let f = Factorization::directional(dim(3));
        let id = pair_permutation(f.factor(0), f.factor(0)).unwrap();
        assert_eq!(id, EvenPermutation::identity(4));
        let p = pair_permutation(f.factor(0), f.factor(1)).unwrap();
        assert_eq!(p.cycle_type(), vec![2, 2]);
        // 0 -> 1 -> 3 under D_1 then D_2
        assert_eq!(p.apply(0), 3);
        assert_eq!(p.apply(5), 6);
        assert_eq!(permutation_sign(&p), 1);
    }

    #[test]
    fn composition_law_exhaustive_on_directional_q3() {
        let f = Factorization::directional(dim(3));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let pij = pair_permutation(f.factor(i), f.factor(j)).unwrap();
                    let pjk = pair_permutation(f.factor(j), f.factor(k)).unwrap();
                    let pik = pair_permutation(f.factor(i), f.factor(k)).unwrap();
                    assert_eq!(pjk.compose(&pij), pik);
                }
            }
        }
    }

    #[test]
    fn permutation_sign_examples() {
        assert_eq!(permutation_sign(&EvenPermutation::identity(8)), 1);
        let cycle8 = EvenPermutation::from_ranks((1..8).chain([0]).collect()).unwrap();
        assert_eq!(permutation_sign(&cycle8), -1);
        assert!(EvenPermutation::from_ranks(vec![0, 0]).is_none());
    }

    #[test]
    fn directional_pair_sign_formula() {
        for d in 2..=6 {
            let f = Factorization::directional(dim(d));
            let p = pair_permutation(f.factor(0), f.factor(d as usize - 1)).unwrap();
            assert_eq!(p.cycle_type(), vec![2; 1 << (d - 2)]);
            let expected = if (1u32 << (d - 2)).is_multiple_of(2) { 1 } else { -1 };
            assert_eq!(permutation_sign(&p), expected);
            let pairs = (d * (d - 1) / 2) as usize;
            assert_eq!(factorization_sign(&f), FactorizationSign::power(if expected == -1 { pairs } else { 0 }));
        }
    }

    #[test]
    fn switchable_squares_of_directional_cubes() {
        let q2 = Factorization::directional(dim(2));
        assert_eq!(
            find_switchable_squares(&q2),
            vec![SwitchMove { anchor: 0, dirs: [1, 2], s: 0, t: 1 }]
        );
        let q3 = Factorization::directional(dim(3));
        let moves = find_switchable_squares(&q3);
        assert_eq!(moves.len(), 6);
        for pair in [[1, 2], [1, 3], [2, 3]] {
            assert_eq!(moves.iter().filter(|m| m.dirs == pair).count(), 2);
        }
        assert!(moves.iter().all(|m| m.s + 1 == m.dirs[0] as usize && m.t + 1 == m.dirs[1] as usize));
    }

    #[test]
    fn q2_switch_swaps_the_two_factors() {
        let q2 = Factorization::directional(dim(2));
        let mv = find_switchable_squares(&q2)[0];
        let swapped = apply_switch(&q2, &mv).unwrap();
        assert_eq!(swapped, q2.reordered(&[1, 0]).unwrap());
        assert_eq!(apply_switch(&swapped, &mv).unwrap(), q2);
    }

    #[test]
    fn q3_two_switches_exchange_directions() {
        // swap D_i and D_j via squares through ∅ and through {k}
        let q3 = Factorization::directional(dim(3));
        for (i, j, k) in [(1u32, 2u32, 3u32), (1, 3, 2), (2, 3, 1)] {
            let (di, dj) = (Direction::from_bit(i - 1), Direction::from_bit(j - 1));
            let (si, sj) = (i as usize - 1, j as usize - 1);
            let first = SwitchMove::on_square(0, di, dj, si, sj);
            let second = SwitchMove::on_square(1 << (k - 1), di, dj, si, sj);
            let mut f = q3.clone();
            apply_switch_in_place(&mut f, &first).unwrap();
            apply_switch_in_place(&mut f, &second).unwrap();
            let mut order = [0usize, 1, 2];
            order.swap(si, sj);
            assert_eq!(f, q3.reordered(&order).unwrap());
        }
    }

    #[test]
    fn rejects_non_switchable_moves() {
        let q3 = Factorization::directional(dim(3));
        let wrong_factors = SwitchMove { anchor: 0, dirs: [1, 2], s: 0, t: 2 };
        assert!(matches!(apply_switch(&q3, &wrong_factors), Err(SignError::NotSwitchable { .. })));
        let odd_anchor = SwitchMove { anchor: 1, dirs: [1, 2], s: 0, t: 1 };
        assert!(apply_switch(&q3, &odd_anchor).is_err());
        let same = SwitchMove { anchor: 0, dirs: [1, 2], s: 1, t: 1 };
        assert!(apply_switch(&q3, &same).is_err());
    }

    #[test]
    fn switch_preserves_sign_and_validity_on_q4() {
        let mut f = Factorization::directional(dim(4));
        for step in 0..200 {
            let moves = find_switchable_squares(&f);
            let mv = moves[(step * 7919) % moves.len()];
            let next = apply_switch(&f, &mv).unwrap();
            assert!(Factorization::new(next.dim(), next.factors().to_vec()).is_ok());
            assert_eq!(factorization_sign(&next), factorization_sign(&f));
            f = next;
        }
    }

    #[test]
    fn direction_respecting_checks() {
        let f = Factorization::directional(dim(5));
        for k in 1..5 {
            assert!(is_direction_respecting(&f, k));
        }
        assert!(!is_direction_respecting(&f, 0));
        assert!(!is_direction_respecting(&f, 5));
        assert!(!is_direction_respecting(&f.reordered(&[1, 0, 2, 3, 4]).unwrap(), 1));
    }

    #[test]
    fn q3_switch_space_reaches_every_ordering() {
        let space = SwitchSpace::explore(dim(3)).unwrap();
        assert_eq!(space.len(), 24);
        assert_eq!(SwitchSpace::explore(dim(2)).unwrap().len(), 2);
        assert_eq!(SwitchSpace::explore(dim(1)).unwrap().len(), 1);
        assert!(SwitchSpace::explore(dim(4)).is_err());
        for node in space.nodes() {
            let path = space.path_to(node).unwrap();
            assert_eq!(&replay_switches(dim(3), &path).unwrap(), node);
        }
    }

    #[test]
    fn derive_for_directional_is_empty() {
        let f = Factorization::directional(dim(5));
        assert!(derive_switch_sequence(&f, 3).unwrap().is_empty());
        assert!(matches!(derive_switch_sequence(&f, 1), Err(SignError::BlockTooLarge(4))));
        let scrambled = f.reordered(&[3, 0, 1, 2, 4]).unwrap();
        assert_eq!(
            derive_switch_sequence(&scrambled, 3),
            Err(SignError::NotDirectionRespecting(3))
        );
    }

    #[test]
    fn switch_move_json_shape() {
        let mv = SwitchMove { anchor: 5, dirs: [1, 3], s: 0, t: 2 };
        assert_eq!(
            serde_json::to_string(&mv).unwrap(),
            r#"{"anchor":5,"dirs":[1,3],"s":0,"t":2}"#
        );
    }
}
