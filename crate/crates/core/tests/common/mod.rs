//! Independent oracles: deliberately naive re-implementations that share no
//! code with the library's algorithms.

#![allow(dead_code)]

use cubefactor::sign::{apply_switch, find_switchable_squares};
use cubefactor::Factorization;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn tables(f: &Factorization) -> Vec<Vec<u32>> {
    f.factors().iter().map(|m| m.partners().to_vec()).collect()
}

/// Checks a list of partner tables is a 1-factorization of `Q_d` by edge
/// counting.
pub fn is_factorization(d: u32, t: &[Vec<u32>]) -> bool {
    let n = 1usize << d;
    if t.len() != d as usize {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    for m in t {
        if m.len() != n {
            return false;
        }
        for v in 0..n {
            let w = m[v] as usize;
            if w >= n || m[w] as usize != v || (v ^ w).count_ones() != 1 {
                return false;
            }
            if v < w && !seen.insert((v, w)) {
                return false;
            }
        }
    }
    seen.len() == n * d as usize / 2
}

/// Cycle lengths of `M ∪ N` (vertex counts), by repeated alternating walks.
pub fn cycle_lengths(m: &[u32], n: &[u32]) -> Vec<usize> {
    let mut visited = vec![false; m.len()];
    let mut out = Vec::new();
    for s in 0..m.len() {
        if visited[s] {
            continue;
        }
        let mut v = s;
        let mut len = 0;
        loop {
            visited[v] = true;
            let w = m[v] as usize;
            visited[w] = true;
            len += 2;
            v = n[w] as usize;
            if v == s {
                break;
            }
        }
        out.push(len);
    }
    out.sort_unstable();
    out
}

pub fn is_hamilton(m: &[u32], n: &[u32]) -> bool {
    cycle_lengths(m, n) == vec![m.len()]
}

/// Hamilton pairs `(i, j)`, `i < j`.
pub fn perfection_edges(t: &[Vec<u32>]) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if is_hamilton(&t[i], &t[j]) {
                e.push((i, j));
            }
        }
    }
    e
}

/// Tries all `2^n` two-colorings.
pub fn is_bipartite_brute(n: usize, edges: &[(usize, usize)]) -> bool {
    (0u32..1 << n).any(|c| edges.iter().all(|&(i, j)| (c >> i & 1) != (c >> j & 1)))
}

/// Parity of a permutation by counting inversions; `+1` or `-1`.
pub fn inversion_sign(p: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of a factorization via per-factor signs: with `R(v) = v ^ 1` as a
/// reference bijection from even to odd vertices and `s_i` the sign of
/// `R^{-1} ∘ M_i` on even vertices, every pair permutation has sign
/// `s_i s_j`, so the product over pairs is `(∏ s_i)^(d-1)`.
pub fn reference_sign(t: &[Vec<u32>]) -> i8 {
    let n = t[0].len();
    let evens: Vec<usize> = (0..n).filter(|v| v.count_ones() % 2 == 0).collect();
    let index = |v: usize| evens.iter().position(|&e| e == v).unwrap();
    let mut prod = 1i8;
    for m in t {
        let p: Vec<usize> = evens.iter().map(|&v| index(m[v] as usize ^ 1)).collect();
        prod *= inversion_sign(&p);
    }
    if t.len().is_multiple_of(2) {
        prod
    } else {
        1
    }
}

/// Sign straight from the definition, with inversion counting instead of
/// cycle counting.
pub fn definition_sign(t: &[Vec<u32>]) -> i8 {
    let n = t[0].len();
    let evens: Vec<usize> = (0..n).filter(|v| v.count_ones() % 2 == 0).collect();
    let index = |v: usize| evens.iter().position(|&e| e == v).unwrap();
    let mut prod = 1i8;
    for i in 0..t.len() {
        for tj in &t[i + 1..] {
            let p: Vec<usize> = evens.iter().map(|&v| index(tj[t[i][v] as usize] as usize)).collect();
            prod *= inversion_sign(&p);
        }
    }
    prod
}

/// All perfect matchings of `Q_d` as partner tables, by trying every edge
/// subset of size `2^(d-1)`. Only for `d <= 3`.
pub fn brute_matchings(d: u32) -> Vec<Vec<u32>> {
    let n = 1usize << d;
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| (0..d).map(move |b| (v, v ^ (1 << b))))
        .filter(|&(v, w)| v < w)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << edges.len() {
        if mask.count_ones() as usize != n / 2 {
            continue;
        }
        let mut partner = vec![u32::MAX; n];
        let mut ok = true;
        for (i, &(v, w)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if partner[v] != u32::MAX || partner[w] != u32::MAX {
                    ok = false;
                    break;
                }
                partner[v] = w as u32;
                partner[w] = v as u32;
            }
        }
        if ok {
            out.push(partner);
        }
    }
    out
}

/// Factorizations reached by a random switch walk from `start`, one per
/// step.
pub fn switch_walk<R: Rng>(start: &Factorization, steps: usize, rng: &mut R) -> Vec<Factorization> {
    let mut f = start.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let moves = find_switchable_squares(&f);
        let mv = moves.choose(rng).expect("every factorization with d >= 2 has a switch here");
        f = apply_switch(&f, mv).unwrap();
        out.push(f.clone());
    }
    out
}
