//! Exhaustive enumeration of perfect matchings and 1-factorizations of small
//! cubes.

use std::collections::HashSet;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::cube::{Dimension, Vertex};
use crate::matching::{Factorization, PerfectMatching};

/// Largest dimension for factorization enumeration.
pub const MAX_FACTORIZATION_DIM: u32 = 4;
/// Largest dimension for perfect matching enumeration (`Q_5` has 589185).
pub const MAX_MATCHING_DIM: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("dimension {d} exceeds the enumeration limit {limit}")]
    DimensionTooLarge { d: u32, limit: u32 },
}

const UNMATCHED: Vertex = Vertex::MAX;

/// Visits every perfect matching of `Q_d` in lexicographic order of partner
/// tables.
pub fn for_each_perfect_matching<F>(dim: Dimension, mut visit: F) -> Result<(), EnumerateError>
where
    F: FnMut(&[Vertex]) -> ControlFlow<()>,
{
    if dim.get() > MAX_MATCHING_DIM {
        return Err(EnumerateError::DimensionTooLarge {
            d: dim.get(),
            limit: MAX_MATCHING_DIM,
        });
    }
    let mut partner = vec![UNMATCHED; dim.vertex_count()];
    let _ = match_from(dim.get(), 0, &mut partner, &mut visit);
    Ok(())
}

fn match_from<F>(d: u32, from: usize, partner: &mut [Vertex], visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[Vertex]) -> ControlFlow<()>,
{
    let Some(v) = (from..partner.len()).find(|&v| partner[v] == UNMATCHED) else {
        return visit(partner);
    };
    // all smaller vertices are matched, so candidates are v with one more bit
    for bit in 0..d {
        let w = v ^ (1 << bit);
        if w > v && partner[w] == UNMATCHED {
            partner[v] = w as Vertex;
            partner[w] = v as Vertex;
            match_from(d, v + 1, partner, visit)?;
            partner[v] = UNMATCHED;
            partner[w] = UNMATCHED;
        }
    }
    ControlFlow::Continue(())
}

pub fn enumerate_perfect_matchings(dim: Dimension) -> Result<Vec<PerfectMatching>, EnumerateError> {
    if dim.get() > MAX_FACTORIZATION_DIM {
        return Err(EnumerateError::DimensionTooLarge {
            d: dim.get(),
            limit: MAX_FACTORIZATION_DIM,
        });
    }
    let mut out = Vec::new();
    for_each_perfect_matching(dim, |p| {
        out.push(PerfectMatching::from_partners_unchecked(dim, p.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn count_perfect_matchings(dim: Dimension) -> Result<u64, EnumerateError> {
    let mut count = 0;
    for_each_perfect_matching(dim, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// Edge index of `{v, v ^ 2^bit}`: `low * d + bit` with `low` the endpoint
/// lacking `bit`. Fits a `u64` for `d <= 4`.
fn edge_mask(m: &PerfectMatching) -> u64 {
    let d = m.dim().get() as usize;
    m.edges()
        .iter()
        .map(|&(u, v)| {
            let bit = (u ^ v).trailing_zeros() as usize;
            1u64 << (u as usize * d + bit)
        })
        .fold(0, |acc, e| acc | e)
}

/// Visits each 1-factorization of `Q_d` once. With `up_to_ordering` the
/// factors come sorted by partner table (one representative per partition);
/// otherwise every ordering of every partition is visited.
pub fn for_each_factorization<F>(
    dim: Dimension,
    up_to_ordering: bool,
    mut visit: F,
) -> Result<(), EnumerateError>
where
    F: FnMut(&Factorization) -> ControlFlow<()>,
{
    let matchings = enumerate_perfect_matchings(dim)?;
    let masks: Vec<u64> = matchings.iter().map(edge_mask).collect();
    let all: u64 = masks.iter().fold(0, |acc, m| acc | m);
    let mut seen = HashSet::new();
    let mut chosen = Vec::with_capacity(dim.get() as usize);
    let _ = cover(&masks, all, 0, &mut chosen, &mut |picked: &[usize]| {
        let factors: Vec<PerfectMatching> = picked.iter().map(|&i| matchings[i].clone()).collect();
        let canonical = Factorization::new_unchecked(dim, factors).canonical_unordered();
        if !seen.insert(canonical.clone()) {
            return ControlFlow::Continue(());
        }
        if up_to_ordering {
            visit(&canonical)
        } else {
            let mut order: Vec<usize> = (0..picked.len()).collect();
            for_each_permutation(&mut order, 0, &mut |order| {
                visit(&canonical.reordered(order).expect("reordering keeps validity"))
            })
        }
    });
    Ok(())
}

/// Exact cover of the edge set: the matching covering the lowest uncovered
/// edge is always chosen next, so each partition is produced once.
fn cover<F>(masks: &[u64], all: u64, covered: u64, chosen: &mut Vec<usize>, emit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if covered == all {
        return emit(chosen);
    }
    let lowest = (all & !covered).trailing_zeros();
    for (i, &m) in masks.iter().enumerate() {
        if m >> lowest & 1 == 1 && m & covered == 0 {
            chosen.push(i);
            cover(masks, all, covered | m, chosen, emit)?;
            chosen.pop();
        }
    }
    ControlFlow::Continue(())
}

fn for_each_permutation<F>(items: &mut [usize], k: usize, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if k == items.len() {
        return visit(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        let flow = for_each_permutation(items, k + 1, visit);
        items.swap(k, i);
        flow?;
    }
    ControlFlow::Continue(())
}

pub fn enumerate_factorizations(
    dim: Dimension,
    up_to_ordering: bool,
) -> Result<Vec<Factorization>, EnumerateError> {
    let mut out = Vec::new();
    for_each_factorization(dim, up_to_ordering, |f| {
        out.push(f.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn matching_counts() {
        assert_eq!(count_perfect_matchings(dim(1)).unwrap(), 1);
        assert_eq!(count_perfect_matchings(dim(2)).unwrap(), 2);
        assert_eq!(count_perfect_matchings(dim(3)).unwrap(), 9);
        assert_eq!(count_perfect_matchings(dim(4)).unwrap(), 272);
        assert!(count_perfect_matchings(dim(6)).is_err());
    }

    #[test]
    fn factorization_counts_small() {
        assert_eq!(enumerate_factorizations(dim(2), true).unwrap().len(), 1);
        assert_eq!(enumerate_factorizations(dim(2), false).unwrap().len(), 2);
        assert_eq!(enumerate_factorizations(dim(3), true).unwrap().len(), 4);
        assert_eq!(enumerate_factorizations(dim(3), false).unwrap().len(), 24);
        assert!(enumerate_factorizations(dim(5), true).is_err());
    }

    #[test]
    fn up_to_ordering_uses_sorted_factors() {
        for f in enumerate_factorizations(dim(3), true).unwrap() {
            assert!(f.factors().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn early_stop() {
        let mut seen = 0;
        for_each_factorization(dim(3), false, |_| {
            seen += 1;
            if seen == 5 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(seen, 5);
    }
}
