//! Targeted factorization search.
//!
//! Two engines share one entry point:
//! - with a direction-respecting split `k`, every composite of per-copy
//!   ordered factorizations of `Q_k` and `Q_{d-k}` is visited in odometer
//!   order; the space is finite and a miss is a proof of absence;
//! - otherwise a Metropolis walk over switches, restarted from random
//!   factorizations, looks for a witness under a node or time budget.
//!
//! Complete-bipartite targets carry a required sign `(-1)^{kl}`; candidates
//! (or whole walks, since switches keep the sign) with the other sign are
//! skipped without evaluating the target.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{compose_vertex, Dimension, Vertex};
use crate::matching::{hamilton_walk, union_cycle_stats, Factorization, PerfectMatching};
use crate::perfection::{is_complete_bipartite, perfection_graph};
use crate::search::enumerate::{enumerate_factorizations, EnumerateError, MAX_FACTORIZATION_DIM};
use crate::search::{Meter, SearchBudget, SearchOutcome, SearchStatus};
use crate::sign::{apply_switch_in_place, collect_switchable, factorization_sign, FactorizationSign};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("randomized search needs a node or time budget")]
    UnboundedBudget,
    #[error("checkpoint does not match this search: {0}")]
    CheckpointMismatch(String),
    #[error("start factorization has dimension {0}, search has {1}")]
    StartDimension(u32, u32),
}

/// What a search is looking for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `G[F] ≅ K_{k,l}` with any bipartition.
    CompleteBipartite { k: usize, l: usize },
    /// Every pair `(i, j)` with `i < k <= j` unions to a Hamilton cycle, i.e.
    /// `G[F] ⊇ K_{k,l}` with the first `k` factors as one part.
    CrossHamilton { k: usize, l: usize },
    /// Every pair union has at most this many cycles.
    AllPairsMaxCycles(usize),
    /// Every pair union has a cycle at least this long.
    MinLongestCycleAtLeast(usize),
}

impl Target {
    pub fn validate(&self, dim: Dimension) -> Result<(), SearchError> {
        let d = dim.get() as usize;
        match *self {
            Target::CompleteBipartite { k, l } | Target::CrossHamilton { k, l } => {
                if k == 0 || l == 0 || k + l != d {
                    return Err(SearchError::InvalidTarget(format!(
                        "parts {k},{l} must be positive and sum to d = {d}"
                    )));
                }
            }
            Target::AllPairsMaxCycles(c) => {
                if c == 0 {
                    return Err(SearchError::InvalidTarget("cycle bound must be positive".into()));
                }
            }
            Target::MinLongestCycleAtLeast(len) => {
                if len > dim.vertex_count() {
                    return Err(SearchError::InvalidTarget(format!(
                        "no cycle in Q_{d} is longer than {}",
                        dim.vertex_count()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sign every satisfying factorization must have: all `kl` cross pairs
    /// are Hamilton (odd permutations) and within-part pairs are even.
    pub fn required_sign(&self) -> Option<FactorizationSign> {
        match *self {
            Target::CompleteBipartite { k, l } | Target::CrossHamilton { k, l } => {
                Some(FactorizationSign::power(k * l))
            }
            _ => None,
        }
    }

    pub fn is_satisfied(&self, f: &Factorization) -> bool {
        match *self {
            Target::CompleteBipartite { k, l } => {
                matches!(is_complete_bipartite(&perfection_graph(f), k, l), Ok(Some(_)))
            }
            Target::CrossHamilton { k, .. } => (0..k)
                .all(|i| (k..f.len()).all(|j| hamilton_walk(f.factor(i).partners(), f.factor(j).partners()))),
            Target::AllPairsMaxCycles(c) => crate::search::max_pair_cycle_count(f) <= c,
            Target::MinLongestCycleAtLeast(len) => crate::search::min_longest_cycle(f) >= len,
        }
    }

    /// Distance-like score guiding the walk; zero exactly when satisfied.
    fn score(&self, f: &Factorization, scratch: &mut Vec<bool>) -> u64 {
        let n = f.len();
        let pair = |i: usize, j: usize, scratch: &mut Vec<bool>| {
            union_cycle_stats(f.factor(i).partners(), f.factor(j).partners(), scratch)
        };
        match *self {
            Target::CrossHamilton { k, .. } => {
                let mut s = 0;
                for i in 0..k {
                    for j in k..n {
                        s += pair(i, j, scratch).0 as u64 - 1;
                    }
                }
                s
            }
            Target::CompleteBipartite { k, l } => {
                // cycles beyond one on the best kl pairs, plus a unit if the
                // graph is still not K_{k,l}
                let mut excess: Vec<u64> = Vec::with_capacity(n * n / 2);
                for i in 0..n {
                    for j in i + 1..n {
                        excess.push(pair(i, j, scratch).0 as u64 - 1);
                    }
                }
                excess.sort_unstable();
                let s: u64 = excess[..k * l].iter().sum();
                s + u64::from(!self.is_satisfied(f))
            }
            Target::AllPairsMaxCycles(c) => {
                let mut s = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        s += (pair(i, j, scratch).0 as u64).saturating_sub(c as u64);
                    }
                }
                s
            }
            Target::MinLongestCycleAtLeast(len) => {
                let mut s = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        s += (len as u64).saturating_sub(pair(i, j, scratch).1 as u64);
                    }
                }
                s
            }
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::CompleteBipartite { k, l } => write!(f, "complete-bipartite:{k},{l}"),
            Target::CrossHamilton { k, l } => write!(f, "cross-hamilton:{k},{l}"),
            Target::AllPairsMaxCycles(c) => write!(f, "all-pairs-max-cycles:{c}"),
            Target::MinLongestCycleAtLeast(len) => write!(f, "min-longest-cycle:{len}"),
        }
    }
}

impl FromStr for Target {
    type Err = SearchError;

    /// `complete-bipartite:K,L`, `cross-hamilton:K,L` (alias `k33-style:K,L`),
    /// `all-pairs-max-cycles:C`, `min-longest-cycle:L`.
    fn from_str(s: &str) -> Result<Self, SearchError> {
        let bad = || SearchError::InvalidTarget(s.to_string());
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        match (kind, nums.as_slice()) {
            ("complete-bipartite", &[k, l]) => Ok(Target::CompleteBipartite { k, l }),
            ("cross-hamilton" | "k33-style", &[k, l]) => Ok(Target::CrossHamilton { k, l }),
            ("all-pairs-max-cycles", &[c]) => Ok(Target::AllPairsMaxCycles(c)),
            ("min-longest-cycle", &[len]) => Ok(Target::MinLongestCycleAtLeast(len)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Restrict to direction-respecting factorizations with this split and
    /// search them exhaustively.
    pub direction_respecting_split: Option<u32>,
    /// First restart of the walk begins here instead of the directional
    /// factorization.
    pub start: Option<Factorization>,
    pub random_seed: u64,
    pub sign_pruning: bool,
    /// Steps per restart of the walk.
    pub walk_length: u64,
    pub resume: Option<Checkpoint>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            direction_respecting_split: None,
            start: None,
            random_seed: 0,
            sign_pruning: true,
            walk_length: 20_000,
            resume: None,
        }
    }
}

/// Serialized search position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Frontier {
    /// Next composite to visit, one digit per subcube copy.
    Composite { odometer: Vec<u32> },
    /// Restart to run next.
    RandomWalk { restart: u64 },
}

/// Resumable search state with the parameters it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub d: u32,
    pub target: String,
    pub seed: u64,
    pub direction_respecting_split: Option<u32>,
    pub sign_pruning: bool,
    pub walk_length: u64,
    pub nodes_explored: u64,
    pub frontier: Frontier,
}

impl Checkpoint {
    fn header_matches(&self, dim: Dimension, target: &Target, options: &SearchOptions) -> Result<(), SearchError> {
        let mismatch = |what: &str| Err(SearchError::CheckpointMismatch(what.to_string()));
        if self.version != CHECKPOINT_VERSION {
            return mismatch("version");
        }
        if self.d != dim.get() {
            return mismatch("dimension");
        }
        if self.target != target.to_string() {
            return mismatch("target");
        }
        if self.seed != options.random_seed {
            return mismatch("seed");
        }
        if self.direction_respecting_split != options.direction_respecting_split {
            return mismatch("direction-respecting split");
        }
        if self.sign_pruning != options.sign_pruning {
            return mismatch("sign pruning");
        }
        if self.walk_length != options.walk_length {
            return mismatch("walk length");
        }
        Ok(())
    }
}

/// Outcome plus a checkpoint when the budget ran out first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationSearch {
    pub outcome: SearchOutcome<Factorization>,
    pub checkpoint: Option<Checkpoint>,
    /// Candidates skipped by the sign filter.
    pub sign_pruned: u64,
}

pub fn search_factorization(
    dim: Dimension,
    target: Target,
    options: &SearchOptions,
    budget: SearchBudget,
) -> Result<FactorizationSearch, SearchError> {
    target.validate(dim)?;
    if let Some(cp) = &options.resume {
        cp.header_matches(dim, &target, options)?;
    }
    if let Some(start) = &options.start {
        if start.dim() != dim {
            return Err(SearchError::StartDimension(start.dim().get(), dim.get()));
        }
    }
    let result = match options.direction_respecting_split {
        Some(k) => composite_search(dim, k, target, options, budget)?,
        None => walk_search(dim, target, options, budget)?,
    };
    if let Some(w) = &result.outcome.witness {
        // re-verify from scratch before reporting
        let again = Factorization::new(w.dim(), w.factors().to_vec())
            .expect("search only builds valid factorizations");
        assert!(target.is_satisfied(&again), "reported witness must satisfy the target");
    }
    Ok(result)
}

fn checkpoint(dim: Dimension, target: &Target, options: &SearchOptions, nodes: u64, frontier: Frontier) -> Checkpoint {
    Checkpoint {
        version: CHECKPOINT_VERSION,
        d: dim.get(),
        target: target.to_string(),
        seed: options.random_seed,
        direction_respecting_split: options.direction_respecting_split,
        sign_pruning: options.sign_pruning,
        walk_length: options.walk_length,
        nodes_explored: nodes,
        frontier,
    }
}

/// Number of direction-respecting composites for split `k` of `Q_d`, if it
/// fits in a `u128`.
pub fn composite_space_size(dim: Dimension, k: u32) -> Result<Option<u128>, SearchError> {
    let (low, high) = block_spaces(dim, k)?;
    let l = dim.get() - k;
    let a = (low.len() as u128).checked_pow(1 << l);
    let b = (high.len() as u128).checked_pow(1 << k);
    Ok(a.zip(b).and_then(|(a, b)| a.checked_mul(b)))
}

fn block_spaces(dim: Dimension, k: u32) -> Result<(Vec<Factorization>, Vec<Factorization>), SearchError> {
    let d = dim.get();
    if k == 0 || k >= d {
        return Err(SearchError::InvalidTarget(format!("split {k} must lie in 1..{d}")));
    }
    let low = Dimension::new(k).expect("k in range");
    let high = Dimension::new(d - k).expect("l in range");
    for block in [low, high] {
        if block.get() > MAX_FACTORIZATION_DIM {
            return Err(EnumerateError::DimensionTooLarge {
                d: block.get(),
                limit: MAX_FACTORIZATION_DIM,
            }
            .into());
        }
    }
    Ok((enumerate_factorizations(low, false)?, enumerate_factorizations(high, false)?))
}

fn composite_search(
    dim: Dimension,
    k: u32,
    target: Target,
    options: &SearchOptions,
    budget: SearchBudget,
) -> Result<FactorizationSearch, SearchError> {
    let (low, high) = block_spaces(dim, k)?;
    let l = dim.get() - k;
    let low_copies = 1usize << l;
    let high_copies = 1usize << k;
    let radix: Vec<u32> = std::iter::repeat_n(low.len() as u32, low_copies)
        .chain(std::iter::repeat_n(high.len() as u32, high_copies))
        .collect();

    let (mut odometer, nodes) = match &options.resume {
        Some(cp) => match &cp.frontier {
            Frontier::Composite { odometer } if odometer.len() == radix.len()
                && odometer.iter().zip(&radix).all(|(x, r)| x < r) =>
            {
                (odometer.clone(), cp.nodes_explored)
            }
            _ => return Err(SearchError::CheckpointMismatch("frontier".into())),
        },
        None => (vec![0u32; radix.len()], 0),
    };
    let mut meter = Meter::resume(budget, nodes);
    let required = target.required_sign().filter(|_| options.sign_pruning);
    let mut pruned = 0;
    let n = dim.vertex_count();
    let kk = k as usize;
    let mut tables = vec![vec![0 as Vertex; n]; dim.get() as usize];

    loop {
        if !meter.tick() {
            let cp = checkpoint(dim, &target, options, meter.nodes, Frontier::Composite { odometer });
            return Ok(FactorizationSearch {
                outcome: SearchOutcome::over_budget(meter.nodes),
                checkpoint: Some(cp),
                sign_pruned: pruned,
            });
        }
        for v in dim.vertices() {
            let low_part = (v & ((1 << k) - 1)) as usize;
            let high_part = (v >> k) as usize;
            let lf = &low[odometer[high_part] as usize];
            let hf = &high[odometer[low_copies + low_part] as usize];
            for (i, table) in tables.iter_mut().enumerate() {
                table[v as usize] = if i < kk {
                    compose_vertex(lf.factor(i).partner(low_part as Vertex), high_part as Vertex, k)
                } else {
                    compose_vertex(low_part as Vertex, hf.factor(i - kk).partner(high_part as Vertex), k)
                };
            }
        }
        let f = Factorization::new_unchecked(
            dim,
            tables
                .iter()
                .map(|t| PerfectMatching::from_partners_unchecked(dim, t.clone()))
                .collect(),
        );
        let skip = required.is_some_and(|s| factorization_sign(&f) != s);
        if skip {
            pruned += 1;
        } else if target.is_satisfied(&f) {
            return Ok(FactorizationSearch {
                outcome: SearchOutcome::found(f, meter.nodes),
                checkpoint: None,
                sign_pruned: pruned,
            });
        }
        // advance, lowest digit fastest
        let mut pos = 0;
        loop {
            if pos == odometer.len() {
                return Ok(FactorizationSearch {
                    outcome: SearchOutcome::exhausted(meter.nodes),
                    checkpoint: None,
                    sign_pruned: pruned,
                });
            }
            odometer[pos] += 1;
            if odometer[pos] < radix[pos] {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    rng
}

fn walk_search(
    dim: Dimension,
    target: Target,
    options: &SearchOptions,
    budget: SearchBudget,
) -> Result<FactorizationSearch, SearchError> {
    if !budget.is_bounded() {
        return Err(SearchError::UnboundedBudget);
    }
    let (first_restart, nodes) = match &options.resume {
        Some(cp) => match cp.frontier {
            Frontier::RandomWalk { restart } => (restart, cp.nodes_explored),
            _ => return Err(SearchError::CheckpointMismatch("frontier".into())),
        },
        None => (0, 0),
    };
    let mut meter = Meter::resume(budget, nodes);
    let required = target.required_sign().filter(|_| options.sign_pruning);
    let mut pruned = 0;
    let mut scratch = Vec::new();
    let mut moves = Vec::new();

    for restart in first_restart.. {
        let nodes_at_restart = meter.nodes;
        // the checkpoint rewinds to the start of this restart so a resume
        // replays it with the same generator state
        let over = |spent: u64| {
            let cp = checkpoint(dim, &target, options, nodes_at_restart, Frontier::RandomWalk { restart });
            FactorizationSearch {
                outcome: SearchOutcome::over_budget(spent),
                checkpoint: Some(cp),
                sign_pruned: pruned,
            }
        };
        let mut rng = restart_rng(options.random_seed, restart);
        let mut f = if restart == 0 {
            options.start.clone().unwrap_or_else(|| Factorization::directional(dim))
        } else {
            random_factorization(dim, &mut rng)
        };
        if !meter.tick() {
            return Ok(over(meter.nodes));
        }
        if required.is_some_and(|s| factorization_sign(&f) != s) {
            pruned += 1;
            continue;
        }
        let mut score = target.score(&f, &mut scratch);
        let mut owner = f.edge_owner();
        for _ in 0..options.walk_length {
            if score == 0 {
                debug_assert!(target.is_satisfied(&f));
                return Ok(FactorizationSearch {
                    outcome: SearchOutcome::found(f, meter.nodes),
                    checkpoint: None,
                    sign_pruned: pruned,
                });
            }
            collect_switchable(dim, &owner, &mut moves);
            let Some(&mv) = moves.choose(&mut rng) else {
                break;
            };
            if !meter.tick() {
                return Ok(over(meter.nodes));
            }
            apply_switch_in_place(&mut f, &mv).expect("listed moves are switchable");
            let next = target.score(&f, &mut scratch);
            let accept = next <= score || rng.gen::<f64>() < 0.25f64.powi((next - score) as i32);
            if accept {
                score = next;
                update_owner(&mut owner, &f, &mv);
            } else {
                apply_switch_in_place(&mut f, &mv).expect("a switch undoes itself");
            }
        }
        if score == 0 {
            return Ok(FactorizationSearch {
                outcome: SearchOutcome::found(f, meter.nodes),
                checkpoint: None,
                sign_pruned: pruned,
            });
        }
    }
    unreachable!("restart loop only exits by returning")
}

fn update_owner(owner: &mut [u8], f: &Factorization, mv: &crate::sign::SwitchMove) {
    let d = f.dim().get() as usize;
    for v in mv.square() {
        for i in [mv.s, mv.t] {
            owner[v as usize * d + f.factor(i).direction_at(v).bit() as usize] = i as u8;
        }
    }
}

/// A random factorization: `d - 1` times, a random perfect matching of the
/// remaining regular bipartite graph (which always has one) by augmenting
/// paths in random order; the leftover edges form the last factor.
pub fn random_factorization<R: Rng>(dim: Dimension, rng: &mut R) -> Factorization {
    let d = dim.get() as usize;
    let n = dim.vertex_count();
    let mut available = vec![(1u32 << d) - 1; n];
    let mut factors = Vec::with_capacity(d);
    let evens: Vec<Vertex> = dim.vertices().filter(|&v| crate::cube::is_even(v)).collect();
    for _ in 0..d - 1 {
        let mut mate = vec![Vertex::MAX; n];
        let mut order = evens.clone();
        order.shuffle(rng);
        for &v in &order {
            let mut visited = vec![false; n];
            let found = augment(v, &available, &mut mate, &mut visited, rng, d);
            debug_assert!(found, "regular bipartite graphs have perfect matchings");
        }
        for v in dim.vertices() {
            let bit = (v ^ mate[v as usize]).trailing_zeros();
            available[v as usize] &= !(1 << bit);
        }
        factors.push(PerfectMatching::from_partners_unchecked(dim, mate));
    }
    let last = dim
        .vertices()
        .map(|v| v ^ (1 << available[v as usize].trailing_zeros()))
        .collect();
    factors.push(PerfectMatching::from_partners_unchecked(dim, last));
    Factorization::new_unchecked(dim, factors)
}

fn augment<R: Rng>(v: Vertex, available: &[u32], mate: &mut [Vertex], visited: &mut [bool], rng: &mut R, d: usize) -> bool {
    let mut bits: Vec<u32> = (0..d as u32).filter(|&b| available[v as usize] >> b & 1 == 1).collect();
    bits.shuffle(rng);
    for b in bits {
        let w = v ^ (1 << b);
        if visited[w as usize] {
            continue;
        }
        visited[w as usize] = true;
        let prev = mate[w as usize];
        if prev == Vertex::MAX || augment(prev, available, mate, visited, rng, d) {
            mate[w as usize] = v;
            mate[v as usize] = w;
            return true;
        }
    }
    false
}

impl FactorizationSearch {
    pub fn status(&self) -> SearchStatus {
        self.outcome.status
    }
}
