//! Constructions of factorizations whose perfection graph is `K_{k,l}`.
//!
//! The building block is a Hamilton-pair decomposition of a small cube: two
//! factorizations `{A_i}`, `{B_i}` with every `A_i ∪ B_i` a Hamilton cycle,
//! obtained by splitting a directed Hamilton decomposition at the parity
//! classes. Larger cubes are assembled copy by copy from these blocks.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{is_even, parity, Dimension, Direction, Vertex};
use crate::matching::{
    assemble_high_block, assemble_low_block, is_hamilton_pair, Factorization, MatchingError,
    PerfectMatching,
};
use crate::perfection::{is_complete_bipartite, perfection_graph};
use crate::search::directed::anneal_directed_hamilton_decomposition;
use crate::search::{search_directed_hamilton_decomposition, SearchBudget, SearchStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("invalid directed Hamilton decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("Q_3 has no directed Hamilton decomposition")]
    Unsupported,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("K_{{3,3}} on Q_6 is an open problem; no construction is known")]
    OpenProblem,
    #[error("no Hamilton-pair decomposition of Q_{0} is available within the search budget")]
    CertificateUnavailable(u32),
    #[error("constructed factorization failed verification: {0}")]
    VerificationFailed(String),
    #[error("certificate cache: {0}")]
    Cache(String),
}

/// `d` directed Hamilton cycles partitioning the arcs of the symmetric
/// directed `Q_d`. Each cycle is a vertex sequence; the closing arc runs
/// from the last vertex back to the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedHamiltonDecomposition {
    #[serde(serialize_with = "ser_dim")]
    d: Dimension,
    cycles: Vec<Vec<Vertex>>,
}

fn ser_dim<S: serde::Serializer>(d: &Dimension, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u32(d.get())
}

impl DirectedHamiltonDecomposition {
    pub fn new(d: Dimension, cycles: Vec<Vec<Vertex>>) -> Result<Self, ConstructError> {
        let bad = |msg: String| Err(ConstructError::InvalidDecomposition(msg));
        let n = d.vertex_count();
        let dd = d.get() as usize;
        if cycles.len() != dd {
            return bad(format!("expected {dd} cycles, found {}", cycles.len()));
        }
        let mut used = vec![false; n * dd];
        for (c, cycle) in cycles.iter().enumerate() {
            if cycle.len() != n {
                return bad(format!("cycle {c} has length {}, expected {n}", cycle.len()));
            }
            let mut seen = vec![false; n];
            for (i, &v) in cycle.iter().enumerate() {
                if !d.contains(v) || std::mem::replace(&mut seen[v as usize], true) {
                    return bad(format!("cycle {c} repeats or leaves the cube at vertex {v}"));
                }
                let w = cycle[(i + 1) % n];
                let diff = v ^ w;
                if !diff.is_power_of_two() {
                    return bad(format!("cycle {c} steps {v} -> {w} along a non-edge"));
                }
                let arc = v as usize * dd + diff.trailing_zeros() as usize;
                if std::mem::replace(&mut used[arc], true) {
                    return bad(format!("arc {v} -> {w} appears twice"));
                }
            }
        }
        Ok(DirectedHamiltonDecomposition { d, cycles })
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn cycles(&self) -> &[Vec<Vertex>] {
        &self.cycles
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CertificateFile::DirectedHamiltonDecomposition {
            d: self.d.get(),
            cycles: self.cycles.clone(),
        })
        .expect("plain data serializes")
    }
}

/// Two factorizations `{A_i}` and `{B_i}` of the same cube with each
/// `A_i ∪ B_i` a Hamilton cycle. For `d = 1` both sides are the single edge
/// and the pair is flagged degenerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonPairDecomposition {
    pub a: Factorization,
    pub b: Factorization,
    pub degenerate: bool,
}

impl HamiltonPairDecomposition {
    pub fn dim(&self) -> Dimension {
        self.a.dim()
    }

    /// Re-checks that `A_i ∪ B_i` is Hamilton for every `i` (skipped when
    /// degenerate).
    pub fn verify(&self) -> Result<(), ConstructError> {
        if self.a.dim() != self.b.dim() {
            return Err(MatchingError::DimensionMismatch(self.a.dim().get(), self.b.dim().get()).into());
        }
        if self.degenerate {
            return if self.a.dim().get() == 1 {
                Ok(())
            } else {
                Err(ConstructError::VerificationFailed("only Q_1 may be degenerate".into()))
            };
        }
        for (i, (a, b)) in self.a.factors().iter().zip(self.b.factors()).enumerate() {
            if !is_hamilton_pair(a, b)? {
                return Err(ConstructError::VerificationFailed(format!(
                    "A_{0} ∪ B_{0} is not a Hamilton cycle",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// `A_i` = arcs of `H_i` leaving even vertices, `B_i` = arcs leaving odd
/// vertices, both with orientation dropped.
pub fn split_directed_decomposition(
    h: &DirectedHamiltonDecomposition,
) -> Result<HamiltonPairDecomposition, ConstructError> {
    let d = h.dim();
    if d.get() < 2 {
        return Err(ConstructError::PreconditionViolated(
            "splitting needs d >= 2".into(),
        ));
    }
    let n = d.vertex_count();
    let mut a = Vec::with_capacity(d.get() as usize);
    let mut b = Vec::with_capacity(d.get() as usize);
    for cycle in h.cycles() {
        let mut pa = vec![0; n];
        let mut pb = vec![0; n];
        for (i, &v) in cycle.iter().enumerate() {
            let w = cycle[(i + 1) % n];
            let table = if is_even(v) { &mut pa } else { &mut pb };
            table[v as usize] = w;
            table[w as usize] = v;
        }
        a.push(PerfectMatching::from_partners(d, pa)?);
        b.push(PerfectMatching::from_partners(d, pb)?);
    }
    let out = HamiltonPairDecomposition {
        a: Factorization::new(d, a)?,
        b: Factorization::new(d, b)?,
        degenerate: false,
    };
    out.verify()?;
    Ok(out)
}

/// On-disk form of stored certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateFile {
    DirectedHamiltonDecomposition { d: u32, cycles: Vec<Vec<Vertex>> },
    Factorization { d: u32, factors: Vec<Vec<Vertex>> },
}

mod embedded {
    pub const DHD: &[(u32, &str)] = &[
        (4, include_str!("../certificates/dhd-4.json")),
        (5, include_str!("../certificates/dhd-5.json")),
        (6, include_str!("../certificates/dhd-6.json")),
        (7, include_str!("../certificates/dhd-7.json")),
    ];
    pub const K31: &str = include_str!("../certificates/k31-q4.json");
}

fn parse_dhd(text: &str) -> Result<DirectedHamiltonDecomposition, ConstructError> {
    match serde_json::from_str::<CertificateFile>(text) {
        Ok(CertificateFile::DirectedHamiltonDecomposition { d, cycles }) => {
            DirectedHamiltonDecomposition::new(Dimension::new(d).map_err(MatchingError::from)?, cycles)
        }
        Ok(_) => Err(ConstructError::Cache("expected a directed-hamilton-decomposition".into())),
        Err(e) => Err(ConstructError::Cache(e.to_string())),
    }
}

/// Certificates shipped with the crate, validated on load.
pub fn embedded_decomposition(d: u32) -> Option<DirectedHamiltonDecomposition> {
    embedded::DHD
        .iter()
        .find(|(dd, _)| *dd == d)
        .map(|(_, text)| parse_dhd(text).expect("embedded certificate is valid"))
}

/// Directory of `dhd-<d>.json` files. Reads validate; writes go through a
/// temporary file and a rename so readers never see partial files.
#[derive(Debug, Clone)]
pub struct CertificateCache {
    dir: PathBuf,
}

impl CertificateCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CertificateCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, d: u32) -> PathBuf {
        self.dir.join(format!("dhd-{d}.json"))
    }

    pub fn load(&self, d: u32) -> Result<Option<DirectedHamiltonDecomposition>, ConstructError> {
        match fs::read_to_string(self.path(d)) {
            Ok(text) => parse_dhd(&text).map(Some),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(ConstructError::Cache(e.to_string())),
        }
    }

    pub fn store(&self, h: &DirectedHamiltonDecomposition) -> Result<(), ConstructError> {
        let io = |e: std::io::Error| ConstructError::Cache(e.to_string());
        fs::create_dir_all(&self.dir).map_err(io)?;
        let target = self.path(h.dim().get());
        let tmp = self
            .dir
            .join(format!(".dhd-{}.{}.tmp", h.dim().get(), std::process::id()));
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(h.to_json().as_bytes()).map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, &target).map_err(io)
    }
}

/// Where [`hamilton_pair_decomposition_with`] looks for decompositions.
#[derive(Debug, Clone, Default)]
pub struct DecompositionSource {
    pub cache: Option<CertificateCache>,
    pub budget: SearchBudget,
    /// Seed for the local search used above dimension 5.
    pub seed: u64,
}

/// Hamilton-pair decomposition of `Q_d` for `d != 3`, from the embedded
/// certificates (`d <= 7`) or an unbounded search.
pub fn hamilton_pair_decomposition(d: u32) -> Result<HamiltonPairDecomposition, ConstructError> {
    hamilton_pair_decomposition_with(d, &DecompositionSource::default())
}

pub fn hamilton_pair_decomposition_with(
    d: u32,
    source: &DecompositionSource,
) -> Result<HamiltonPairDecomposition, ConstructError> {
    let dim = Dimension::new(d).map_err(MatchingError::from)?;
    match d {
        1 => {
            let edge = Factorization::directional(dim);
            return Ok(HamiltonPairDecomposition {
                a: edge.clone(),
                b: edge,
                degenerate: true,
            });
        }
        3 => return Err(ConstructError::Unsupported),
        _ => {}
    }
    if let Some(h) = embedded_decomposition(d) {
        return split_directed_decomposition(&h);
    }
    if let Some(cache) = &source.cache {
        if let Some(h) = cache.load(d)? {
            return split_directed_decomposition(&h);
        }
    }
    // exhaustive search is only practical in small dimensions
    let outcome = if d <= 5 {
        search_directed_hamilton_decomposition(dim, source.budget)
    } else {
        anneal_directed_hamilton_decomposition(dim, source.seed, source.budget)
    };
    match (outcome.status, outcome.witness) {
        (SearchStatus::Found, Some(h)) => {
            if let Some(cache) = &source.cache {
                cache.store(&h)?;
            }
            split_directed_decomposition(&h)
        }
        (SearchStatus::ExhaustedNoWitness, _) => Err(ConstructError::Unsupported),
        _ => Err(ConstructError::CertificateUnavailable(d)),
    }
}

fn dimension(d: u32) -> Result<Dimension, ConstructError> {
    Ok(Dimension::new(d).map_err(MatchingError::from)?)
}

/// Neither block of dimension 3: `M_i` is `A_i` on the `Q_k` copy at the
/// empty high part and `B_i` on every other copy; `N_j` is `X_j` on `Q_l`
/// copies over even low parts and `Y_j` over odd ones. Factor order is
/// `M_1..M_k, N_1..N_l`.
pub fn construct_general(k: u32, l: u32) -> Result<Factorization, ConstructError> {
    construct_general_with(k, l, &DecompositionSource::default())
}

pub fn construct_general_with(
    k: u32,
    l: u32,
    source: &DecompositionSource,
) -> Result<Factorization, ConstructError> {
    if k == 0 || l == 0 || k == 3 || l == 3 || (k == 1 && l == 1) {
        return Err(ConstructError::PreconditionViolated(format!(
            "general construction needs k, l >= 1, neither equal to 3, not both 1 (got {k}, {l})"
        )));
    }
    let d = dimension(k + l)?;
    let low = hamilton_pair_decomposition_with(k, source)?;
    let high = hamilton_pair_decomposition_with(l, source)?;
    let mut factors = Vec::with_capacity(d.get() as usize);
    for i in 0..k as usize {
        let (a, b) = (low.a.factor(i), low.b.factor(i));
        let parts: Vec<&PerfectMatching> = (0..1u32 << l).map(|v| if v == 0 { a } else { b }).collect();
        factors.push(assemble_low_block(d, k, &parts)?);
    }
    for j in 0..l as usize {
        let (x, y) = (high.a.factor(j), high.b.factor(j));
        let parts: Vec<&PerfectMatching> =
            (0..1u32 << k).map(|u| if is_even(u) { x } else { y }).collect();
        factors.push(assemble_high_block(d, k, &parts)?);
    }
    Ok(Factorization::new(d, factors)?)
}

/// The `Q_3` copies of the low block on which `M_i` uses `A_i`:
/// `∅, {1,2}, {1,3}, {2,3}, {1,2,3}`. The remaining copies `{1}, {2}, {3}`
/// use `B_i`.
pub const K3_A_COPIES: [Vertex; 5] = [0b000, 0b011, 0b101, 0b110, 0b111];

/// `k = 3`: `N_j` is the directional matching `X_j` on `Q_3` copies over odd
/// high parts, `X_{j+1}` over even nonempty ones and `X_{j+2}` over the
/// empty one (indices mod 3); `M_i` is `A_i`/`B_i` per [`K3_A_COPIES`].
/// Factor order is `N_1, N_2, N_3, M_1..M_l`.
pub fn construct_k3(l: u32) -> Result<Factorization, ConstructError> {
    construct_k3_with(l, &DecompositionSource::default())
}

pub fn construct_k3_with(l: u32, source: &DecompositionSource) -> Result<Factorization, ConstructError> {
    if l < 2 || l == 3 {
        return Err(ConstructError::PreconditionViolated(format!(
            "k = 3 construction needs l >= 2 and l != 3 (got {l})"
        )));
    }
    let d = dimension(3 + l)?;
    let q3 = dimension(3)?;
    let block = hamilton_pair_decomposition_with(l, source)?;
    let x: Vec<PerfectMatching> = (0..3)
        .map(|b| PerfectMatching::directional(q3, Direction::from_bit(b)))
        .collect::<Result<_, _>>()?;
    let mut factors = Vec::with_capacity(d.get() as usize);
    for j in 0..3 {
        let parts: Vec<&PerfectMatching> = (0..1u32 << l)
            .map(|v| {
                let shift = if v == 0 {
                    2
                } else if parity(v).is_even() {
                    1
                } else {
                    0
                };
                &x[(j + shift) % 3]
            })
            .collect();
        factors.push(assemble_low_block(d, 3, &parts)?);
    }
    for i in 0..l as usize {
        let (a, b) = (block.a.factor(i), block.b.factor(i));
        let parts: Vec<&PerfectMatching> = (0..8u32)
            .map(|u| if K3_A_COPIES.contains(&u) { a } else { b })
            .collect();
        factors.push(assemble_high_block(d, 3, &parts)?);
    }
    Ok(Factorization::new(d, factors)?)
}

/// A factorization of `Q_4` whose perfection graph is `K_{3,1}`, with the
/// three-factor side first. Stored as data; see `certificates/k31-q4.json`.
pub fn construct_31() -> Factorization {
    match serde_json::from_str::<CertificateFile>(embedded::K31) {
        Ok(CertificateFile::Factorization { d, factors }) => {
            Factorization::try_from(crate::matching::FactorizationJson { d, factors })
                .expect("embedded K_{3,1} certificate is a valid factorization")
        }
        _ => panic!("embedded K_{{3,1}} certificate is malformed"),
    }
}

/// Dispatches to the construction for `(k, l)` and verifies that the result
/// has perfection graph `K_{k,l}` with the first `k` factors as one part.
pub fn construct_semi_perfect(k: u32, l: u32) -> Result<Factorization, ConstructError> {
    construct_semi_perfect_with(k, l, &DecompositionSource::default())
}

pub fn construct_semi_perfect_with(
    k: u32,
    l: u32,
    source: &DecompositionSource,
) -> Result<Factorization, ConstructError> {
    if k == 0 || l == 0 {
        return Err(ConstructError::PreconditionViolated(format!(
            "k and l must be positive (got {k}, {l})"
        )));
    }
    let f = match (k, l) {
        (3, 3) => return Err(ConstructError::OpenProblem),
        (1, 1) => Factorization::directional(dimension(2)?),
        (3, 1) => construct_31(),
        (1, 3) => construct_31().reordered(&[3, 0, 1, 2])?,
        (3, _) => construct_k3_with(l, source)?,
        (_, 3) => {
            // build with the Q_3 block low, then move it to the top directions
            let f = construct_k3_with(k, source)?;
            let d = k + 3;
            let perm: Vec<u32> = (1..=d).map(|c| if c <= 3 { c + k } else { c - 3 }).collect();
            let order: Vec<usize> = (3..d as usize).chain(0..3).collect();
            f.permute_coordinates(&perm).reordered(&order)?
        }
        _ => construct_general_with(k, l, source)?,
    };
    let g = perfection_graph(&f);
    let parts = is_complete_bipartite(&g, k as usize, l as usize)
        .map_err(|e| ConstructError::VerificationFailed(e.to_string()))?;
    match parts {
        Some(p) if p.first == (0..k as usize).collect::<Vec<_>>() || (k == l && p.second == (0..k as usize).collect::<Vec<_>>()) => Ok(f),
        _ => Err(ConstructError::VerificationFailed(format!(
            "perfection graph is not K_{{{k},{l}}} with the first {k} factors as a part"
        ))),
    }
}
