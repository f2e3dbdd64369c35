//! Backtracking search for a partition of the symmetric directed hypercube
//! into `d` directed Hamilton cycles.
//!
//! Cycles are built one at a time as paths from vertex 0. Cycle `c` leaves
//! vertex 0 in direction `c + 1`, which labels the cycles and removes their
//! `d!` relabelings. Once `d - 1` cycles are placed the leftover arcs form a
//! permutation, so the last cycle only needs a Hamiltonicity check.
//!
//! Pruning while extending a path:
//! - every vertex not yet on the path keeps an unused in-arc from a vertex
//!   that can still precede it, and an unused out-arc to one it can still
//!   reach;
//! - while building the second-to-last cycle, each vertex left behind
//!   forces its other unused out-arc into the last cycle, and forced arcs
//!   must never close a short cycle or double up on a head.

use crate::construct::DirectedHamiltonDecomposition;
use crate::cube::{Dimension, Vertex};
use crate::search::{Meter, SearchBudget, SearchOutcome};

const NONE: u32 = u32::MAX;

enum Flow {
    Found,
    Continue,
    Abort,
}

struct Search {
    d: usize,
    n: usize,
    used: Vec<bool>,
    on_path: Vec<bool>,
    path: Vec<Vertex>,
    cycles: Vec<Vec<Vertex>>,
    forced_next: Vec<u32>,
    forced_prev: Vec<u32>,
    meter: Meter,
}

/// Exhaustive within the budget: `ExhaustedNoWitness` means no
/// decomposition exists.
pub fn search_directed_hamilton_decomposition(
    dim: Dimension,
    budget: SearchBudget,
) -> SearchOutcome<DirectedHamiltonDecomposition> {
    let d = dim.get() as usize;
    let n = dim.vertex_count();
    let mut s = Search {
        d,
        n,
        used: vec![false; n * d],
        on_path: vec![false; n],
        path: Vec::with_capacity(n),
        cycles: Vec::with_capacity(d),
        forced_next: vec![NONE; n],
        forced_prev: vec![NONE; n],
        meter: Meter::new(budget),
    };
    match s.cycle(0) {
        Flow::Found => {
            let witness = DirectedHamiltonDecomposition::new(dim, s.cycles)
                .expect("search only assembles valid decompositions");
            SearchOutcome::found(witness, s.meter.nodes)
        }
        Flow::Continue => SearchOutcome::exhausted(s.meter.nodes),
        Flow::Abort => SearchOutcome::over_budget(s.meter.nodes),
    }
}

impl Search {
    #[inline]
    fn arc(&self, v: Vertex, bit: usize) -> usize {
        v as usize * self.d + bit
    }

    fn cycle(&mut self, c: usize) -> Flow {
        if !self.meter.tick() {
            return Flow::Abort;
        }
        if c + 1 == self.d {
            return self.close_last();
        }
        self.path.clear();
        self.path.push(0);
        self.on_path[0] = true;
        let flow = self.try_arc(0, c, c);
        self.on_path[0] = false;
        self.path.clear();
        flow
    }

    /// The leftover arcs form a permutation; accept iff it is one cycle.
    fn close_last(&mut self) -> Flow {
        let mut cycle = Vec::with_capacity(self.n);
        let mut v: Vertex = 0;
        loop {
            cycle.push(v);
            let Some(bit) = (0..self.d).find(|&b| !self.used[self.arc(v, b)]) else {
                return Flow::Continue;
            };
            v ^= 1 << bit;
            if v == 0 || cycle.len() > self.n {
                break;
            }
        }
        if cycle.len() == self.n {
            self.cycles.push(cycle);
            Flow::Found
        } else {
            Flow::Continue
        }
    }

    fn extend(&mut self, c: usize) -> Flow {
        if !self.meter.tick() {
            return Flow::Abort;
        }
        let cur = *self.path.last().expect("path starts at 0");
        if self.path.len() == self.n {
            let bit = cur.trailing_zeros() as usize;
            if !cur.is_power_of_two() || self.used[self.arc(cur, bit)] {
                return Flow::Continue;
            }
            let arc = self.arc(cur, bit);
            self.used[arc] = true;
            let trail = self.force_remaining(cur, c);
            let flow = match trail {
                Some(_) => {
                    let done = std::mem::take(&mut self.path);
                    for &v in &done {
                        self.on_path[v as usize] = false;
                    }
                    self.cycles.push(done);
                    let flow = self.cycle(c + 1);
                    if !matches!(flow, Flow::Found) {
                        let done = self.cycles.pop().expect("pushed above");
                        for &v in &done {
                            self.on_path[v as usize] = true;
                        }
                        self.path = done;
                    }
                    flow
                }
                None => Flow::Continue,
            };
            if let Some(t) = trail {
                self.unforce(t);
            }
            if !matches!(flow, Flow::Found) {
                self.used[arc] = false;
            }
            return flow;
        }
        for bit in 0..self.d {
            let w = cur ^ (1 << bit);
            if self.used[self.arc(cur, bit)] || self.on_path[w as usize] {
                continue;
            }
            match self.try_arc(cur, bit, c) {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }

    /// Takes arc `cur -> cur^bit` into cycle `c` and recurses.
    fn try_arc(&mut self, cur: Vertex, bit: usize, c: usize) -> Flow {
        let w = cur ^ (1 << bit);
        let arc = self.arc(cur, bit);
        self.used[arc] = true;
        self.on_path[w as usize] = true;
        self.path.push(w);
        let trail = self.force_remaining(cur, c);
        let flow = match trail {
            Some(_) if self.feasible(cur, w) => self.extend(c),
            _ => Flow::Continue,
        };
        if let Some(t) = trail {
            self.unforce(t);
        }
        if !matches!(flow, Flow::Found) {
            self.path.pop();
            self.on_path[w as usize] = false;
            self.used[arc] = false;
        }
        flow
    }

    /// In the second-to-last cycle, records the arc out of `v` that is left
    /// for the last cycle. Returns `None` if that arc breaks the last cycle,
    /// otherwise the vertex whose forced arc was set (or `NONE`).
    fn force_remaining(&mut self, v: Vertex, c: usize) -> Option<u32> {
        if c + 2 != self.d {
            return Some(NONE);
        }
        let bit = (0..self.d).find(|&b| !self.used[self.arc(v, b)])?;
        let u = v ^ (1 << bit);
        if self.forced_prev[u as usize] != NONE {
            return None;
        }
        // walking forward from u must not come back to v early
        let mut len = 1;
        let mut x = u;
        while self.forced_next[x as usize] != NONE {
            x = self.forced_next[x as usize];
            len += 1;
        }
        if x == v && len < self.n {
            return None;
        }
        self.forced_next[v as usize] = u;
        self.forced_prev[u as usize] = v;
        Some(v)
    }

    fn unforce(&mut self, v: u32) {
        if v != NONE {
            let u = self.forced_next[v as usize];
            self.forced_next[v as usize] = NONE;
            self.forced_prev[u as usize] = NONE;
        }
    }

    /// Checks the neighbors whose options shrank after taking `cur -> w`.
    fn feasible(&self, cur: Vertex, w: Vertex) -> bool {
        for bit in 0..self.d {
            let x = cur ^ (1 << bit);
            if !self.on_path[x as usize] && !self.has_in_option(x, w) {
                return false;
            }
            let x = w ^ (1 << bit);
            if !self.on_path[x as usize] && !self.has_out_option(x) {
                return false;
            }
        }
        // vertex 0 must still be enterable to close the cycle
        self.path.len() == self.n || self.has_in_option(0, w)
    }

    fn has_in_option(&self, x: Vertex, head: Vertex) -> bool {
        (0..self.d).any(|bit| {
            let y = x ^ (1 << bit);
            (y == head || !self.on_path[y as usize]) && !self.used[self.arc(y, bit)]
        })
    }

    fn has_out_option(&self, x: Vertex) -> bool {
        (0..self.d).any(|bit| {
            let z = x ^ (1 << bit);
            (z == 0 || !self.on_path[z as usize]) && !self.used[self.arc(x, bit)]
        })
    }
}

/// Local search for a directed Hamilton decomposition. Randomized and
/// incomplete: it never proves absence, so running out of budget is the only
/// negative outcome. Reproducible for a fixed seed and node budget.
///
/// State: a coloring of the arcs of the symmetric directed cube with `d`
/// colors such that every vertex has one out-arc and one in-arc of each
/// color, so each color class is a permutation of the vertices. Moves:
/// - square swap: for a square `x, x^e_i, y, x^e_j` (`y = x^e_i^e_j`) whose
///   parallel arcs `x -> x^e_i`, `y -> y^e_i` share color `a` and
///   `x -> x^e_j`, `y -> y^e_j` share color `b`, exchange `a` and `b` on
///   those four arcs; both permutations are composed with `(x y)`, so each
///   gains or loses one cycle;
/// - Kempe swap: exchange `a` and `b` along a whole alternating `a`/`b`
///   cycle of the out/in double cover.
///
/// Moves are accepted by the Metropolis rule on the number of surplus
/// cycles, and each run restarts after a fixed number of moves.
///
/// Square swaps keep the product of the classes' signs, and `d` Hamilton
/// cycles on `2^d` vertices have product `(-1)^d` while the coloring by
/// direction has `+1`. Starts are therefore random colorings with the right
/// product, built from random perfect matchings of the double cover.
pub fn anneal_directed_hamilton_decomposition(
    dim: Dimension,
    seed: u64,
    budget: SearchBudget,
) -> SearchOutcome<DirectedHamiltonDecomposition> {
    use rand::SeedableRng;

    let d = dim.get() as usize;
    let n = dim.vertex_count();
    let mut meter = Meter::new(budget);
    if d < 2 {
        return SearchOutcome::exhausted(meter.nodes);
    }
    let mut cycle_id = vec![vec![0u32; n]; d];
    let mut restart = 0u64;
    let succ = loop {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        restart += 1;
        match anneal_once(d, &mut rng, &mut cycle_id, &mut meter) {
            Ok(Some(succ)) => break succ,
            Ok(None) => continue,
            Err(()) => return SearchOutcome::over_budget(meter.nodes),
        }
    };
    let cycles = succ
        .iter()
        .map(|s| {
            let mut cycle = Vec::with_capacity(n);
            let mut v = 0;
            loop {
                cycle.push(v);
                v = s[v as usize];
                if v == 0 {
                    break cycle;
                }
            }
        })
        .collect();
    let witness = DirectedHamiltonDecomposition::new(dim, cycles).expect("single-cycle color classes");
    SearchOutcome::found(witness, meter.nodes)
}

const TEMPERATURE: f64 = 0.5;
const KEMPE_RATE: f64 = 0.1;
const RESTART_MOVES: u64 = 1_000_000;

/// One annealing run from a fresh random start: `Ok(Some(successors))` on
/// success, `Ok(None)` after [`RESTART_MOVES`] moves, `Err` when the budget
/// ends.
#[allow(clippy::result_unit_err)]
fn anneal_once<R: rand::Rng>(
    d: usize,
    rng: &mut R,
    cycle_id: &mut [Vec<u32>],
    meter: &mut Meter,
) -> Result<Option<Vec<Vec<Vertex>>>, ()> {
    let n = 1usize << d;
    let (mut color, mut succ, mut counts) = loop {
        let (color, succ) = random_arc_coloring(d, rng);
        let counts: Vec<usize> = (0..d).map(|c| label_cycles(&succ[c], &mut cycle_id[c])).collect();
        // sign of a permutation is (-1)^(n - cycles)
        let odd_classes: usize = counts.iter().map(|&k| (n - k) % 2).sum();
        if odd_classes % 2 == d % 2 {
            break (color, succ, counts);
        }
    };
    let mut surplus: usize = counts.iter().sum::<usize>() - d;
    let uphill = (-2.0 / TEMPERATURE).exp();

    let mut pred: Vec<Vec<Vertex>> = succ.iter().map(|s| inverse(s)).collect();
    let mut orbit = Vec::new();
    let mut moves = 0;
    while surplus > 0 {
        if moves == RESTART_MOVES {
            return Ok(None);
        }
        if rng.gen::<f64>() < KEMPE_RATE {
            if !meter.tick() {
                return Err(());
            }
            moves += 1;
            let x = rng.gen_range(0..n as Vertex);
            let a = rng.gen_range(0..d);
            let b = (a + rng.gen_range(1..d)) % d;
            // out-vertices of the a/b alternating cycle through x
            orbit.clear();
            let mut u = x;
            loop {
                orbit.push(u);
                u = pred[b][succ[a][u as usize] as usize];
                if u == x {
                    break;
                }
            }
            let swap = |succ: &mut [Vec<Vertex>], pred: &mut [Vec<Vertex>], color: &mut [u8], orbit: &[Vertex]| {
                for &u in orbit {
                    let (ha, hb) = (succ[a][u as usize], succ[b][u as usize]);
                    succ[a][u as usize] = hb;
                    succ[b][u as usize] = ha;
                    pred[a][hb as usize] = u;
                    pred[b][ha as usize] = u;
                    color[u as usize * d + (u ^ hb).trailing_zeros() as usize] = a as u8;
                    color[u as usize * d + (u ^ ha).trailing_zeros() as usize] = b as u8;
                }
            };
            swap(&mut succ, &mut pred, &mut color, &orbit);
            let old = counts[a] + counts[b];
            let new_a = label_cycles(&succ[a], &mut cycle_id[a]);
            let new_b = label_cycles(&succ[b], &mut cycle_id[b]);
            let delta = (new_a + new_b) as f64 - old as f64;
            if delta > 0.0 && rng.gen::<f64>() >= (-delta / TEMPERATURE).exp() {
                swap(&mut succ, &mut pred, &mut color, &orbit);
                label_cycles(&succ[a], &mut cycle_id[a]);
                label_cycles(&succ[b], &mut cycle_id[b]);
            } else {
                counts[a] = new_a;
                counts[b] = new_b;
                surplus = counts.iter().sum::<usize>() - d;
            }
            continue;
        }
        let x = rng.gen_range(0..n as Vertex);
        let i = rng.gen_range(0..d);
        let j = rng.gen_range(0..d - 1);
        let j = if j >= i { j + 1 } else { j };
        let y = x ^ (1 << i) ^ (1 << j);
        let a = color[x as usize * d + i];
        let b = color[x as usize * d + j];
        if color[y as usize * d + i] != a || color[y as usize * d + j] != b {
            continue;
        }
        if !meter.tick() {
            return Err(());
        }
        moves += 1;
        let (a, b) = (a as usize, b as usize);
        let split = |c: usize| cycle_id[c][x as usize] == cycle_id[c][y as usize];
        let delta = split(a) as i32 + split(b) as i32 - 1;
        if delta > 0 && rng.gen::<f64>() >= uphill {
            continue;
        }
        color[x as usize * d + i] = b as u8;
        color[y as usize * d + i] = b as u8;
        color[x as usize * d + j] = a as u8;
        color[y as usize * d + j] = a as u8;
        succ[a].swap(x as usize, y as usize);
        succ[b].swap(x as usize, y as usize);
        for c in [a, b] {
            pred[c][succ[c][x as usize] as usize] = x;
            pred[c][succ[c][y as usize] as usize] = y;
        }
        for c in [a, b] {
            counts[c] = label_cycles(&succ[c], &mut cycle_id[c]);
        }
        surplus = counts.iter().sum::<usize>() - d;
    }
    Ok(Some(succ))
}

/// `color[v * d + bit]` for every arc `v -> v ^ 2^bit`, and each color's
/// successor table: `d - 1` random perfect matchings of the double cover
/// (out-copies against in-copies, which stays regular), then the rest.
fn random_arc_coloring<R: rand::Rng>(d: usize, rng: &mut R) -> (Vec<u8>, Vec<Vec<Vertex>>) {
    use rand::seq::SliceRandom;

    let n = 1usize << d;
    let mut free = vec![(1u32 << d) - 1; n];
    let mut color = vec![0u8; n * d];
    let mut succ = Vec::with_capacity(d);
    for c in 0..d {
        let mut head_of = vec![Vertex::MAX; n];
        let mut tail_of = vec![Vertex::MAX; n];
        let mut order: Vec<Vertex> = (0..n as Vertex).collect();
        order.shuffle(rng);
        for &v in &order {
            let mut seen = vec![false; n];
            let placed = augment_arc(v, &free, &mut head_of, &mut tail_of, &mut seen, rng);
            debug_assert!(placed, "regular bipartite graphs have perfect matchings");
        }
        for v in 0..n {
            let bit = (v as Vertex ^ head_of[v]).trailing_zeros();
            free[v] &= !(1 << bit);
            color[v * d + bit as usize] = c as u8;
        }
        succ.push(head_of);
    }
    (color, succ)
}

fn augment_arc<R: rand::Rng>(
    v: Vertex,
    free: &[u32],
    head_of: &mut [Vertex],
    tail_of: &mut [Vertex],
    seen: &mut [bool],
    rng: &mut R,
) -> bool {
    use rand::seq::SliceRandom;

    let mut bits: Vec<u32> = (0..32).filter(|&b| free[v as usize] >> b & 1 == 1).collect();
    bits.shuffle(rng);
    for b in bits {
        let w = v ^ (1 << b);
        if std::mem::replace(&mut seen[w as usize], true) {
            continue;
        }
        let prev = tail_of[w as usize];
        if prev == Vertex::MAX || augment_arc(prev, free, head_of, tail_of, seen, rng) {
            tail_of[w as usize] = v;
            head_of[v as usize] = w;
            return true;
        }
    }
    false
}

fn inverse(succ: &[Vertex]) -> Vec<Vertex> {
    let mut pred = vec![0; succ.len()];
    for (v, &w) in succ.iter().enumerate() {
        pred[w as usize] = v as Vertex;
    }
    pred
}

/// Labels the cycles of a permutation; returns their number.
fn label_cycles(succ: &[Vertex], id: &mut [u32]) -> usize {
    id.fill(u32::MAX);
    let mut count = 0;
    for start in 0..succ.len() {
        if id[start] != u32::MAX {
            continue;
        }
        let mut v = start;
        while id[v] == u32::MAX {
            id[v] = count as u32;
            v = succ[v] as usize;
        }
        count += 1;
    }
    count
}
