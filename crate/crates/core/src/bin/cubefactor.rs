//! Command line front end. Every command prints a JSON report on stdout.
//!
//! Exit codes:
//! - 0 success
//! - 2 parse, usage or I/O error
//! - 3 an expectation failed (`verify`)
//! - 4 open problem (`construct --k 3 --l 3`)
//! - 5 search budget exceeded
//! - 6 search space exhausted without a witness

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cubefactor::construct::{
    construct_semi_perfect_with, CertificateCache, ConstructError, DecompositionSource,
};
use cubefactor::cube::Dimension;
use cubefactor::matching::{union_cycles, Factorization, PerfectMatching};
use cubefactor::perfection::{
    first_missing_cross_edge, first_within_part_edge, is_bipartite, is_complete_bipartite,
    perfection_graph, Bipartiteness,
};
use cubefactor::search::directed::anneal_directed_hamilton_decomposition;
use cubefactor::search::enumerate::{count_perfect_matchings, for_each_factorization};
use cubefactor::search::factorization::{composite_space_size, FactorizationSearch};
use cubefactor::search::{
    max_pair_cycle_count, min_longest_cycle, search_directed_hamilton_decomposition,
    search_factorization, union_connectivity_threshold, Checkpoint, SearchBudget, SearchOptions,
    SearchStatus, Target,
};
use cubefactor::sign::{
    apply_switch_in_place, derive_switch_sequence, factorization_sign, find_switchable_squares,
    is_direction_respecting, replay_switches, SwitchMove,
};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_EXPECTATION: u8 = 3;
const EXIT_OPEN_PROBLEM: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_EXHAUSTED: u8 = 6;

#[derive(Parser)]
#[command(name = "cubefactor", version, about = "Semi-perfect 1-factorizations of hypercubes")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Reproducible reports: no timings, single thread, node budgets only.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads (the engines currently run on one).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// Resume from this file if it exists; write it when the budget runs out.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a factorization of Q_{k+l} with perfection graph K_{k,l}.
    Construct {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for Hamilton decomposition certificates beyond the
        /// embedded ones.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Check a factorization file and optional expectations.
    Verify {
        path: PathBuf,
        #[arg(long, num_args = 2, value_names = ["K", "L"])]
        expect_complete_bipartite: Option<Vec<usize>>,
        #[arg(long)]
        expect_bipartite_perfection_graph: bool,
        #[arg(long, value_name = "K")]
        expect_direction_respecting: Option<u32>,
        #[arg(long, allow_negative_numbers = true, value_name = "SIGN")]
        expect_sign: Option<i8>,
    },
    /// Report metrics of a factorization file.
    Analyze {
        path: PathBuf,
        /// Metrics to report; all when omitted.
        #[arg(long = "metric", value_enum)]
        metrics: Vec<Metric>,
        /// Write the perfection graph as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Report the cycle structure of factors I and J (1-based).
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
        /// Write the union of the `--pair` factors as DOT.
        #[arg(long, requires = "pair")]
        pair_dot: Option<PathBuf>,
    },
    /// Enumerate perfect matchings or 1-factorizations of a small cube.
    Enumerate {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        up_to_ordering: bool,
        /// Only count.
        #[arg(long)]
        count: bool,
        /// Enumerate perfect matchings instead of factorizations.
        #[arg(long)]
        matchings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Search(SearchCommand),
    #[command(subcommand)]
    Switch(SwitchCommand),
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Partition the symmetric directed Q_d into d directed Hamilton cycles.
    DirectedHamilton {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value_t = Engine::Backtrack)]
        engine: Engine,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a factorization meeting a target.
    Factorization {
        #[arg(long)]
        d: u32,
        /// complete-bipartite:K,L | cross-hamilton:K,L (alias k33-style:K,L) |
        /// all-pairs-max-cycles:C | min-longest-cycle:L
        #[arg(long)]
        target: String,
        /// Search all direction-respecting factorizations with this split.
        #[arg(long, value_name = "K")]
        direction_respecting: Option<u32>,
        #[arg(long)]
        no_sign_pruning: bool,
        /// Switches per restart of the random walk.
        #[arg(long, default_value_t = 20_000)]
        walk_length: u64,
        /// First walk starts here instead of the directional factorization.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SwitchCommand {
    /// List the switchable squares of a factorization.
    List { path: PathBuf },
    /// Switches turning the directional factorization into a
    /// direction-respecting one.
    Derive {
        path: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a JSON array of switches.
    Apply {
        #[arg(long)]
        moves: PathBuf,
        /// Start from the directional factorization of Q_d.
        #[arg(long, conflicts_with = "start")]
        d: Option<u32>,
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    /// Least, over pairs, longest cycle of the pair union.
    F,
    Cycles,
    Connectivity,
    Sign,
    Perfection,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// Exhaustive backtracking; can prove absence.
    Backtrack,
    /// Randomized local search; finds witnesses only.
    Anneal,
}

enum Failure {
    Input(String),
    OpenProblem(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(Value, u8), Failure>;

/// Run state: options plus digests of the files read and written.
struct Ctx {
    global: GlobalArgs,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn write(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.outputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(())
    }

    fn read_factorization(&mut self, path: &Path) -> Result<Factorization, Failure> {
        let text = self.read(path)?;
        Factorization::from_json(&text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    /// Writes `text` to `out` if given, otherwise returns it for the report.
    fn emit(&mut self, out: &Option<PathBuf>, text: String) -> Result<Value, Failure> {
        match out {
            Some(path) => {
                self.write(path, &text)?;
                Ok(json!(path.display().to_string()))
            }
            None => Ok(serde_json::from_str(&text).expect("emitted text is JSON")),
        }
    }

    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: self.global.budget_nodes,
            max_time: self.global.budget_seconds.map(Duration::from_secs_f64),
            deterministic: self.global.deterministic,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    if let Err(msg) = check_global(&cli.global) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    let command = command_name(&cli.command);
    let mut ctx = Ctx {
        global: cli.global,
        inputs: BTreeMap::new(),
        outputs: BTreeMap::new(),
    };
    let (result, code) = match run(&mut ctx, cli.command) {
        Ok(r) => r,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
        Err(Failure::OpenProblem(msg)) => {
            eprintln!("open problem: {msg}");
            (json!({ "status": "open-problem", "message": msg }), EXIT_OPEN_PROBLEM)
        }
    };
    let mut report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": ctx.global.seed,
        "deterministic": ctx.global.deterministic,
        "threads": ctx.global.threads.unwrap_or(1),
        "inputs": ctx.inputs,
        "outputs": ctx.outputs,
        "result": result,
        "exit_code": code,
    });
    if !ctx.global.deterministic {
        report["elapsed_seconds"] = json!(started.elapsed().as_secs_f64());
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(code)
}

fn check_global(g: &GlobalArgs) -> Result<(), String> {
    if g.threads == Some(0) {
        return Err("--threads must be at least 1".into());
    }
    if let Some(s) = g.budget_seconds {
        if !(s.is_finite() && s > 0.0) {
            return Err("--budget-seconds must be positive".into());
        }
        if g.deterministic {
            return Err("time budgets are not reproducible; use --budget-nodes with --deterministic".into());
        }
    }
    if g.deterministic && g.threads.is_some_and(|t| t > 1) {
        return Err("--deterministic runs on a single thread".into());
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct { .. } => "construct",
        Command::Verify { .. } => "verify",
        Command::Analyze { .. } => "analyze",
        Command::Enumerate { .. } => "enumerate",
        Command::Search(SearchCommand::DirectedHamilton { .. }) => "search directed-hamilton",
        Command::Search(SearchCommand::Factorization { .. }) => "search factorization",
        Command::Switch(SwitchCommand::List { .. }) => "switch list",
        Command::Switch(SwitchCommand::Derive { .. }) => "switch derive",
        Command::Switch(SwitchCommand::Apply { .. }) => "switch apply",
    }
}

fn run(ctx: &mut Ctx, command: Command) -> CmdResult {
    match command {
        Command::Construct { k, l, out, cache } => cmd_construct(ctx, k, l, out, cache),
        Command::Verify {
            path,
            expect_complete_bipartite,
            expect_bipartite_perfection_graph,
            expect_direction_respecting,
            expect_sign,
        } => {
            let expect = Expectations {
                complete_bipartite: expect_complete_bipartite.map(|v| (v[0], v[1])),
                bipartite: expect_bipartite_perfection_graph,
                direction_respecting: expect_direction_respecting,
                sign: expect_sign,
            };
            cmd_verify(ctx, &path, expect)
        }
        Command::Analyze { path, metrics, dot, pair, pair_dot } => {
            cmd_analyze(ctx, &path, metrics, dot, pair.map(|p| (p[0], p[1])), pair_dot)
        }
        Command::Enumerate { d, up_to_ordering, count, matchings, out } => {
            cmd_enumerate(ctx, d, up_to_ordering, count, matchings, out)
        }
        Command::Search(SearchCommand::DirectedHamilton { d, engine, out }) => {
            cmd_search_directed(ctx, d, engine, out)
        }
        Command::Search(SearchCommand::Factorization {
            d,
            target,
            direction_respecting,
            no_sign_pruning,
            walk_length,
            start,
            out,
        }) => {
            let start = start.map(|p| ctx.read_factorization(&p)).transpose()?;
            let options = SearchOptions {
                direction_respecting_split: direction_respecting,
                start,
                random_seed: ctx.global.seed,
                sign_pruning: !no_sign_pruning,
                walk_length,
                resume: None,
            };
            cmd_search_factorization(ctx, d, &target, options, out)
        }
        Command::Switch(cmd) => cmd_switch(ctx, cmd),
    }
}

fn dimension(d: u32) -> Result<Dimension, Failure> {
    Ok(Dimension::new(d)?)
}

fn label(i: usize) -> String {
    format!("M{}", i + 1)
}

fn labels(v: &[usize]) -> Vec<String> {
    v.iter().map(|&i| label(i)).collect()
}

fn cmd_construct(ctx: &mut Ctx, k: u32, l: u32, out: Option<PathBuf>, cache: Option<PathBuf>) -> CmdResult {
    let source = DecompositionSource {
        cache: cache.map(CertificateCache::new),
        budget: ctx.budget(),
        seed: ctx.global.seed,
    };
    let f = match construct_semi_perfect_with(k, l, &source) {
        Ok(f) => f,
        Err(ConstructError::OpenProblem) => {
            return Err(Failure::OpenProblem(
                "whether Q_6 has a 1-factorization with perfection graph K_{3,3} is an open question; \
                 `search factorization --d 6 --target complete-bipartite:3,3` runs a budgeted search"
                    .into(),
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = format!("K_{{{k},{l}}}: yes");
    eprintln!("{verdict}");
    let factorization = ctx.emit(&out, f.to_json())?;
    Ok((
        json!({
            "k": k,
            "l": l,
            "d": f.dim().get(),
            "perfection_graph": verdict,
            "sign": factorization_sign(&f),
            "factorization": factorization,
        }),
        EXIT_OK,
    ))
}

struct Expectations {
    complete_bipartite: Option<(usize, usize)>,
    bipartite: bool,
    direction_respecting: Option<u32>,
    sign: Option<i8>,
}

fn cmd_verify(ctx: &mut Ctx, path: &Path, expect: Expectations) -> CmdResult {
    let f = ctx.read_factorization(path)?;
    let g = perfection_graph(&f);
    let mut checks = Vec::new();

    if let Some((k, l)) = expect.complete_bipartite {
        let name = format!("complete-bipartite K_{{{k},{l}}}");
        match is_complete_bipartite(&g, k, l)? {
            Some(parts) => checks.push(json!({
                "check": name,
                "passed": true,
                "parts": [labels(&parts.first), labels(&parts.second)],
            })),
            None => {
                let certificate = if k + l != f.len() {
                    json!({ "factor_count": f.len() })
                } else if let Some((i, j)) = first_missing_cross_edge(&g, k) {
                    json!({ "missing_cross_edge": [label(i), label(j)] })
                } else if let Some((i, j)) = first_within_part_edge(&g, k) {
                    json!({ "within_part_edge": [label(i), label(j)] })
                } else {
                    json!({ "edge_count": g.edge_count() })
                };
                checks.push(json!({ "check": name, "passed": false, "certificate": certificate }));
            }
        }
    }
    if expect.bipartite {
        let check = match is_bipartite(&g) {
            Bipartiteness::Bipartite { coloring } => json!({
                "check": "bipartite perfection graph",
                "passed": true,
                "coloring": coloring,
            }),
            Bipartiteness::OddCycle { cycle } => json!({
                "check": "bipartite perfection graph",
                "passed": false,
                "certificate": { "odd_cycle": labels(&cycle) },
            }),
        };
        checks.push(check);
    }
    if let Some(k) = expect.direction_respecting {
        let name = format!("direction respecting with split {k}");
        if is_direction_respecting(&f, k) {
            checks.push(json!({ "check": name, "passed": true }));
        } else {
            let certificate = direction_violation(&f, k)
                .map(|(i, u, v, dir)| json!({ "factor": label(i), "edge": [u, v], "direction": dir }))
                .unwrap_or_else(|| json!({ "split": k, "d": f.dim().get() }));
            checks.push(json!({ "check": name, "passed": false, "certificate": certificate }));
        }
    }
    if let Some(want) = expect.sign {
        if want != 1 && want != -1 {
            return Err(Failure::Input("--expect-sign takes 1 or -1".into()));
        }
        let got = factorization_sign(&f).value();
        checks.push(json!({
            "check": format!("sign {want:+}"),
            "passed": got == want,
            "sign": got,
        }));
    }

    let passed = checks.iter().all(|c| c["passed"] == json!(true));
    for c in &checks {
        let mark = if c["passed"] == json!(true) { "pass" } else { "FAIL" };
        eprintln!("{mark}: {}", c["check"].as_str().unwrap_or_default());
    }
    let result = json!({
        "d": f.dim().get(),
        "valid_factorization": true,
        "checks": checks,
        "passed": passed,
    });
    Ok((result, if passed { EXIT_OK } else { EXIT_EXPECTATION }))
}

/// First edge breaking the direction-respecting split `k`:
/// `(factor, u, v, direction)`.
fn direction_violation(f: &Factorization, k: u32) -> Option<(usize, u32, u32, u32)> {
    let d = f.dim().get();
    if k == 0 || k >= d {
        return None;
    }
    f.factors().iter().enumerate().find_map(|(i, m)| {
        let allowed = if i < k as usize { 1..=k } else { k + 1..=d };
        m.edges()
            .into_iter()
            .map(|(u, v)| (u, v, (u ^ v).trailing_zeros() + 1))
            .find(|(_, _, dir)| !allowed.contains(dir))
            .map(|(u, v, dir)| (i, u, v, dir))
    })
}

fn cmd_analyze(
    ctx: &mut Ctx,
    path: &Path,
    metrics: Vec<Metric>,
    dot: Option<PathBuf>,
    pair: Option<(usize, usize)>,
    pair_dot: Option<PathBuf>,
) -> CmdResult {
    let f = ctx.read_factorization(path)?;
    let all = metrics.is_empty();
    let wants = |m: Metric| all || metrics.contains(&m);
    let mut result = serde_json::Map::new();
    result.insert("d".into(), json!(f.dim().get()));
    let g = perfection_graph(&f);

    if wants(Metric::F) {
        result.insert("f".into(), json!(min_longest_cycle(&f)));
    }
    if wants(Metric::Cycles) {
        let mut pairs = Vec::new();
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let c = union_cycles(f.factor(i), f.factor(j))?;
                pairs.push(json!({ "pair": [label(i), label(j)], "cycles": c.count(), "lengths": c.lengths() }));
            }
        }
        result.insert(
            "cycles".into(),
            json!({ "max_pair_cycle_count": max_pair_cycle_count(&f), "pairs": pairs }),
        );
    }
    if wants(Metric::Connectivity) {
        let t = union_connectivity_threshold(&f);
        result.insert(
            "connectivity".into(),
            json!({
                "threshold": t.threshold,
                "disconnected_witness": t.disconnected_witness.as_deref().map(labels),
            }),
        );
    }
    if wants(Metric::Sign) {
        result.insert("sign".into(), json!(factorization_sign(&f)));
    }
    if wants(Metric::Perfection) {
        let edges: Vec<_> = g.edges().into_iter().map(|(i, j)| [label(i), label(j)]).collect();
        let bipartite = match is_bipartite(&g) {
            Bipartiteness::Bipartite { coloring } => json!({ "bipartite": true, "coloring": coloring }),
            Bipartiteness::OddCycle { cycle } => json!({ "bipartite": false, "odd_cycle": labels(&cycle) }),
        };
        result.insert(
            "perfection_graph".into(),
            json!({ "edges": edges, "degree_sequence": g.degree_sequence(), "bipartiteness": bipartite }),
        );
    }
    if let Some((i, j)) = pair {
        let n = f.len();
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Failure::Input(format!("--pair needs two distinct factors in 1..={n}")));
        }
        let (m, nn) = (f.factor(i - 1), f.factor(j - 1));
        let c = union_cycles(m, nn)?;
        result.insert(
            "pair".into(),
            json!({ "pair": [label(i - 1), label(j - 1)], "cycles": c.cycles }),
        );
        if let Some(p) = &pair_dot {
            ctx.write(p, &pair_union_dot(m, nn, i, j))?;
        }
    }
    if let Some(p) = &dot {
        ctx.write(p, &g.to_dot())?;
    }
    Ok((Value::Object(result), EXIT_OK))
}

fn pair_union_dot(m: &PerfectMatching, n: &PerfectMatching, i: usize, j: usize) -> String {
    let mut s = format!("graph M{i}_M{j} {{\n");
    for (u, v) in m.edges() {
        s.push_str(&format!("  {u} -- {v} [label=\"M{i}\"];\n"));
    }
    for (u, v) in n.edges() {
        s.push_str(&format!("  {u} -- {v} [label=\"M{j}\", style=dashed];\n"));
    }
    s.push_str("}\n");
    s
}

fn cmd_enumerate(
    ctx: &mut Ctx,
    d: u32,
    up_to_ordering: bool,
    count_only: bool,
    matchings: bool,
    out: Option<PathBuf>,
) -> CmdResult {
    let dim = dimension(d)?;
    if matchings {
        if count_only {
            return Ok((json!({ "d": d, "perfect_matchings": count_perfect_matchings(dim)? }), EXIT_OK));
        }
        let all = cubefactor::search::enumerate_perfect_matchings(dim)?;
        let tables: Vec<&[u32]> = all.iter().map(|m| m.partners()).collect();
        let listing = ctx.emit(&out, serde_json::to_string(&tables)?)?;
        return Ok((json!({ "d": d, "perfect_matchings": all.len(), "matchings": listing }), EXIT_OK));
    }
    // number of factorizations by how many directional matchings they use
    let mut breakdown: BTreeMap<usize, u64> = BTreeMap::new();
    let mut count = 0u64;
    let mut listing = Vec::new();
    let directional: Vec<PerfectMatching> = dim
        .directions()
        .map(|dir| PerfectMatching::directional(dim, dir))
        .collect::<Result<_, _>>()?;
    for_each_factorization(dim, up_to_ordering, |f| {
        count += 1;
        let k = f.factors().iter().filter(|m| directional.contains(m)).count();
        *breakdown.entry(k).or_default() += 1;
        if !count_only {
            listing.push(f.to_json_value());
        }
        std::ops::ControlFlow::Continue(())
    })?;
    let mut result = json!({
        "d": d,
        "up_to_ordering": up_to_ordering,
        "count": count,
        "by_directional_factors": breakdown,
    });
    if !count_only {
        result["factorizations"] = ctx.emit(&out, serde_json::to_string(&listing)?)?;
    }
    eprintln!("{count}");
    Ok((result, EXIT_OK))
}

fn status_code(status: SearchStatus) -> u8 {
    match status {
        SearchStatus::Found => EXIT_OK,
        SearchStatus::ExhaustedNoWitness => EXIT_EXHAUSTED,
        SearchStatus::BudgetExceeded => EXIT_BUDGET,
    }
}

fn cmd_search_directed(ctx: &mut Ctx, d: u32, engine: Engine, out: Option<PathBuf>) -> CmdResult {
    let dim = dimension(d)?;
    if d < 2 {
        return Err(Failure::Input("directed Hamilton decompositions need d >= 2".into()));
    }
    let budget = ctx.budget();
    let outcome = match engine {
        Engine::Backtrack => search_directed_hamilton_decomposition(dim, budget),
        Engine::Anneal => {
            if !budget.is_bounded() {
                return Err(Failure::Input("the anneal engine needs --budget-nodes or --budget-seconds".into()));
            }
            anneal_directed_hamilton_decomposition(dim, ctx.global.seed, budget)
        }
    };
    let mut result = json!({
        "d": d,
        "engine": match engine { Engine::Backtrack => "backtrack", Engine::Anneal => "anneal" },
        "status": outcome.status,
        "nodes_explored": outcome.nodes_explored,
    });
    if let Some(h) = &outcome.witness {
        result["witness"] = ctx.emit(&out, h.to_json())?;
    }
    eprintln!("{}", serde_json::to_string(&outcome.status)?.trim_matches('"'));
    Ok((result, status_code(outcome.status)))
}

fn cmd_search_factorization(
    ctx: &mut Ctx,
    d: u32,
    target: &str,
    mut options: SearchOptions,
    out: Option<PathBuf>,
) -> CmdResult {
    let dim = dimension(d)?;
    let target: Target = target.parse()?;
    let checkpoint_path = ctx.global.checkpoint.clone();
    let mut resumed = false;
    if let Some(p) = &checkpoint_path {
        if p.exists() {
            let text = ctx.read(p)?;
            let cp: Checkpoint = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            options.resume = Some(cp);
            resumed = true;
        }
    }
    let search: FactorizationSearch = search_factorization(dim, target, &options, ctx.budget())?;
    let outcome = &search.outcome;
    let mut result = json!({
        "d": d,
        "target": target.to_string(),
        "direction_respecting_split": options.direction_respecting_split,
        "sign_pruning": options.sign_pruning,
        "required_sign": target.required_sign(),
        "status": outcome.status,
        "nodes_explored": outcome.nodes_explored,
        "sign_pruned": search.sign_pruned,
        "resumed": resumed,
    });
    if let Some(k) = options.direction_respecting_split {
        result["space_size"] = json!(composite_space_size(dim, k)?.map(|n| n.to_string()));
    }
    if let Some(w) = &outcome.witness {
        result["witness"] = ctx.emit(&out, w.to_json())?;
    }
    if let (Some(cp), Some(p)) = (&search.checkpoint, &checkpoint_path) {
        let text = serde_json::to_string_pretty(cp)?;
        ctx.write(p, &text)?;
        result["checkpoint"] = json!(p.display().to_string());
    }
    eprintln!(
        "{} after {} nodes",
        serde_json::to_string(&outcome.status)?.trim_matches('"'),
        outcome.nodes_explored
    );
    Ok((result, status_code(outcome.status)))
}

fn cmd_switch(ctx: &mut Ctx, cmd: SwitchCommand) -> CmdResult {
    match cmd {
        SwitchCommand::List { path } => {
            let f = ctx.read_factorization(&path)?;
            let moves = find_switchable_squares(&f);
            Ok((json!({ "d": f.dim().get(), "count": moves.len(), "moves": moves }), EXIT_OK))
        }
        SwitchCommand::Derive { path, k, out } => {
            let f = ctx.read_factorization(&path)?;
            let moves = derive_switch_sequence(&f, k)?;
            // replaying must reproduce the input
            let replayed = replay_switches(f.dim(), &moves)?;
            if replayed != f {
                return Err(Failure::Input("derived switch sequence does not replay to the input".into()));
            }
            let count = moves.len();
            let listing = ctx.emit(&out, serde_json::to_string(&moves)?)?;
            Ok((json!({ "d": f.dim().get(), "split": k, "count": count, "moves": listing }), EXIT_OK))
        }
        SwitchCommand::Apply { moves, d, start, out } => {
            let text = ctx.read(&moves)?;
            let moves: Vec<SwitchMove> = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", moves.display())))?;
            let mut f = match (d, start) {
                (_, Some(p)) => ctx.read_factorization(&p)?,
                (Some(d), None) => Factorization::directional(dimension(d)?),
                (None, None) => return Err(Failure::Input("give --d or --start".into())),
            };
            for mv in &moves {
                apply_switch_in_place(&mut f, mv)?;
            }
            let sign = factorization_sign(&f);
            let factorization = ctx.emit(&out, f.to_json())?;
            Ok((
                json!({ "d": f.dim().get(), "applied": moves.len(), "sign": sign, "factorization": factorization }),
                EXIT_OK,
            ))
        }
    }
}
