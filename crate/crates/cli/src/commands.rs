use std::fs;
use std::path::Path;

use log::info;
use poracle::apps::{
    approx_opt, approx_oracle_config, exact_small_solver, is_planar_exact, is_planar_subgraph, test_planarity,
    tester_oracle_config, ApproxConfig, Decision, Problem, TesterConfig,
};
use poracle::generate::{generate as generate_graph, GeneratorKind, GeneratorSpec};
use poracle::{
    run_global, validate_partition, BoundedDegreeGraph, GraphAccess, OracleState, Partition, RoundTelemetry,
    RunConfig, Subgraph, VertexId, Violation,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::report::Reporter;
use crate::{CliError, GraphArgs, Kind, RunArgs};

/// Planarity of inputs above this size is not checked.
const PLANARITY_CHECK_LIMIT: usize = 100_000;

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    event: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(flatten)]
    body: T,
}

/// `seed` is `None` when the body already carries one.
fn tagged<T: Serialize>(event: &str, seed: Option<u64>, body: T) -> Tagged<'_, T> {
    Tagged { event, seed, body }
}

impl GraphArgs {
    fn generator(&self) -> GeneratorKind {
        match self.kind {
            Kind::Grid => GeneratorKind::Grid,
            Kind::Triangulation => GeneratorKind::RandomTriangulation,
            Kind::Regular => GeneratorKind::RandomRegular { degree: self.degree },
            Kind::TreeUnion => GeneratorKind::TreeUnion { trees: self.trees },
        }
    }

    /// The input file, or a generated graph for `seed`.
    fn load(&self, seed: u64) -> Result<BoundedDegreeGraph, CliError> {
        match &self.input {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                Ok(BoundedDegreeGraph::parse(&text, self.d)?)
            }
            None => {
                let spec = GeneratorSpec { d: self.d, ..GeneratorSpec::new(self.generator(), self.n, seed) };
                Ok(generate_graph(&spec)?)
            }
        }
    }

    /// Whether the cut guarantee applies; `None` when the graph is too large to check.
    fn planar(&self, g: &BoundedDegreeGraph) -> Option<bool> {
        match self.kind {
            Kind::Grid | Kind::Triangulation if self.input.is_none() => Some(true),
            _ if g.n() <= PLANARITY_CHECK_LIMIT => Some(is_planar_exact(g)),
            _ => None,
        }
    }
}

impl RunArgs {
    fn trial_seeds(&self) -> Result<Vec<u64>, CliError> {
        if self.seeds == 0 {
            return Err(CliError::Usage("--seeds must be at least 1".into()));
        }
        Ok((0..self.seeds).map(|i| self.seed.wrapping_add(i)).collect())
    }

    fn config(&self, eps: f64, d: usize, seed: u64) -> Result<RunConfig, CliError> {
        let mut b = RunConfig::builder(eps, d).mode(self.mode.into()).seed(seed);
        if let Some(k) = self.k {
            if self.mode == crate::ModeArg::Theory {
                return Err(CliError::Usage("--k only applies to practical mode".into()));
            }
            b = b.k_cap(k);
        }
        if let Some(ell) = self.ell {
            b = b.ell(ell);
        }
        Ok(b.build()?)
    }

    /// Rebuilds an application's oracle configuration with the `--k` and `--ell` overrides.
    fn adjust(&self, base: RunConfig) -> Result<RunConfig, CliError> {
        if self.k.is_none() && self.ell.is_none() {
            return Ok(base);
        }
        self.config(base.epsilon, base.d, base.seed)
    }
}

fn violation_dump<T: Serialize>(what: &str, items: &[T]) -> CliError {
    let dump = serde_json::to_string_pretty(items).unwrap_or_else(|e| format!("<unserializable: {e}>"));
    CliError::Invariant(format!("{what}\n{dump}"))
}

fn sample_vertices(n: usize, count: usize, seed: u64) -> Vec<VertexId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0..n as VertexId)).collect()
}

#[derive(Serialize)]
struct GenerateRow {
    n: usize,
    d: usize,
    edges: usize,
    max_degree: usize,
    planar: Option<bool>,
}

pub fn generate(graph: &GraphArgs, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let g = graph.load(seed)?;
    let Some(dir) = out else {
        print!("{}", g.to_edge_list());
        return Ok(());
    };
    let planar = (g.n() <= PLANARITY_CHECK_LIMIT).then(|| is_planar_exact(&g));
    let row = GenerateRow { n: g.n(), d: g.d(), edges: g.num_edges(), max_degree: g.max_degree(), planar };
    let mut rep = Reporter::new(Some(dir))?;
    rep.record(&tagged("generate", Some(seed), &row))?;
    rep.artifact("graph.txt", &g.to_edge_list())?;
    rep.summary(&[row])?;
    rep.finish()?;
    let planar_kind = matches!(graph.kind, Kind::Grid | Kind::Triangulation) && graph.input.is_none();
    if planar_kind && planar == Some(false) {
        return Err(CliError::Invariant(format!("{:?} generator produced a non-planar graph", graph.kind)));
    }
    Ok(())
}

#[derive(Serialize)]
struct PartitionRow {
    seed: u64,
    n: usize,
    parts: usize,
    max_part: usize,
    k_final: usize,
    cut: u64,
    cut_bound: f64,
    ell: usize,
    success_fraction: f64,
    refined: usize,
    valid: bool,
}

struct PartitionTrial {
    row: PartitionRow,
    rounds: Vec<RoundTelemetry>,
    json: String,
    violations: Vec<Violation>,
    round_errors: Vec<String>,
}

fn partition_trial(graph: &GraphArgs, run: &RunArgs, eps: f64, seed: u64) -> Result<PartitionTrial, CliError> {
    let g = graph.load(seed)?;
    let cfg = run.config(eps, g.d(), seed)?;
    let result = run_global(&g, &cfg);
    let report = validate_partition(&g, &result.partition, eps, cfg.k_final);
    let json = result.partition.to_json();
    if Partition::from_json(g.n(), &json)? != result.partition {
        return Err(CliError::Invariant(format!("seed {seed}: partition JSON does not round-trip")));
    }
    // the cut condition is only guaranteed on planar inputs
    let planar = graph.planar(&g).unwrap_or(false);
    let violations: Vec<Violation> = report
        .violations
        .iter()
        .filter(|v| planar || !matches!(v, Violation::CutExceeded { .. }))
        .cloned()
        .collect();
    let round_errors = result
        .rounds
        .iter()
        .filter(|r| r.w_after_contract > r.w_before)
        .map(|r| format!("seed {seed} round {}: contraction raised the cut from {} to {}", r.round, r.w_before, r.w_after_contract))
        .collect();
    let row = PartitionRow {
        seed,
        n: g.n(),
        parts: result.partition.num_parts(),
        max_part: result.partition.max_part_size(),
        k_final: cfg.k_final,
        cut: report.cut,
        cut_bound: eps * g.n() as f64,
        ell: cfg.ell,
        success_fraction: result.success_fraction(),
        refined: result.refinement.refined,
        valid: report.valid,
    };
    Ok(PartitionTrial { row, rounds: result.rounds, json, violations, round_errors })
}

pub fn partition(graph: &GraphArgs, run: &RunArgs, eps: f64) -> Result<(), CliError> {
    let seeds = run.trial_seeds()?;
    let trials = seeds
        .par_iter()
        .map(|&s| partition_trial(graph, run, eps, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rep = Reporter::new(run.out.as_deref())?;
    let mut violations = Vec::new();
    let mut round_errors = Vec::new();
    for t in &trials {
        for r in &t.rounds {
            rep.record(&tagged("round", Some(t.row.seed), r))?;
        }
        rep.record(&tagged("partition", None, &t.row))?;
        rep.artifact(&format!("partition-{}.json", t.row.seed), &t.json)?;
        violations.extend(t.violations.iter().map(|v| (t.row.seed, v.clone())));
        round_errors.extend(t.round_errors.iter().cloned());
    }
    let rows: Vec<&PartitionRow> = trials.iter().map(|t| &t.row).collect();
    rep.summary(&rows)?;
    rep.finish()?;
    if !round_errors.is_empty() {
        return Err(violation_dump("per-round weight check failed", &round_errors));
    }
    if !violations.is_empty() {
        return Err(violation_dump("partition conditions failed", &violations));
    }
    Ok(())
}

#[derive(Serialize)]
struct QueryRecord {
    vertex: VertexId,
    anchor: VertexId,
    size: usize,
    probes: u64,
}

#[derive(Serialize)]
struct OracleRow {
    seed: u64,
    queries: usize,
    max_part: usize,
    max_probes: u64,
    neighbor_probes: u64,
    distinct_vertices_touched: u64,
    q_bound_log10: f64,
    k_final: usize,
}

pub fn oracle(graph: &GraphArgs, run: &RunArgs, eps: f64, queries: &[u32], sample: usize) -> Result<(), CliError> {
    let seeds = run.trial_seeds()?;
    let trials = seeds
        .par_iter()
        .map(|&seed| -> Result<_, CliError> {
            let g = graph.load(seed)?;
            let cfg = run.config(eps, g.d(), seed)?;
            let k_final = cfg.k_final;
            let oracle = OracleState::new(GraphAccess::new(&g), cfg)?;
            let vertices = if queries.is_empty() { sample_vertices(g.n(), sample, seed) } else { queries.to_vec() };
            let mut records = Vec::with_capacity(vertices.len());
            let mut errors = Vec::new();
            for &v in &vertices {
                let (part, probes) = oracle.oracle_query_counted(v)?;
                if !part.contains(v) || part.len() > k_final || !g.is_connected_set(part.members()) {
                    errors.push(format!("seed {seed}: bad part for vertex {v}: {:?}", part.members()));
                }
                records.push(QueryRecord { vertex: v, anchor: part.anchor(), size: part.len(), probes });
            }
            let stats = oracle.query_stats();
            if stats.max_probes_per_query > 0 && (stats.max_probes_per_query as f64).log10() > stats.q_bound_log10 {
                errors.push(format!("seed {seed}: {} probes exceed the query bound", stats.max_probes_per_query));
            }
            let row = OracleRow {
                seed,
                queries: records.len(),
                max_part: records.iter().map(|r| r.size).max().unwrap_or(0),
                max_probes: stats.max_probes_per_query,
                neighbor_probes: stats.neighbor_probes,
                distinct_vertices_touched: stats.distinct_vertices_touched,
                q_bound_log10: stats.q_bound_log10,
                k_final,
            };
            Ok((records, row, errors))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rep = Reporter::new(run.out.as_deref())?;
    let mut errors = Vec::new();
    let mut rows = Vec::new();
    for (records, row, errs) in trials {
        for r in &records {
            rep.record(&tagged("query", Some(row.seed), r))?;
        }
        rep.record(&tagged("oracle", None, &row))?;
        rows.push(row);
        errors.extend(errs);
    }
    rep.summary(&rows)?;
    rep.finish()?;
    if !errors.is_empty() {
        return Err(violation_dump("oracle answers failed", &errors));
    }
    Ok(())
}

#[derive(Serialize)]
struct EquivalenceRow {
    seed: u64,
    n: usize,
    parts: usize,
    matches: bool,
    /// First vertex whose parts differ.
    first_mismatch: Option<VertexId>,
    neighbor_probes: u64,
}

pub fn equivalence(graph: &GraphArgs, run: &RunArgs, eps: f64) -> Result<(), CliError> {
    let seeds = run.trial_seeds()?;
    let rows = seeds
        .par_iter()
        .map(|&seed| -> Result<_, CliError> {
            let g = graph.load(seed)?;
            let cfg = run.config(eps, g.d(), seed)?;
            let global = run_global(&g, &cfg).partition;
            let oracle = OracleState::new(GraphAccess::new(&g), cfg)?;
            let local = oracle.partition()?;
            let first_mismatch =
                (0..g.n() as VertexId).find(|&v| global.part_of(v).members() != local.part_of(v).members());
            Ok(EquivalenceRow {
                seed,
                n: g.n(),
                parts: global.num_parts(),
                matches: first_mismatch.is_none(),
                first_mismatch,
                neighbor_probes: oracle.query_stats().neighbor_probes,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rep = Reporter::new(run.out.as_deref())?;
    for r in &rows {
        rep.record(&tagged("equivalence", None, r))?;
    }
    rep.summary(&rows)?;
    rep.finish()?;
    let matched = rows.iter().filter(|r| r.matches).count();
    eprintln!("{matched}/{} exact matches", rows.len());
    let failed: Vec<&EquivalenceRow> = rows.iter().filter(|r| !r.matches).collect();
    if !failed.is_empty() {
        return Err(violation_dump("oracle and global partitions differ", &failed));
    }
    Ok(())
}

#[derive(Serialize)]
struct TestRow {
    seed: u64,
    n: usize,
    decision: Decision,
    samples: usize,
    oracle_eps: f64,
    estimated_cut_fraction: f64,
    threshold: f64,
    witness_size: Option<usize>,
    planar: Option<bool>,
}

pub fn test(
    graph: &GraphArgs,
    run: &RunArgs,
    eps: f64,
    c_test: f64,
    reject_factor: f64,
    samples: Option<usize>,
) -> Result<(), CliError> {
    let seeds = run.trial_seeds()?;
    let trials = seeds
        .par_iter()
        .map(|&seed| -> Result<_, CliError> {
            let g = graph.load(seed)?;
            let cfg = run.adjust(tester_oracle_config(eps, g.d(), run.mode.into(), seed)?)?;
            let oracle_eps = cfg.epsilon;
            let oracle = OracleState::new(GraphAccess::new(&g), cfg)?;
            let tcfg = TesterConfig { c_test, samples, reject_factor, sample_seed: seed };
            let verdict = test_planarity(&oracle, eps, &tcfg)?;
            let mut errors = Vec::new();
            if let Some(w) = &verdict.non_planar_part {
                let sub = Subgraph::from_graph(&g, w);
                if !g.is_connected_set(w) || is_planar_subgraph(&sub) {
                    errors.push(format!("seed {seed}: rejection witness {w:?} is not a connected non-planar part"));
                }
            }
            let row = TestRow {
                seed,
                n: g.n(),
                decision: verdict.decision,
                samples: verdict.sampled.len(),
                oracle_eps,
                estimated_cut_fraction: verdict.estimated_cut_fraction,
                threshold: verdict.threshold,
                witness_size: verdict.non_planar_part.as_ref().map(Vec::len),
                planar: graph.planar(&g),
            };
            Ok((row, errors))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rep = Reporter::new(run.out.as_deref())?;
    let mut errors = Vec::new();
    let mut rows = Vec::new();
    for (row, errs) in trials {
        rep.record(&tagged("test", None, &row))?;
        rows.push(row);
        errors.extend(errs);
    }
    rep.summary(&rows)?;
    rep.finish()?;
    if !errors.is_empty() {
        return Err(violation_dump("tester output failed", &errors));
    }
    Ok(())
}

#[derive(Serialize)]
struct ApproxRow {
    seed: u64,
    n: usize,
    problem: Problem,
    estimate: f64,
    samples: usize,
    oracle_eps: f64,
    exact: Option<usize>,
    /// `|estimate − exact| / n`.
    error_fraction: Option<f64>,
}

pub fn approx(
    graph: &GraphArgs,
    run: &RunArgs,
    eps: f64,
    problem: Problem,
    c_apx: f64,
    samples: Option<usize>,
    exact: bool,
) -> Result<(), CliError> {
    let seeds = run.trial_seeds()?;
    let rows = seeds
        .par_iter()
        .map(|&seed| -> Result<_, CliError> {
            let g = graph.load(seed)?;
            let cfg = run.adjust(approx_oracle_config(eps, g.d(), run.mode.into(), seed)?)?;
            let oracle_eps = cfg.epsilon;
            let oracle = OracleState::new(GraphAccess::new(&g), cfg)?;
            let acfg = ApproxConfig { c_apx, samples, sample_seed: seed };
            let res = approx_opt(&oracle, problem, eps, &acfg)?;
            let opt = if exact {
                let whole = Subgraph::whole(&g);
                let sol = exact_small_solver(&whole, problem)?;
                if !sol.verify(&whole) {
                    return Err(CliError::Invariant(format!("seed {seed}: exact {problem} witness fails")));
                }
                Some(sol.size)
            } else {
                None
            };
            info!("seed {seed}: estimate {:.1}", res.estimate);
            Ok(ApproxRow {
                seed,
                n: g.n(),
                problem,
                estimate: res.estimate,
                samples: res.sample_size,
                oracle_eps,
                exact: opt,
                error_fraction: opt.map(|o| (res.estimate - o as f64).abs() / g.n() as f64),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rep = Reporter::new(run.out.as_deref())?;
    for r in &rows {
        rep.record(&tagged("approx", None, r))?;
    }
    rep.summary(&rows)?;
    rep.finish()?;
    let bad: Vec<&ApproxRow> =
        rows.iter().filter(|r| !(r.estimate >= 0.0 && r.estimate <= r.n as f64)).collect();
    if !bad.is_empty() {
        return Err(violation_dump("estimates outside [0, n]", &bad));
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchRow {
    eps: f64,
    ell: usize,
    k: usize,
    samples: usize,
    max_probes: u64,
    mean_probes: f64,
    q_bound_log10: f64,
    over_bound: usize,
}

/// Least-squares slope of `ln(max probes)` against `ln(1/ε)`.
fn trend(rows: &[BenchRow]) -> f64 {
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|r| ((1.0 / r.eps).ln(), (r.max_probes.max(1) as f64).ln())).collect();
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx
}

pub fn bench(graph: &GraphArgs, run: &RunArgs, epsilons: &[f64], samples: usize, short_rounds: bool) -> Result<(), CliError> {
    if epsilons.is_empty() || samples == 0 {
        return Err(CliError::Usage("bench needs at least one ε and one sample".into()));
    }
    let g = graph.load(run.seed)?;
    let vertices = sample_vertices(g.n(), samples, run.seed);
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let cfg = if short_rounds && run.ell.is_none() {
            let ell = (1.0 / eps).log2().ceil().max(0.0) as usize + 2;
            RunArgs { ell: Some(ell), ..run.clone() }.config(eps, g.d(), run.seed)?
        } else {
            run.config(eps, g.d(), run.seed)?
        };
        let measured = vertices
            .par_iter()
            .map(|&v| -> Result<_, CliError> {
                let oracle = OracleState::new(GraphAccess::new(&g), cfg.clone())?;
                let (_, probes) = oracle.oracle_query_counted(v)?;
                Ok((probes, oracle.query_stats().q_bound_log10))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let bound = measured.first().map_or(0.0, |m| m.1);
        let probes: Vec<u64> = measured.iter().map(|m| m.0).collect();
        rows.push(BenchRow {
            eps,
            ell: cfg.ell,
            k: cfg.k,
            samples,
            max_probes: probes.iter().copied().max().unwrap_or(0),
            mean_probes: probes.iter().sum::<u64>() as f64 / samples as f64,
            q_bound_log10: bound,
            over_bound: probes.iter().filter(|&&p| p > 0 && (p as f64).log10() > bound).count(),
        });
    }
    let mut rep = Reporter::new(run.out.as_deref())?;
    for r in &rows {
        rep.record(&tagged("bench", Some(run.seed), r))?;
    }
    rep.summary(&rows)?;
    rep.finish()?;
    let over: usize = rows.iter().map(|r| r.over_bound).sum();
    if over > 0 {
        return Err(violation_dump("queries above the closed-form bound", &rows));
    }
    // probes should not fall as ε shrinks
    let slope = trend(&rows);
    if slope < 0.0 {
        return Err(violation_dump(&format!("probe counts fall as ε shrinks (slope {slope:.3})"), &rows));
    }
    Ok(())
}
