//! The whole-graph partitioner: rounds of randomized star contraction along
//! heaviest edges, each followed by breaking up oversized components, then a
//! final refinement. The local oracle reproduces its output exactly.

use serde::{Deserialize, Serialize};

use crate::coin::{coin, Coin, CoinKey};
use crate::config::RunConfig;
use crate::graph::{BoundedDegreeGraph, Component, ContractedGraph, Partition, VertexId};
use crate::separator::{hyperfinite_partition, SeparatorConfig, Subgraph};

/// Target of the heaviest edge incident to component `c`: maximum weight, ties
/// going to the neighbor with the largest anchor. `None` iff `c` is isolated.
pub fn heaviest_incident_edge(gi: &ContractedGraph, c: usize) -> Option<usize> {
    gi.incident(c)
        .iter()
        .max_by_key(|&&(b, w)| (w, gi.component(b).anchor()))
        .map(|&(b, _)| b)
}

pub fn component_coin(seed: u64, iteration: usize, comp: &Component) -> Coin {
    coin(CoinKey { seed, iteration: iteration as u32, anchor: comp.anchor() })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionStats {
    /// Heads components merged into a Tails neighbor.
    pub merges: usize,
    /// Sizes of the merge groups that gained at least one satellite, as
    /// `(center anchor, satellites)`.
    pub stars: Vec<(VertexId, usize)>,
}

/// One contraction phase: every Heads component whose heaviest edge leads to a
/// Tails component merges into it. Weights of the result are sums of the merged
/// weights.
pub fn star_contraction_round(gi: &ContractedGraph, iteration: usize, seed: u64) -> (ContractedGraph, ContractionStats) {
    let nc = gi.num_components();
    let coins: Vec<Coin> = gi.components().iter().map(|c| component_coin(seed, iteration, c)).collect();
    let mut center = (0..nc).collect::<Vec<_>>();
    let mut satellites = vec![0usize; nc];
    for c in 0..nc {
        if coins[c] != Coin::Heads {
            continue;
        }
        if let Some(t) = heaviest_incident_edge(gi, c) {
            if coins[t] == Coin::Tails {
                center[c] = t;
                satellites[t] += 1;
            }
        }
    }

    let mut group_of = vec![usize::MAX; nc];
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    for c in 0..nc {
        if center[c] == c {
            group_of[c] = members.len();
            members.push(gi.component(c).members().to_vec());
        }
    }
    for c in 0..nc {
        if center[c] != c {
            let g = group_of[center[c]];
            group_of[c] = g;
            members[g].extend_from_slice(gi.component(c).members());
        }
    }
    let comps: Vec<Component> = members.into_iter().map(Component::new).collect();
    let stats = ContractionStats {
        merges: satellites.iter().sum(),
        stars: (0..nc)
            .filter(|&c| satellites[c] > 0)
            .map(|c| (comps[group_of[c]].anchor(), satellites[c]))
            .collect(),
    };
    let edges = gi.edges().map(|(a, b, w)| (group_of[a], group_of[b], w));
    (ContractedGraph::from_weighted_edges(comps, edges), stats)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BreakupStats {
    pub breakups: usize,
    /// Base edges newly cut by all breakups of the round.
    pub added_weight: u64,
    /// Broken components whose added cut exceeded `γ · |C|`.
    pub over_budget: usize,
    pub fallbacks: usize,
}

/// Splits one component with the hyperfinite partition, reporting how many
/// internal edges were cut and whether the fallback was used.
pub(crate) fn break_component(
    sub: &Subgraph,
    gamma: f64,
    d: usize,
    cfg: &SeparatorConfig,
) -> (Vec<Component>, u64, bool) {
    let out = hyperfinite_partition(sub, gamma, d, cfg);
    let mut part_of = rustc_hash::FxHashMap::default();
    for (idx, p) in out.parts.iter().enumerate() {
        for &v in p.members() {
            part_of.insert(v, idx);
        }
    }
    let cut = sub.edges().filter(|(u, v)| part_of[u] != part_of[v]).count() as u64;
    (out.parts, cut, out.fallback)
}

/// Replaces every component larger than `k(γ)` by its hyperfinite partition.
pub fn breakup_round(
    g: &BoundedDegreeGraph,
    gt: &ContractedGraph,
    gamma: f64,
    d: usize,
    cfg: &SeparatorConfig,
) -> (ContractedGraph, BreakupStats) {
    let k = cfg.part_bound(gamma, d);
    let mut stats = BreakupStats::default();
    if gt.components().iter().all(|c| c.len() <= k) {
        return (gt.clone(), stats);
    }
    let mut comps = Vec::with_capacity(gt.num_components());
    for c in gt.components() {
        if c.len() <= k {
            comps.push(c.clone());
            continue;
        }
        let sub = Subgraph::from_graph(g, c.members());
        let (parts, cut, fallback) = break_component(&sub, gamma, d, cfg);
        stats.breakups += 1;
        stats.added_weight += cut;
        stats.fallbacks += usize::from(fallback);
        if cut as f64 > gamma * c.len() as f64 {
            stats.over_budget += 1;
            log::debug!("breakup of {} vertices cut {cut} edges, budget {:.1}", c.len(), gamma * c.len() as f64);
        }
        comps.extend(parts);
    }
    (ContractedGraph::from_components_unchecked(g, comps), stats)
}

/// Per-round record, emitted as one JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTelemetry {
    pub round: usize,
    pub w_before: u64,
    pub w_after_contract: u64,
    pub w_after_breakup: u64,
    pub merges: usize,
    pub breakups: usize,
    pub successful: bool,
    pub components: usize,
    pub max_component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalRefinement {
    pub refined: usize,
    pub added_weight: u64,
}

#[derive(Debug, Clone)]
pub struct GlobalRun {
    pub partition: Partition,
    pub rounds: Vec<RoundTelemetry>,
    pub refinement: FinalRefinement,
}

impl GlobalRun {
    pub fn success_fraction(&self) -> f64 {
        if self.rounds.is_empty() {
            return 1.0;
        }
        self.rounds.iter().filter(|r| r.successful).count() as f64 / self.rounds.len() as f64
    }
}

/// The final refinement on one component: parts above `final_trigger` are
/// split with `γ = ε` into parts of at most `final_trigger` vertices.
pub(crate) fn refine_final(sub: &Subgraph, config: &RunConfig) -> (Vec<Component>, u64) {
    let (parts, cut, _) = break_component(sub, config.epsilon, config.d, &config.final_separator());
    (parts, cut)
}

/// Runs all rounds and the final refinement on the whole graph.
pub fn run_global(g: &BoundedDegreeGraph, config: &RunConfig) -> GlobalRun {
    let mut gi = ContractedGraph::from_components_unchecked(
        g,
        (0..g.n() as VertexId).map(Component::singleton).collect(),
    );
    let mut rounds = Vec::with_capacity(config.ell);
    for i in 1..=config.ell {
        let w_before = gi.total_weight();
        let (gt, cstats) = star_contraction_round(&gi, i, config.seed);
        let w_after_contract = gt.total_weight();
        let (next, bstats) = breakup_round(g, &gt, config.gamma, config.d, &config.separator);
        gi = next;
        rounds.push(RoundTelemetry {
            round: i,
            w_before,
            w_after_contract,
            w_after_breakup: gi.total_weight(),
            merges: cstats.merges,
            breakups: bstats.breakups,
            successful: (w_after_contract as f64) <= config.success_factor() * w_before as f64,
            components: gi.num_components(),
            max_component: gi.components().iter().map(Component::len).max().unwrap_or(0),
        });
    }

    let mut refinement = FinalRefinement { refined: 0, added_weight: 0 };
    let mut parts = Vec::with_capacity(gi.num_components());
    for c in gi.into_components() {
        if c.len() <= config.final_trigger {
            parts.push(c);
            continue;
        }
        let (pieces, cut) = refine_final(&Subgraph::from_graph(g, c.members()), config);
        refinement.refined += 1;
        refinement.added_weight += cut;
        parts.extend(pieces);
    }
    let partition = Partition::from_components(g.n(), parts).expect("rounds keep a partition of V");
    GlobalRun { partition, rounds, refinement }
}
