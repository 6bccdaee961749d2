//! Local emulation of the global partitioner.
//!
//! To find `C^i(v)`, the component of `v` after round `i`, the oracle first
//! finds `C^{i-1}(v)` and then decides the merge it takes part in:
//!
//! * `C^{i-1}(v)` flips Tails: it is a potential star center. Every adjacent
//!   `(i-1)`-component that flips Heads and whose heaviest edge points back at
//!   it joins it.
//! * It flips Heads: its heaviest incident edge picks a neighbor `T`. If `T`
//!   flips Tails, the merged component is `T` with all of `T`'s satellites
//!   (found exactly as above); otherwise `C^{i-1}(v)` stays alone.
//!
//! Computing a heaviest edge needs the `(i-1)`-components of all boundary
//! endpoints, which is where the recursion on `i` comes from. Oversized merged
//! components are split with the same deterministic procedure the global run
//! uses, on the subgraph they induce, which is already known at that point.
//!
//! Coins are keyed by `(seed, round, anchor)` so they need no storage; the memo
//! only caches resolved components and incidence lists.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::coin::{coin, Coin, CoinKey};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::global::{break_component, refine_final};
use crate::graph::{Component, GraphAccess, Partition, QueryCounts, VertexId};
use crate::separator::Subgraph;

type FxDashMap<K, V> = DashMap<K, V, FxBuildHasher>;

#[derive(Debug)]
struct Resolved {
    comp: Component,
    /// Anchor of the heaviest-edge neighbor in the same level's contracted graph.
    target: OnceLock<Option<VertexId>>,
}

impl Resolved {
    fn new(comp: Component) -> Arc<Self> {
        Arc::new(Resolved { comp, target: OnceLock::new() })
    }

    fn anchor(&self) -> VertexId {
        self.comp.anchor()
    }
}

/// Probes charged on behalf of one oracle query.
#[derive(Debug, Default)]
struct QueryCtx {
    probes: u64,
}

/// Counters reported by [`OracleState::query_stats`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryStats {
    /// Every `neighbor(v, i)` probe, including repeated ones.
    pub neighbor_probes: u64,
    /// Vertices whose incidence lists were probed at least once.
    pub distinct_vertices_touched: u64,
    pub oracle_queries: u64,
    /// Largest number of probes charged to a single oracle query.
    pub max_probes_per_query: u64,
    /// Resolved components across all levels.
    pub memo_components: u64,
    /// Closed-form bound `Q^ℓ` with the configured `d`, `k` and `ℓ`.
    pub q_bound: f64,
    pub q_bound_log10: f64,
}

/// `Q^1 = d²`, `Q^i = d²k² + d²k²·Q^{i-1}`, evaluated in floating point.
pub fn query_bound(d: usize, k: usize, ell: usize) -> f64 {
    let d2 = (d as f64).powi(2);
    let step = d2 * (k as f64).powi(2);
    let mut q = d2;
    for _ in 1..ell {
        q = step + step * q;
    }
    q
}

/// `log10` of [`query_bound`], finite even where the bound overflows.
pub fn query_bound_log10(d: usize, k: usize, ell: usize) -> f64 {
    let d2 = 2.0 * (d.max(1) as f64).log10();
    let step = d2 + 2.0 * (k.max(1) as f64).log10();
    let mut q = d2;
    for _ in 1..ell {
        // log10(s + s*q) = log10(s) + log10(1 + q)
        q = step + if q > 15.0 { q } else { (1.0 + 10f64.powf(q)).log10() };
    }
    q
}

/// A partition oracle over one graph, one configuration and one seed.
///
/// Queries take `&self` and may run concurrently: the answer is a pure function
/// of the graph, the configuration and the seed, and memo entries are only ever
/// written with that value.
#[derive(Debug)]
pub struct OracleState<'g> {
    access: GraphAccess<'g>,
    config: RunConfig,
    adjacency: FxDashMap<VertexId, Arc<[VertexId]>>,
    /// Per level `0..=ℓ+1`: vertex → anchor of its component. Level `ℓ+1` holds
    /// the final parts.
    anchors: Vec<FxDashMap<VertexId, VertexId>>,
    components: Vec<FxDashMap<VertexId, Arc<Resolved>>>,
    queries: AtomicU64,
    max_probes: AtomicU64,
}

impl<'g> OracleState<'g> {
    pub fn new(access: GraphAccess<'g>, config: RunConfig) -> Result<Self> {
        config.validate()?;
        if access.d() > config.d {
            return Err(Error::Config(format!(
                "graph degree bound {} exceeds configured d={}",
                access.d(),
                config.d
            )));
        }
        let levels = config.ell + 2;
        Ok(OracleState {
            access,
            adjacency: FxDashMap::default(),
            anchors: (0..levels).map(|_| FxDashMap::default()).collect(),
            components: (0..levels).map(|_| FxDashMap::default()).collect(),
            config,
            queries: AtomicU64::new(0),
            max_probes: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.access.n()
    }

    pub fn access(&self) -> &GraphAccess<'g> {
        &self.access
    }

    /// `g_P(v)`: the part of the final partition containing `v`.
    pub fn oracle_query(&self, v: VertexId) -> Result<Component> {
        self.check_vertex(v)?;
        let mut ctx = QueryCtx::default();
        let out = self.final_part(v, &mut ctx);
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.max_probes.fetch_max(ctx.probes, Ordering::Relaxed);
        out.map(|r| r.comp.clone())
    }

    /// Probes charged by one query, alongside its answer.
    pub fn oracle_query_counted(&self, v: VertexId) -> Result<(Component, u64)> {
        self.check_vertex(v)?;
        let mut ctx = QueryCtx::default();
        let out = self.final_part(v, &mut ctx)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.max_probes.fetch_max(ctx.probes, Ordering::Relaxed);
        Ok((out.comp.clone(), ctx.probes))
    }

    /// `C^i(v)` for `0 ≤ i ≤ ℓ`, identical to the global run's component of `v`
    /// after round `i`.
    pub fn component_at(&self, v: VertexId, i: usize) -> Result<Component> {
        self.check_vertex(v)?;
        if i > self.config.ell {
            return Err(Error::Usage(format!("round {i} exceeds ell={}", self.config.ell)));
        }
        let mut ctx = QueryCtx::default();
        Ok(self.resolve(v, i, &mut ctx)?.comp.clone())
    }

    /// Incidence list of `v`, probed once and then served from the memo.
    pub fn incidence_list(&self, v: VertexId) -> Result<Arc<[VertexId]>> {
        self.check_vertex(v)?;
        self.adjacency(v, &mut QueryCtx::default())
    }

    /// Subgraph induced by a part returned from [`Self::oracle_query`].
    pub fn part_subgraph(&self, part: &Component) -> Result<Subgraph> {
        if let Some(&v) = part.members().iter().find(|&&v| v as usize >= self.n()) {
            return Err(Error::Usage(format!("vertex {v} out of range (n={})", self.n())));
        }
        self.induced(part, &mut QueryCtx::default())
    }

    /// Queries every vertex and assembles the induced partition.
    pub fn partition(&self) -> Result<Partition> {
        self.partition_in_order((0..self.n() as VertexId).collect::<Vec<_>>())
    }

    /// Queries vertices in the given order; the result does not depend on it.
    pub fn partition_in_order<I: IntoIterator<Item = VertexId>>(&self, order: I) -> Result<Partition> {
        let mut seen = FxHashSet::default();
        let mut parts = Vec::new();
        for v in order {
            let part = self.oracle_query(v)?;
            if seen.insert(part.anchor()) {
                parts.push(part);
            }
        }
        Partition::from_components(self.n(), parts)
    }

    pub fn query_stats(&self) -> QueryStats {
        let QueryCounts { neighbor_probes, distinct_vertices_touched } = self.access.counts();
        let (d, k, ell) = (self.config.d, self.config.k, self.config.ell);
        QueryStats {
            neighbor_probes,
            distinct_vertices_touched,
            oracle_queries: self.queries.load(Ordering::Relaxed),
            max_probes_per_query: self.max_probes.load(Ordering::Relaxed),
            memo_components: self.components.iter().map(|m| m.len() as u64).sum(),
            q_bound: query_bound(d, k, ell),
            q_bound_log10: query_bound_log10(d, k, ell),
        }
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.n() {
            Ok(())
        } else {
            Err(Error::Usage(format!("vertex {v} out of range (n={})", self.n())))
        }
    }

    fn coin(&self, round: usize, r: &Resolved) -> Coin {
        coin(CoinKey { seed: self.config.seed, iteration: round as u32, anchor: r.anchor() })
    }

    fn adjacency(&self, v: VertexId, ctx: &mut QueryCtx) -> Result<Arc<[VertexId]>> {
        if let Some(list) = self.adjacency.get(&v) {
            return Ok(list.clone());
        }
        let entry = self.adjacency.entry(v).or_try_insert_with(|| {
            let list = self.access.incidence_list(v)?;
            let d = self.access.d();
            ctx.probes += if list.len() < d { list.len() as u64 + 1 } else { d as u64 };
            Ok::<_, Error>(Arc::from(list))
        })?;
        Ok(entry.clone())
    }

    fn lookup(&self, v: VertexId, level: usize) -> Option<Arc<Resolved>> {
        let anchor = *self.anchors[level].get(&v)?;
        self.components[level].get(&anchor).map(|r| r.clone())
    }

    fn component(&self, anchor: VertexId, level: usize) -> Arc<Resolved> {
        self.components[level]
            .get(&anchor)
            .map(|r| r.clone())
            .expect("targets are resolved before they are looked up")
    }

    /// Publishes `parts` at `level` and returns the one containing `v`.
    fn register(&self, level: usize, parts: Vec<Component>, v: VertexId) -> Arc<Resolved> {
        let mut mine = None;
        for part in parts {
            let anchor = part.anchor();
            let has_v = part.contains(v);
            let stored = self.components[level].entry(anchor).or_insert_with(|| Resolved::new(part)).clone();
            for &u in stored.comp.members() {
                self.anchors[level].entry(u).or_insert(anchor);
            }
            if has_v {
                mine = Some(stored);
            }
        }
        mine.expect("the parts cover v")
    }

    fn resolve(&self, v: VertexId, level: usize, ctx: &mut QueryCtx) -> Result<Arc<Resolved>> {
        let mut known = level;
        let mut cur = loop {
            if let Some(r) = self.lookup(v, known) {
                break r;
            }
            if known == 0 {
                break self.register(0, vec![Component::singleton(v)], v);
            }
            known -= 1;
        };
        for round in known + 1..=level {
            cur = self.advance(v, round, cur, ctx)?;
        }
        Ok(cur)
    }

    /// `C^round(v)` from `prev = C^{round-1}(v)`.
    fn advance(&self, v: VertexId, round: usize, prev: Arc<Resolved>, ctx: &mut QueryCtx) -> Result<Arc<Resolved>> {
        let center = match self.coin(round, &prev) {
            Coin::Tails => Some(prev.clone()),
            Coin::Heads => match self.target(&prev, round - 1, ctx)? {
                Some(t) => {
                    let t = self.component(t, round - 1);
                    (self.coin(round, &t) == Coin::Tails).then_some(t)
                }
                None => None,
            },
        };
        let merged = match center {
            None => prev.comp.clone(),
            Some(t) => {
                let mut members = t.comp.members().to_vec();
                for sat in self.satellites(&t, round, ctx)? {
                    members.extend_from_slice(sat.comp.members());
                }
                Component::new(members)
            }
        };
        let parts = if merged.len() > self.config.k {
            let sub = self.induced(&merged, ctx)?;
            break_component(&sub, self.config.gamma, self.config.d, &self.config.separator).0
        } else {
            vec![merged]
        };
        Ok(self.register(round, parts, v))
    }

    /// Anchor of the neighbor at the other end of `x`'s heaviest edge in `G^level`.
    fn target(&self, x: &Resolved, level: usize, ctx: &mut QueryCtx) -> Result<Option<VertexId>> {
        if let Some(t) = x.target.get() {
            return Ok(*t);
        }
        let mut weights: FxHashMap<VertexId, u64> = FxHashMap::default();
        for &u in x.comp.members() {
            for &y in self.adjacency(u, ctx)?.iter() {
                if !x.comp.contains(y) {
                    let ny = self.resolve(y, level, ctx)?;
                    *weights.entry(ny.anchor()).or_default() += 1;
                }
            }
        }
        let best = weights.into_iter().max_by_key(|&(a, w)| (w, a)).map(|(a, _)| a);
        Ok(*x.target.get_or_init(|| best))
    }

    /// Heads neighbors of the Tails component `t` whose heaviest edge points at `t`.
    fn satellites(&self, t: &Resolved, round: usize, ctx: &mut QueryCtx) -> Result<Vec<Arc<Resolved>>> {
        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        for &u in t.comp.members() {
            for &y in self.adjacency(u, ctx)?.iter() {
                if t.comp.contains(y) {
                    continue;
                }
                let ny = self.resolve(y, round - 1, ctx)?;
                if !seen.insert(ny.anchor()) {
                    continue;
                }
                if self.coin(round, &ny) == Coin::Heads && self.target(&ny, round - 1, ctx)? == Some(t.anchor()) {
                    out.push(ny);
                }
            }
        }
        Ok(out)
    }

    fn induced(&self, comp: &Component, ctx: &mut QueryCtx) -> Result<Subgraph> {
        let lists = comp
            .members()
            .iter()
            .map(|&u| self.adjacency(u, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Subgraph::induced(comp.members(), |u| {
            let idx = comp.members().binary_search(&u).expect("member");
            lists[idx].iter().copied().collect::<Vec<_>>()
        }))
    }

    fn final_part(&self, v: VertexId, ctx: &mut QueryCtx) -> Result<Arc<Resolved>> {
        let top = self.config.ell + 1;
        if let Some(r) = self.lookup(v, top) {
            return Ok(r);
        }
        let last = self.resolve(v, self.config.ell, ctx)?;
        let parts = if last.comp.len() > self.config.final_trigger {
            let sub = self.induced(&last.comp, ctx)?;
            refine_final(&sub, &self.config).0
        } else {
            vec![last.comp.clone()]
        };
        Ok(self.register(top, parts, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global::run_global;
    use crate::graph::BoundedDegreeGraph;

    fn path(n: u32) -> BoundedDegreeGraph {
        BoundedDegreeGraph::from_edges(n as usize, 2, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn fresh_oracle_has_zero_stats() {
        let g = path(5);
        let o = OracleState::new(GraphAccess::new(&g), RunConfig::practical(0.5, 2, 1).unwrap()).unwrap();
        let s = o.query_stats();
        assert_eq!((s.neighbor_probes, s.distinct_vertices_touched, s.oracle_queries), (0, 0, 0));
        assert_eq!((s.max_probes_per_query, s.memo_components), (0, 0));
    }

    #[test]
    fn tampered_config_is_rejected() {
        let g = path(5);
        let mut cfg = RunConfig::practical(0.5, 2, 1).unwrap();
        cfg.gamma = 0.5;
        assert!(matches!(OracleState::new(GraphAccess::new(&g), cfg), Err(Error::Config(_))));
    }

    #[test]
    fn level_zero_is_singleton() {
        let g = path(5);
        let o = OracleState::new(GraphAccess::new(&g), RunConfig::practical(0.5, 2, 1).unwrap()).unwrap();
        for v in 0..5 {
            assert_eq!(o.component_at(v, 0).unwrap(), Component::singleton(v));
        }
        assert_eq!(o.query_stats().neighbor_probes, 0);
    }

    #[test]
    fn path3_first_round_matches_hand_simulation() {
        let g = path(3);
        let heads = |s: u64, v: u32| coin(CoinKey { seed: s, iteration: 1, anchor: v }).is_heads();
        let seed = (0u64..).find(|&s| heads(s, 0) && !heads(s, 1) && heads(s, 2)).unwrap();
        let cfg = RunConfig::practical(0.5, 2, seed).unwrap();
        let o = OracleState::new(GraphAccess::new(&g), cfg).unwrap();
        for v in 0..3 {
            assert_eq!(o.component_at(v, 1).unwrap(), Component::new(vec![0, 1, 2]));
        }
    }

    #[test]
    fn out_of_range_is_usage_error() {
        let g = path(3);
        let o = OracleState::new(GraphAccess::new(&g), RunConfig::practical(0.5, 2, 1).unwrap()).unwrap();
        assert!(matches!(o.oracle_query(3), Err(Error::Usage(_))));
        assert!(matches!(o.component_at(0, 99), Err(Error::Usage(_))));
    }

    #[test]
    fn isolated_vertex_answers_itself() {
        let g = BoundedDegreeGraph::from_edges(4, 3, [(0, 1), (1, 2)]).unwrap();
        let o = OracleState::new(GraphAccess::new(&g), RunConfig::practical(0.3, 3, 9).unwrap()).unwrap();
        assert_eq!(o.oracle_query(3).unwrap(), Component::singleton(3));
    }

    #[test]
    fn single_round_probe_budget() {
        let g = crate::generate::grid(6, 6);
        let d = g.d();
        for seed in 0..20 {
            let cfg = RunConfig::builder(0.5, d).ell(1).seed(seed).build().unwrap();
            for v in [0, 7, 14, 35] {
                let o = OracleState::new(GraphAccess::new(&g), cfg.clone()).unwrap();
                let (_, probes) = o.oracle_query_counted(v).unwrap();
                assert!(probes as usize <= d * d * (d + 2), "seed {seed} v {v}: {probes}");
                assert!(o.query_stats().distinct_vertices_touched as usize <= d * d + 1);
            }
        }
    }

    #[test]
    fn matches_global_on_small_path() {
        let g = path(40);
        for seed in 0..10 {
            let cfg = RunConfig::builder(0.5, 2).k_cap(5).seed(seed).build().unwrap();
            let global = run_global(&g, &cfg).partition;
            let o = OracleState::new(GraphAccess::new(&g), cfg).unwrap();
            assert_eq!(o.partition().unwrap(), global, "seed {seed}");
        }
    }

    #[test]
    fn closed_form_bound() {
        assert_eq!(query_bound(3, 4, 1), 9.0);
        assert_eq!(query_bound(3, 4, 2), 144.0 + 144.0 * 9.0);
        assert!((query_bound_log10(3, 4, 3) - query_bound(3, 4, 3).log10()).abs() < 1e-9);
        assert!(query_bound_log10(8, 256, 40).is_finite());
    }
}
