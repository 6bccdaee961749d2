//! Bounded-degree graphs in the incidence-list model, query-counted access,
//! contraction with respect to a partition, and `(ε, k)`-partition checks.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use parking_lot::Mutex;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseErrorKind, Result};

/// Dense vertex id in `0..n`. The natural order on ids is the tie-break order
/// used throughout (heaviest-edge ties, coin anchors, canonical layouts).
pub type VertexId = u32;

/// A static simple graph with per-vertex incidence lists of length at most `d`.
///
/// Incidence order is insertion order: for a loaded file that is the order in
/// which edges appear, which fixes the answer of every `neighbor(v, i)` probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedDegreeGraph {
    d: usize,
    adj: Vec<Vec<VertexId>>,
    m: usize,
}

impl BoundedDegreeGraph {
    pub fn empty(n: usize, d: usize) -> Self {
        BoundedDegreeGraph { d, adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge sequence, enforcing simplicity and the degree bound.
    pub fn from_edges<I>(n: usize, d: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = Self::empty(n, d);
        let mut seen = FxHashSet::default();
        for (line, (u, v)) in edges.into_iter().enumerate() {
            g.try_add_edge(u as u64, v as u64, &mut seen)
                .map_err(|kind| Error::Parse { line: line + 1, kind })?;
        }
        Ok(g)
    }

    fn try_add_edge(
        &mut self,
        u: u64,
        v: u64,
        seen: &mut FxHashSet<(VertexId, VertexId)>,
    ) -> std::result::Result<(), ParseErrorKind> {
        let n = self.adj.len();
        for id in [u, v] {
            if id >= n as u64 {
                return Err(ParseErrorKind::IdOutOfRange { id, n });
            }
        }
        let (u, v) = (u as VertexId, v as VertexId);
        if u == v {
            return Err(ParseErrorKind::SelfLoop(u));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(ParseErrorKind::DuplicateEdge(u, v));
        }
        for x in [u, v] {
            if self.adj[x as usize].len() >= self.d {
                return Err(ParseErrorKind::DegreeExceeded { vertex: x, d: self.d });
            }
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        self.m += 1;
        Ok(())
    }

    /// Parses the edge-list format: a header `n=<int> [d=<int>]` followed by one
    /// `u v` pair per line. Blank lines and `#` comments are ignored.
    ///
    /// The degree bound is `d` when given, otherwise the header's `d=`, otherwise
    /// the maximum degree of the edge set.
    pub fn parse(text: &str, d: Option<usize>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            kind: ParseErrorKind::MissingHeader,
        })?;
        let mut n = None;
        let mut header_d = None;
        for tok in header.split_whitespace() {
            let bad = || Error::Parse { line: hline, kind: ParseErrorKind::BadHeader(header.into()) };
            match tok.split_once('=') {
                Some(("n", val)) => n = Some(val.parse::<usize>().map_err(|_| bad())?),
                Some(("d", val)) => header_d = Some(val.parse::<usize>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let n = n.ok_or(Error::Parse { line: hline, kind: ParseErrorKind::MissingHeader })?;

        let mut pairs = Vec::new();
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let parsed = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => a.parse::<u64>().ok().zip(b.parse::<u64>().ok()),
                _ => None,
            };
            let (u, v) = parsed.ok_or(Error::Parse { line, kind: ParseErrorKind::BadEdge(l.into()) })?;
            pairs.push((line, u, v));
        }

        let d = match d.or(header_d) {
            Some(d) => d,
            None => {
                let mut deg = vec![0usize; n];
                for &(_, u, v) in &pairs {
                    for x in [u, v] {
                        if let Some(c) = deg.get_mut(x as usize) {
                            *c += 1;
                        }
                    }
                }
                deg.into_iter().max().unwrap_or(0)
            }
        };

        let mut g = Self::empty(n, d);
        let mut seen = FxHashSet::default();
        for (line, u, v) in pairs {
            g.try_add_edge(u, v, &mut seen).map_err(|kind| Error::Parse { line, kind })?;
        }
        Ok(g)
    }

    /// Deterministic serialization: edges as `(min, max)` pairs sorted lexicographically.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={} d={}\n", self.n(), self.d);
        for (u, v) in self.sorted_edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Full incidence list of `v`, uncounted. Only global (whole-graph) code
    /// paths use this; local code goes through [`GraphAccess::neighbor`].
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v as usize]
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| {
            let u = u as VertexId;
            nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    pub fn sorted_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut e: Vec<_> = self.edges().collect();
        e.sort_unstable();
        e
    }

    /// Whether `members` induces a connected subgraph. The empty set is not connected.
    pub fn is_connected_set(&self, members: &[VertexId]) -> bool {
        let Some(&start) = members.first() else { return false };
        let set: FxHashSet<VertexId> = members.iter().copied().collect();
        let mut seen = FxHashSet::default();
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == set.len()
    }
}

/// Snapshot of a [`QueryCounter`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub neighbor_probes: u64,
    pub distinct_vertices_touched: u64,
}

/// Counts `(vertex, index)` probes and the distinct vertices whose lists were probed.
#[derive(Debug, Default)]
pub struct QueryCounter {
    probes: AtomicU64,
    touched: Mutex<FxHashSet<VertexId>>,
}

impl QueryCounter {
    fn charge(&self, v: VertexId) {
        self.probes.fetch_add(1, Ordering::Relaxed);
        self.touched.lock().insert(v);
    }

    pub fn snapshot(&self) -> QueryCounts {
        QueryCounts {
            neighbor_probes: self.probes.load(Ordering::Relaxed),
            distinct_vertices_touched: self.touched.lock().len() as u64,
        }
    }
}

/// Query-counted handle onto a graph: the only channel through which local
/// algorithms read incidence lists.
#[derive(Debug)]
pub struct GraphAccess<'g> {
    graph: &'g BoundedDegreeGraph,
    counter: QueryCounter,
}

impl<'g> GraphAccess<'g> {
    pub fn new(graph: &'g BoundedDegreeGraph) -> Self {
        GraphAccess { graph, counter: QueryCounter::default() }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn d(&self) -> usize {
        self.graph.d()
    }

    /// The `i`-th neighbor of `v` (1-based), or `None` when `deg(v) < i`.
    /// Every call is charged, including those answered with `None`.
    pub fn neighbor(&self, v: VertexId, i: usize) -> Result<Option<VertexId>> {
        if v as usize >= self.graph.n() {
            return Err(Error::Usage(format!("vertex {v} out of range (n={})", self.graph.n())));
        }
        if i == 0 || i > self.graph.d() {
            return Err(Error::Usage(format!("neighbor index {i} outside 1..={}", self.graph.d())));
        }
        self.counter.charge(v);
        Ok(self.graph.neighbors(v).get(i - 1).copied())
    }

    /// Reads the whole incidence list of `v` through [`Self::neighbor`], stopping at
    /// the first absent answer or at index `d`.
    pub fn incidence_list(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let mut out = Vec::with_capacity(self.graph.d());
        for i in 1..=self.graph.d() {
            match self.neighbor(v, i)? {
                Some(u) => out.push(u),
                None => break,
            }
        }
        Ok(out)
    }

    pub fn counts(&self) -> QueryCounts {
        self.counter.snapshot()
    }

    pub fn graph(&self) -> &'g BoundedDegreeGraph {
        self.graph
    }
}

/// A set of base-graph vertices treated as one vertex of a contracted graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Component {
    members: Vec<VertexId>,
    max_id: VertexId,
}

impl Component {
    /// Panics on an empty member set.
    pub fn new(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        let max_id = *members.last().expect("component must be non-empty");
        Component { members, max_id }
    }

    pub fn singleton(v: VertexId) -> Self {
        Component { members: vec![v], max_id: v }
    }

    /// Members in ascending id order.
    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    /// Largest member id; keys the component's coin flips.
    pub fn anchor(&self) -> VertexId {
        self.max_id
    }

    pub fn min_id(&self) -> VertexId {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn into_members(self) -> Vec<VertexId> {
        self.members
    }
}

/// Vertex → part assignment together with the part list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    part_of: Vec<usize>,
    parts: Vec<Component>,
}

#[derive(Serialize, Deserialize)]
struct PartitionDoc {
    parts: Vec<Vec<VertexId>>,
}

impl Partition {
    /// Builds a partition of `0..n` from explicit parts. Parts are put in
    /// canonical order (ascending smallest member).
    pub fn from_parts(n: usize, parts: Vec<Vec<VertexId>>) -> Result<Self> {
        let mut parts: Vec<Component> = parts
            .into_iter()
            .map(|p| {
                if p.is_empty() {
                    Err(Error::Usage("empty part".into()))
                } else {
                    Ok(Component::new(p))
                }
            })
            .collect::<Result<_>>()?;
        parts.sort_unstable_by_key(Component::min_id);
        let mut part_of = vec![usize::MAX; n];
        for (idx, p) in parts.iter().enumerate() {
            for &v in p.members() {
                let slot = part_of
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::Usage(format!("vertex {v} out of range (n={n})")))?;
                if *slot != usize::MAX {
                    return Err(Error::Usage(format!("vertex {v} appears in two parts")));
                }
                *slot = idx;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Usage(format!("vertex {v} is not covered")));
        }
        Ok(Partition { part_of, parts })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            part_of: (0..n).collect(),
            parts: (0..n as VertexId).map(Component::singleton).collect(),
        }
    }

    /// Builds the partition whose parts are the given components, which must be
    /// disjoint and cover `0..n`.
    pub fn from_components(n: usize, comps: Vec<Component>) -> Result<Self> {
        Self::from_parts(n, comps.into_iter().map(Component::into_members).collect())
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn parts(&self) -> &[Component] {
        &self.parts
    }

    pub fn part_index(&self, v: VertexId) -> usize {
        self.part_of[v as usize]
    }

    pub fn part_of(&self, v: VertexId) -> &Component {
        &self.parts[self.part_of[v as usize]]
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn max_part_size(&self) -> usize {
        self.parts.iter().map(Component::len).max().unwrap_or(0)
    }

    /// `{"parts": [[ids...], ...]}` in canonical order.
    pub fn to_json(&self) -> String {
        let doc = PartitionDoc { parts: self.parts.iter().map(|p| p.members().to_vec()).collect() };
        serde_json::to_string(&doc).expect("partition serializes")
    }

    pub fn from_json(n: usize, text: &str) -> Result<Self> {
        let doc: PartitionDoc = serde_json::from_str(text)?;
        Self::from_parts(n, doc.parts)
    }
}

/// The contraction `G/P`: one vertex per component, edge weights equal to cut sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractedGraph {
    components: Vec<Component>,
    adj: Vec<Vec<(usize, u64)>>,
}

impl ContractedGraph {
    /// Assembles a contracted graph from components and weighted edges between
    /// component indices. Parallel entries are summed; self-edges are dropped.
    pub fn from_weighted_edges<I>(components: Vec<Component>, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        let mut acc: FxHashMap<(usize, usize), u64> = FxHashMap::default();
        for (a, b, w) in edges {
            if a != b && w > 0 {
                *acc.entry((a.min(b), a.max(b))).or_default() += w;
            }
        }
        let mut adj = vec![Vec::new(); components.len()];
        for ((a, b), w) in acc {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        ContractedGraph { components, adj }
    }

    /// Contraction of `g` with respect to parts that are assumed connected.
    pub(crate) fn from_components_unchecked(g: &BoundedDegreeGraph, components: Vec<Component>) -> Self {
        let mut comp_of = vec![usize::MAX; g.n()];
        for (idx, c) in components.iter().enumerate() {
            for &v in c.members() {
                comp_of[v as usize] = idx;
            }
        }
        let edges = g
            .edges()
            .filter(|&(u, v)| comp_of[u as usize] != usize::MAX && comp_of[v as usize] != usize::MAX)
            .map(|(u, v)| (comp_of[u as usize], comp_of[v as usize], 1));
        Self::from_weighted_edges(components, edges)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, idx: usize) -> &Component {
        &self.components[idx]
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// `(neighbor index, weight)` pairs, sorted by neighbor index.
    pub fn incident(&self, idx: usize) -> &[(usize, u64)] {
        &self.adj[idx]
    }

    /// Each edge once as `(a, b, weight)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().filter(move |(b, _)| a < *b).map(move |&(b, w)| (a, b, w)))
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u64> {
        self.adj[a].binary_search_by_key(&b, |&(x, _)| x).ok().map(|i| self.adj[a][i].1)
    }

    pub fn into_components(self) -> Vec<Component> {
        self.components
    }
}

/// `G/P` with exact cut-size weights. Fails if a part is not connected in `g`.
pub fn contract(g: &BoundedDegreeGraph, p: &Partition) -> Result<ContractedGraph> {
    if p.n() != g.n() {
        return Err(Error::Usage(format!("partition covers {} vertices, graph has {}", p.n(), g.n())));
    }
    for (idx, part) in p.parts().iter().enumerate() {
        if !g.is_connected_set(part.members()) {
            return Err(Error::Contract(format!("part {idx} is not connected")));
        }
    }
    Ok(ContractedGraph::from_components_unchecked(g, p.parts().to_vec()))
}

/// Number of edges whose endpoints lie in different parts.
pub fn cut_size(g: &BoundedDegreeGraph, p: &Partition) -> u64 {
    g.edges().filter(|&(u, v)| p.part_index(u) != p.part_index(v)).count() as u64
}

/// A failed `(ε, k)`-partition condition, with a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Oversized { part: usize, size: usize, k: usize },
    /// `piece` is one connected piece of the part that does not reach the rest.
    Disconnected { part: usize, piece: Vec<VertexId> },
    CutExceeded { cut: u64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub valid: bool,
    pub cut: u64,
    pub violations: Vec<Violation>,
}

impl PartitionReport {
    /// Only the size and connectivity conditions (no cut condition).
    pub fn structural_ok(&self) -> bool {
        !self
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Oversized { .. } | Violation::Disconnected { .. }))
    }
}

/// Checks size `≤ k`, connectivity, and cut `≤ ε·|V|` and lists every failure.
pub fn validate_partition(g: &BoundedDegreeGraph, p: &Partition, epsilon: f64, k: usize) -> PartitionReport {
    let mut violations = Vec::new();
    for (idx, part) in p.parts().iter().enumerate() {
        if part.len() > k {
            violations.push(Violation::Oversized { part: idx, size: part.len(), k });
        }
        if !g.is_connected_set(part.members()) {
            violations.push(Violation::Disconnected { part: idx, piece: first_piece(g, part) });
        }
    }
    let cut = cut_size(g, p);
    let bound = epsilon * g.n() as f64;
    if cut as f64 > bound {
        violations.push(Violation::CutExceeded { cut, bound });
    }
    PartitionReport { valid: violations.is_empty(), cut, violations }
}

fn first_piece(g: &BoundedDegreeGraph, part: &Component) -> Vec<VertexId> {
    let start = part.min_id();
    let mut seen = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if part.contains(w) && !seen.contains(&w) {
                seen.push(w);
                queue.push_back(w);
            }
        }
    }
    seen.sort_unstable();
    seen
}
