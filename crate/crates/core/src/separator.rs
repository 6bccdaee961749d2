//! Vertex separators and hyperfinite partitions of connected pieces.
//!
//! [`separator_set`] removes BFS levels from overweight components until every
//! remaining component is light enough. [`hyperfinite_partition`] turns such a
//! separator into connected parts of bounded size, and falls back to
//! [`tree_chop`] when the separator exceeds its size budget. Every function here
//! is a pure function of its input with vertices in ascending id order.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundedDegreeGraph, Component, VertexId};

/// Which constants drive the size bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Bounds computed from the formulas alone.
    Theory,
    /// Formula bounds capped by a user-supplied part size.
    #[default]
    Practical,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Mode::Theory),
            "practical" => Ok(Mode::Practical),
            other => Err(Error::Usage(format!("unknown mode `{other}` (theory|practical)"))),
        }
    }
}

/// Separator constant `c_sep` calibrated on grids; see the acceptance report.
pub const CALIBRATED_C_SEP: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorConfig {
    /// Excluded clique size: the class is `K_h`-minor-free.
    pub h: u32,
    pub c_sep: f64,
    pub c2: f64,
    pub mode: Mode,
    /// Practical-mode cap on part sizes; ignored in theory mode.
    pub size_cap: Option<usize>,
}

impl SeparatorConfig {
    /// Planar inputs (`K_5`-minor-free) with practical constants.
    pub fn planar_practical(size_cap: Option<usize>) -> Self {
        SeparatorConfig { h: 5, c_sep: CALIBRATED_C_SEP, c2: 2.0, mode: Mode::Practical, size_cap }
    }

    /// Theory constants: `c2 = c_sep² · h³`, no cap.
    pub fn theory(h: u32, c_sep: f64) -> Self {
        SeparatorConfig { h, c_sep, c2: c_sep * c_sep * f64::from(h).powi(3), mode: Mode::Theory, size_cap: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_sep.is_nan() || self.c_sep <= 0.0 {
            return Err(Error::Config(format!("c_sep must be positive, got {}", self.c_sep)));
        }
        if self.c2.is_nan() || self.c2 <= 1.0 {
            return Err(Error::Config(format!("c2 must exceed 1, got {}", self.c2)));
        }
        if self.size_cap == Some(0) {
            return Err(Error::Config("size cap must be at least 1".into()));
        }
        Ok(())
    }

    /// `k(γ) = ceil(c2 · d² / γ²)`, capped in practical mode.
    pub fn part_bound(&self, gamma: f64, d: usize) -> usize {
        let raw = (self.c2 * (d.max(1) as f64).powi(2) / (gamma * gamma)).ceil();
        let raw = if raw.is_finite() && raw >= 1.0 { raw as usize } else { usize::MAX };
        match (self.mode, self.size_cap) {
            (Mode::Practical, Some(cap)) => raw.min(cap),
            _ => raw,
        }
    }

    /// `c_sep · h^{3/2} · sqrt(n / β)`.
    pub fn separator_bound(&self, n: usize, beta: f64) -> f64 {
        self.c_sep * f64::from(self.h).powf(1.5) * (n as f64 / beta).sqrt()
    }
}

/// An exact fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        Ratio { num, den }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Non-negative vertex weights `num[i] / den`, summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexWeights {
    num: Vec<u64>,
    den: u64,
}

impl VertexWeights {
    pub fn new(num: Vec<u64>, den: u64) -> Result<Self> {
        let total: u128 = num.iter().map(|&w| u128::from(w)).sum();
        if den == 0 || total != u128::from(den) {
            return Err(Error::Usage(format!("vertex weights sum to {total}/{den}, not 1")));
        }
        Ok(VertexWeights { num, den })
    }

    /// `1/m` on each of `m` vertices.
    pub fn uniform(m: usize) -> Self {
        VertexWeights { num: vec![1; m], den: m.max(1) as u64 }
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    fn fits(&self, weight: u64, beta: Ratio) -> bool {
        u128::from(weight) * u128::from(beta.den) <= u128::from(beta.num) * u128::from(self.den)
    }
}

/// A small graph on a sorted set of base vertices, addressed by local index.
/// Adjacency lists are sorted so the layout depends only on the vertex set and
/// the edges among it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    vertices: Vec<VertexId>,
    adj: Vec<Vec<u32>>,
}

impl Subgraph {
    /// Subgraph induced by `members`, reading each member's incidence list through `nbrs`.
    pub fn induced<F, I>(members: &[VertexId], mut nbrs: F) -> Self
    where
        F: FnMut(VertexId) -> I,
        I: IntoIterator<Item = VertexId>,
    {
        let mut vertices = members.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut list: Vec<u32> = nbrs(v)
                    .into_iter()
                    .filter_map(|u| vertices.binary_search(&u).ok().map(|i| i as u32))
                    .collect();
                list.sort_unstable();
                list.dedup();
                list
            })
            .collect();
        Subgraph { vertices, adj }
    }

    pub fn from_graph(g: &BoundedDegreeGraph, members: &[VertexId]) -> Self {
        Self::induced(members, |v| g.neighbors(v).iter().copied())
    }

    pub fn whole(g: &BoundedDegreeGraph) -> Self {
        let all: Vec<VertexId> = (0..g.n() as VertexId).collect();
        Self::from_graph(g, &all)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Each edge once as a pair of base ids `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(i, l)| {
            l.iter().filter(move |&&j| (j as usize) > i).map(move |&j| (self.vertices[i], self.vertices[j as usize]))
        })
    }

    /// Sorted local adjacency lists; index `i` stands for `vertices()[i]`.
    pub fn local_adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    fn nbrs(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().map(|&j| j as usize)
    }

    fn to_component(&self, local: &[usize]) -> Component {
        Component::new(local.iter().map(|&i| self.vertices[i]).collect())
    }

    /// Connected components of the vertices with `removed[i] == false`, each
    /// sorted, listed by smallest local index.
    fn components_avoiding(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if removed[s] || seen[s] {
                continue;
            }
            out.push(self.bfs_collect(s, removed, &mut seen));
        }
        out
    }

    fn bfs_collect(&self, s: usize, removed: &[bool], seen: &mut [bool]) -> Vec<usize> {
        seen[s] = true;
        let mut comp = vec![s];
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for w in self.nbrs(u) {
                if !removed[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        comp
    }
}

/// BFS layers from `root` inside the component `comp` (vertices not `removed`).
fn bfs_levels(sub: &Subgraph, root: usize, removed: &[bool], dist: &mut [u32]) -> Vec<Vec<usize>> {
    let mut levels: Vec<Vec<usize>> = vec![vec![root]];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for w in sub.nbrs(u) {
            if !removed[w] && dist[w] == u32::MAX {
                dist[w] = du + 1;
                if levels.len() <= (du + 1) as usize {
                    levels.push(Vec::new());
                }
                levels[(du + 1) as usize].push(w);
                queue.push_back(w);
            }
        }
    }
    for l in &mut levels {
        l.sort_unstable();
    }
    levels
}

/// Picks the BFS level of `comp` to remove. Candidates are levels that leave
/// both sides at most `max(β, 2W/3)`; the smallest candidate wins, ties going to
/// the most balanced, then to the lowest level.
fn choose_level(sub: &Subgraph, comp: &[usize], removed: &[bool], w: &VertexWeights, beta: Ratio) -> Vec<usize> {
    let mut dist = vec![u32::MAX; sub.len()];
    let first = bfs_levels(sub, comp[0], removed, &mut dist);
    let far = *first.last().and_then(|l| l.first()).expect("non-empty component");
    dist.iter_mut().for_each(|x| *x = u32::MAX);
    let levels = bfs_levels(sub, far, removed, &mut dist);

    let weight_of = |l: &[usize]| l.iter().map(|&i| w.num[i]).sum::<u64>();
    let lw: Vec<u64> = levels.iter().map(|l| weight_of(l)).collect();
    let total: u64 = lw.iter().sum();
    let ok = |side: u64| w.fits(side, beta) || 3 * u128::from(side) <= 2 * u128::from(total);

    let mut best: Option<(usize, u64, usize)> = None;
    let mut before = 0u64;
    for (idx, level) in levels.iter().enumerate() {
        let after = total - before - lw[idx];
        if ok(before) && ok(after) {
            let key = (level.len(), before.abs_diff(after), idx);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        before += lw[idx];
    }
    let (_, _, idx) = best.expect("the weight-median level is always a candidate");
    levels[idx].clone()
}

/// Local indices of a separator leaving every component of weight `≤ β`.
fn separate(sub: &Subgraph, w: &VertexWeights, beta: Ratio) -> Vec<usize> {
    let mut removed = vec![false; sub.len()];
    let mut sep = Vec::new();
    let heavy = |c: &[usize]| !w.fits(c.iter().map(|&i| w.num[i]).sum(), beta);
    let mut stack: Vec<Vec<usize>> = sub.components_avoiding(&removed).into_iter().filter(|c| heavy(c)).collect();
    while let Some(comp) = stack.pop() {
        if comp.len() == 1 {
            removed[comp[0]] = true;
            sep.push(comp[0]);
            continue;
        }
        let level = choose_level(sub, &comp, &removed, w, beta);
        for &i in &level {
            removed[i] = true;
        }
        sep.extend_from_slice(&level);
        let mut seen = removed.clone();
        for &s in &comp {
            if !seen[s] {
                let piece = sub.bfs_collect(s, &removed, &mut seen);
                if heavy(&piece) {
                    stack.push(piece);
                }
            }
        }
    }
    sep.sort_unstable();
    sep
}

/// A vertex set whose removal leaves no component of weight above `β`.
/// Returned as sorted base-graph ids.
pub fn separator_set(sub: &Subgraph, weights: &VertexWeights, beta: Ratio) -> Result<Vec<VertexId>> {
    if weights.len() != sub.len() {
        return Err(Error::Usage(format!("{} weights for {} vertices", weights.len(), sub.len())));
    }
    if beta.num == 0 || beta.num > beta.den {
        return Err(Error::Usage(format!("beta {}/{} outside (0, 1]", beta.num, beta.den)));
    }
    Ok(separate(sub, weights, beta).into_iter().map(|i| sub.vertices[i]).collect())
}

/// Connected parts of size at most `k`, carved bottom-up from a BFS spanning
/// forest rooted at each piece's smallest id with children in id order.
pub fn tree_chop(sub: &Subgraph, k: usize) -> Vec<Component> {
    let k = k.max(1);
    let m = sub.len();
    let mut parent = vec![usize::MAX; m];
    let mut order = Vec::with_capacity(m);
    let mut seen = vec![false; m];
    for root in 0..m {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut head = order.len();
        order.push(root);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for w in sub.nbrs(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    order.push(w);
                }
            }
        }
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &v in &order {
        if parent[v] != usize::MAX {
            children[parent[v]].push(v);
        }
    }
    let mut residual = vec![1usize; m];
    let mut absorbed = vec![false; m];
    for &v in order.iter().rev() {
        children[v].sort_unstable();
        for &c in &children[v] {
            if residual[v] + residual[c] <= k {
                residual[v] += residual[c];
                absorbed[c] = true;
            }
        }
    }

    let mut head_of = vec![usize::MAX; m];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_head = vec![usize::MAX; m];
    for &v in &order {
        let h = if absorbed[v] { head_of[parent[v]] } else { v };
        head_of[v] = h;
        if group_of_head[h] == usize::MAX {
            group_of_head[h] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of_head[h]].push(v);
    }
    let mut parts: Vec<Component> = groups.iter().map(|g| sub.to_component(g)).collect();
    parts.sort_unstable_by_key(Component::min_id);
    parts
}

/// Result of [`hyperfinite_partition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperfinitePartition {
    /// Connected parts in ascending order of smallest member.
    pub parts: Vec<Component>,
    /// Size bound the parts obey.
    pub k: usize,
    pub separator_size: usize,
    /// Whether the separator was over budget and [`tree_chop`] was used instead.
    pub fallback: bool,
}

/// Splits `sub` into connected parts of size at most `k(γ)`.
///
/// Separator vertices are not left as singletons when they can join an adjacent
/// part with room: each, in id order, joins the adjacent part it shares the most
/// edges with (then the smaller part, then the one created first).
pub fn hyperfinite_partition(sub: &Subgraph, gamma: f64, d: usize, cfg: &SeparatorConfig) -> HyperfinitePartition {
    let k = cfg.part_bound(gamma, d);
    let m = sub.len();
    if m == 0 {
        return HyperfinitePartition { parts: Vec::new(), k, separator_size: 0, fallback: false };
    }
    if m <= k {
        let removed = vec![false; m];
        let parts = sub.components_avoiding(&removed).iter().map(|c| sub.to_component(c)).collect();
        return HyperfinitePartition { parts, k, separator_size: 0, fallback: false };
    }

    let beta = Ratio::new(k as u64, m as u64);
    let sep = separate(sub, &VertexWeights::uniform(m), beta);
    let budget = cfg.separator_bound(m, beta.as_f64());
    if sep.len() as f64 > budget {
        match cfg.mode {
            Mode::Theory => log::error!("separator of size {} exceeds bound {budget:.1} on {m} vertices", sep.len()),
            Mode::Practical => log::warn!("separator of size {} exceeds bound {budget:.1} on {m} vertices", sep.len()),
        }
        return HyperfinitePartition { parts: tree_chop(sub, k), k, separator_size: sep.len(), fallback: true };
    }

    let mut removed = vec![false; m];
    for &s in &sep {
        removed[s] = true;
    }
    let mut groups = sub.components_avoiding(&removed);
    let mut group_of = vec![usize::MAX; m];
    for (g, members) in groups.iter().enumerate() {
        for &i in members {
            group_of[i] = g;
        }
    }
    for &s in &sep {
        let mut links: Vec<(usize, usize)> = Vec::new();
        for w in sub.nbrs(s) {
            let g = group_of[w];
            if g == usize::MAX {
                continue;
            }
            match links.iter_mut().find(|(x, _)| *x == g) {
                Some(entry) => entry.1 += 1,
                None => links.push((g, 1)),
            }
        }
        let target = links
            .iter()
            .filter(|&&(g, _)| groups[g].len() < k)
            .min_by_key(|&&(g, e)| (std::cmp::Reverse(e), groups[g].len(), g))
            .map(|&(g, _)| g);
        let g = target.unwrap_or_else(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(s);
        group_of[s] = g;
    }

    let groups = merge_adjacent(sub, groups, &group_of, k);
    let mut parts: Vec<Component> = groups.iter().map(|g| sub.to_component(g)).collect();
    parts.sort_unstable_by_key(Component::min_id);
    HyperfinitePartition { parts, k, separator_size: sep.len(), fallback: false }
}

/// Repeatedly unions adjacent groups whose combined size stays within `k`,
/// visiting pairs by decreasing number of edges between them, then by
/// increasing combined size, then by index.
fn merge_adjacent(sub: &Subgraph, groups: Vec<Vec<usize>>, group_of: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut root: Vec<usize> = (0..groups.len()).collect();
    let mut size: Vec<usize> = groups.iter().map(Vec::len).collect();
    fn find(root: &mut [usize], mut g: usize) -> usize {
        while root[g] != g {
            root[g] = root[root[g]];
            g = root[g];
        }
        g
    }
    loop {
        let mut between: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for u in 0..sub.len() {
            for w in sub.nbrs(u).filter(|&w| w > u) {
                let (a, b) = (find(&mut root, group_of[u]), find(&mut root, group_of[w]));
                if a != b {
                    *between.entry((a.min(b), a.max(b))).or_default() += 1;
                }
            }
        }
        let mut pairs: Vec<(usize, usize, usize, usize)> = between
            .into_iter()
            .filter(|&((a, b), _)| size[a] + size[b] <= k)
            .map(|((a, b), e)| (e, size[a] + size[b], a, b))
            .collect();
        pairs.sort_unstable_by_key(|&(e, s, a, b)| (std::cmp::Reverse(e), s, a, b));
        let mut merged = false;
        for (_, _, a, b) in pairs {
            let (a, b) = (find(&mut root, a), find(&mut root, b));
            if a != b && size[a] + size[b] <= k {
                let (keep, gone) = (a.min(b), a.max(b));
                root[gone] = keep;
                size[keep] += size[gone];
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    for (g, members) in groups.into_iter().enumerate() {
        let r = find(&mut root, g);
        out[r].extend(members);
    }
    out.retain(|g| !g.is_empty());
    out
}
