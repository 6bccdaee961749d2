//! Exact branch-and-bound solvers for vertex cover, independent set and
//! dominating set on small graphs.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::separator::Subgraph;

/// Largest input accepted by [`exact_small_solver`].
pub const MAX_SOLVER_VERTICES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Problem {
    /// Minimum vertex cover.
    VC,
    /// Maximum independent set.
    MIS,
    /// Minimum dominating set.
    DS,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::VC, Problem::MIS, Problem::DS];
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::VC => "VC",
            Problem::MIS => "MIS",
            Problem::DS => "DS",
        })
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vc" | "vertex-cover" => Ok(Problem::VC),
            "mis" | "independent-set" => Ok(Problem::MIS),
            "ds" | "dominating-set" => Ok(Problem::DS),
            _ => Err(Error::Usage(format!("unsupported problem {s:?} (expected vc, mis or ds)"))),
        }
    }
}

/// An optimum together with a witness in base vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub problem: Problem,
    pub size: usize,
    pub witness: Vec<VertexId>,
}

impl Solution {
    /// Checks the witness against `sub`: a cover, an independent set or a dominating set.
    pub fn verify(&self, sub: &Subgraph) -> bool {
        if self.witness.len() != self.size {
            return false;
        }
        let mut inside = FixedBitSet::with_capacity(sub.len());
        for v in &self.witness {
            match sub.vertices().binary_search(v) {
                Ok(i) if !inside.put(i) => {}
                _ => return false,
            }
        }
        let adj = sub.local_adjacency();
        let edges = || adj.iter().enumerate().flat_map(|(i, l)| l.iter().map(move |&j| (i, j as usize)));
        match self.problem {
            Problem::VC => edges().all(|(i, j)| inside[i] || inside[j]),
            Problem::MIS => edges().all(|(i, j)| !(inside[i] && inside[j])),
            Problem::DS => (0..sub.len()).all(|i| inside[i] || adj[i].iter().any(|&j| inside[j as usize])),
        }
    }
}

/// Exact optimum of `problem` on `sub` with a witness.
pub fn exact_small_solver(sub: &Subgraph, problem: Problem) -> Result<Solution> {
    if sub.len() > MAX_SOLVER_VERTICES {
        return Err(Error::Usage(format!(
            "exact solver takes at most {MAX_SOLVER_VERTICES} vertices, got {}",
            sub.len()
        )));
    }
    let g = Local::new(sub);
    let local = match problem {
        Problem::MIS => g.max_independent_set(),
        Problem::VC => {
            let mis = g.max_independent_set();
            let mut keep = FixedBitSet::with_capacity(g.n);
            keep.insert_range(..);
            for &v in &mis {
                keep.set(v, false);
            }
            keep.ones().collect()
        }
        Problem::DS => g.min_dominating_set(),
    };
    let mut witness: Vec<VertexId> = local.into_iter().map(|i| sub.vertices()[i]).collect();
    witness.sort_unstable();
    Ok(Solution { problem, size: witness.len(), witness })
}

struct Local {
    n: usize,
    nbr: Vec<FixedBitSet>,
    /// Closed neighborhoods.
    closed: Vec<FixedBitSet>,
}

fn popcount_and(a: &FixedBitSet, b: &FixedBitSet) -> usize {
    a.intersection_count(b)
}

impl Local {
    fn new(sub: &Subgraph) -> Self {
        let n = sub.len();
        let nbr: Vec<FixedBitSet> = sub
            .local_adjacency()
            .iter()
            .map(|l| {
                let mut b = FixedBitSet::with_capacity(n);
                l.iter().for_each(|&j| b.insert(j as usize));
                b
            })
            .collect();
        let closed = nbr
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut c = b.clone();
                c.insert(i);
                c
            })
            .collect();
        Local { n, nbr, closed }
    }

    fn full(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.n);
        all.insert_range(..);
        all
    }

    fn max_independent_set(&self) -> Vec<usize> {
        self.mis(self.full(), -1).unwrap_or_default()
    }

    /// A maximum independent set of `cand` if its size exceeds `floor`, else `None`.
    fn mis(&self, mut cand: FixedBitSet, floor: i64) -> Option<Vec<usize>> {
        let mut forced = Vec::new();
        // degree-0, degree-1 and triangle degree-2 vertices are always safe to take
        loop {
            let pick = cand.ones().find(|&v| {
                let deg = popcount_and(&self.nbr[v], &cand);
                if deg <= 1 {
                    return true;
                }
                if deg == 2 {
                    let mut it = self.nbr[v].intersection(&cand);
                    let (a, b) = (it.next().unwrap(), it.next().unwrap());
                    return self.nbr[a].contains(b);
                }
                false
            });
            let Some(v) = pick else { break };
            forced.push(v);
            cand.difference_with(&self.closed[v]);
        }
        let floor = floor - forced.len() as i64;
        let rest = if cand.is_clear() {
            (floor < 0).then(Vec::new)
        } else {
            let comps = self.components(&cand);
            if comps.len() > 1 {
                let bound: i64 = comps.iter().map(|c| self.clique_cover_bound(c) as i64).sum();
                if bound <= floor {
                    return None;
                }
                let mut all = Vec::new();
                for c in comps {
                    all.extend(self.mis(c, -1).unwrap_or_default());
                }
                (all.len() as i64 > floor).then_some(all)
            } else {
                self.branch(cand, floor)
            }
        };
        rest.map(|mut r| {
            r.extend(forced);
            r
        })
    }

    fn branch(&self, cand: FixedBitSet, mut floor: i64) -> Option<Vec<usize>> {
        if self.clique_cover_bound(&cand) as i64 <= floor {
            return None;
        }
        let v = cand.ones().max_by_key(|&v| (popcount_and(&self.nbr[v], &cand), std::cmp::Reverse(v))).unwrap();
        let mut best = None;
        let mut with = cand.clone();
        with.difference_with(&self.closed[v]);
        if let Some(mut s) = self.mis(with, floor - 1) {
            s.push(v);
            floor = s.len() as i64;
            best = Some(s);
        }
        let mut without = cand;
        without.set(v, false);
        if let Some(s) = self.mis(without, floor) {
            best = Some(s);
        }
        best
    }

    /// Number of cliques in a greedy clique cover of `cand`.
    fn clique_cover_bound(&self, cand: &FixedBitSet) -> usize {
        let mut cliques: Vec<FixedBitSet> = Vec::new();
        for v in cand.ones() {
            match cliques.iter_mut().find(|c| c.is_subset(&self.nbr[v])) {
                Some(c) => c.insert(v),
                None => {
                    let mut c = FixedBitSet::with_capacity(self.n);
                    c.insert(v);
                    cliques.push(c);
                }
            }
        }
        cliques.len()
    }

    fn components(&self, cand: &FixedBitSet) -> Vec<FixedBitSet> {
        let mut left = cand.clone();
        let mut out = Vec::new();
        while let Some(s) = left.minimum() {
            let mut comp = FixedBitSet::with_capacity(self.n);
            let mut stack = vec![s];
            left.set(s, false);
            comp.insert(s);
            while let Some(u) = stack.pop() {
                for w in self.nbr[u].intersection(&left).collect::<Vec<_>>() {
                    left.set(w, false);
                    comp.insert(w);
                    stack.push(w);
                }
            }
            out.push(comp);
        }
        out
    }

    fn min_dominating_set(&self) -> Vec<usize> {
        let mut best = self.greedy_dominating_set();
        let mut ds = DsSearch { g: self, chosen: Vec::new(), best: &mut best };
        ds.search(&FixedBitSet::with_capacity(self.n), &FixedBitSet::with_capacity(self.n));
        best
    }

    fn greedy_dominating_set(&self) -> Vec<usize> {
        let mut dominated = FixedBitSet::with_capacity(self.n);
        let mut out = Vec::new();
        while dominated.count_ones(..) < self.n {
            let v = (0..self.n)
                .max_by_key(|&v| (self.closed[v].difference_count(&dominated), std::cmp::Reverse(v)))
                .unwrap();
            dominated.union_with(&self.closed[v]);
            out.push(v);
        }
        out
    }
}

struct DsSearch<'a> {
    g: &'a Local,
    chosen: Vec<usize>,
    best: &'a mut Vec<usize>,
}

impl DsSearch<'_> {
    fn search(&mut self, dominated: &FixedBitSet, excluded: &FixedBitSet) {
        let g = self.g;
        if dominated.count_ones(..) == g.n {
            if self.chosen.len() < self.best.len() {
                *self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + self.lower_bound(dominated, excluded) >= self.best.len() {
            return;
        }
        // undominated vertex with the fewest remaining dominators
        let mut pick: Option<(usize, FixedBitSet)> = None;
        for u in 0..g.n {
            if dominated[u] {
                continue;
            }
            let mut cands = g.closed[u].clone();
            cands.difference_with(excluded);
            if pick.as_ref().is_none_or(|(_, c)| cands.count_ones(..) < c.count_ones(..)) {
                pick = Some((u, cands));
            }
        }
        let (_, cands) = pick.expect("some vertex is undominated");
        let mut order: Vec<usize> = cands.ones().collect();
        order.sort_by_key(|&w| (std::cmp::Reverse(g.closed[w].difference_count(dominated)), w));
        let mut excluded = excluded.clone();
        for w in order {
            let mut next = dominated.clone();
            next.union_with(&g.closed[w]);
            self.chosen.push(w);
            self.search(&next, &excluded);
            self.chosen.pop();
            excluded.insert(w);
        }
    }

    /// Larger of a coverage bound and a packing bound on the vertices still needed.
    fn lower_bound(&self, dominated: &FixedBitSet, excluded: &FixedBitSet) -> usize {
        let g = self.g;
        let undominated: Vec<usize> = (0..g.n).filter(|&u| !dominated[u]).collect();
        let max_cover = (0..g.n)
            .filter(|&w| !excluded[w])
            .map(|w| g.closed[w].difference_count(dominated))
            .max()
            .unwrap_or(0);
        if max_cover == 0 {
            return usize::MAX / 2;
        }
        let coverage = undominated.len().div_ceil(max_cover);
        // undominated vertices with disjoint candidate sets each need their own dominator
        let mut cand_sets: Vec<FixedBitSet> = undominated
            .iter()
            .map(|&u| {
                let mut c = g.closed[u].clone();
                c.difference_with(excluded);
                c
            })
            .collect();
        if cand_sets.iter().any(|c| c.is_clear()) {
            return usize::MAX / 2;
        }
        cand_sets.sort_by_key(|c| c.count_ones(..));
        let mut used = FixedBitSet::with_capacity(g.n);
        let mut packing = 0;
        for c in cand_sets {
            if c.is_disjoint(&used) {
                used.union_with(&c);
                packing += 1;
            }
        }
        coverage.max(packing)
    }
}
