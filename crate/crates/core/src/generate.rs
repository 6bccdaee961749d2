//! Seeded instance families: grids, triangulated grids, random regular graphs
//! and unions of bounded-degree random trees.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundedDegreeGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GeneratorKind {
    /// Row-major grid `ceil(sqrt n)` wide; the last row may be partial.
    Grid,
    /// The same grid with one random diagonal in every complete cell.
    RandomTriangulation,
    RandomRegular { degree: usize },
    /// Union of `trees` random spanning trees, each with maximum degree 3.
    TreeUnion { trees: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    /// Degree bound for the result; defaults to the realized maximum degree.
    pub d: Option<usize>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        GeneratorSpec { kind, n, d: None, seed }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<BoundedDegreeGraph> {
    if spec.n == 0 {
        return Err(Error::Usage("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = match spec.kind {
        GeneratorKind::Grid => grid_edges(spec.n, None),
        GeneratorKind::RandomTriangulation => grid_edges(spec.n, Some(&mut rng)),
        GeneratorKind::RandomRegular { degree } => regular_edges(spec.n, degree, &mut rng)?,
        GeneratorKind::TreeUnion { trees } => tree_union_edges(spec.n, trees, &mut rng)?,
    };
    let mut deg = vec![0usize; spec.n];
    for &(u, v) in &edges {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    let max_deg = deg.into_iter().max().unwrap_or(0);
    let d = match spec.d {
        Some(d) if d < max_deg => {
            return Err(Error::Usage(format!("degree bound {d} below realized maximum degree {max_deg}")))
        }
        Some(d) => d,
        None => max_deg,
    };
    BoundedDegreeGraph::from_edges(spec.n, d, edges)
}

/// `rows × cols` grid with degree bound 4.
pub fn grid(rows: usize, cols: usize) -> BoundedDegreeGraph {
    let mut e = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = (i * cols + j) as VertexId;
            if j + 1 < cols {
                e.push((v, v + 1));
            }
            if i + 1 < rows {
                e.push((v, v + cols as VertexId));
            }
        }
    }
    BoundedDegreeGraph::from_edges(rows * cols, 4, e).expect("grid is simple")
}

fn grid_edges(n: usize, mut diagonals: Option<&mut ChaCha8Rng>) -> Vec<(VertexId, VertexId)> {
    let cols = (n as f64).sqrt().ceil() as usize;
    let at = |i: usize, j: usize| -> Option<VertexId> {
        let idx = i * cols + j;
        (j < cols && idx < n).then_some(idx as VertexId)
    };
    let mut e = Vec::new();
    let rows = n.div_ceil(cols);
    for i in 0..rows {
        for j in 0..cols {
            let Some(v) = at(i, j) else { continue };
            if let Some(r) = at(i, j + 1) {
                e.push((v, r));
            }
            if let Some(b) = at(i + 1, j) {
                e.push((v, b));
            }
            if let Some(rng) = diagonals.as_deref_mut() {
                if let (Some(r), Some(b), Some(br)) = (at(i, j + 1), at(i + 1, j), at(i + 1, j + 1)) {
                    if rng.random_bool(0.5) {
                        e.push((v, br));
                    } else {
                        e.push((r, b));
                    }
                }
            }
        }
    }
    e
}

/// Configuration-model pairing, restarted until the result is simple.
fn regular_edges(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(VertexId, VertexId)>> {
    if r >= n || (n * r) % 2 == 1 {
        return Err(Error::Usage(format!("no simple {r}-regular graph on {n} vertices")));
    }
    'attempt: for _ in 0..10_000 {
        let mut points: Vec<VertexId> = (0..n as VertexId).flat_map(|v| std::iter::repeat_n(v, r)).collect();
        points.shuffle(rng);
        let mut seen = rustc_hash::FxHashSet::default();
        let mut e = Vec::with_capacity(n * r / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            e.push((u, v));
        }
        return Ok(e);
    }
    Err(Error::Usage(format!("pairing failed to produce a simple {r}-regular graph on {n} vertices")))
}

fn tree_union_edges(n: usize, trees: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(VertexId, VertexId)>> {
    if trees == 0 {
        return Err(Error::Usage("tree_union needs at least one tree".into()));
    }
    let mut seen = rustc_hash::FxHashSet::default();
    let mut e = Vec::new();
    for _ in 0..trees {
        let mut order: Vec<VertexId> = (0..n as VertexId).collect();
        order.shuffle(rng);
        let mut deg = vec![0u8; n];
        // attach each vertex to a random earlier vertex with spare degree
        let mut open: Vec<VertexId> = Vec::new();
        for (idx, &v) in order.iter().enumerate() {
            if idx > 0 {
                let slot = rng.random_range(0..open.len());
                let p = open[slot];
                deg[p as usize] += 1;
                deg[v as usize] += 1;
                if deg[p as usize] == 3 {
                    open.swap_remove(slot);
                }
                if seen.insert((p.min(v), p.max(v))) {
                    e.push((p.min(v), p.max(v)));
                }
            }
            open.push(v);
        }
    }
    Ok(e)
}
