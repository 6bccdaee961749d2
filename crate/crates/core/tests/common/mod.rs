#![allow(dead_code)]

use poracle::generate::{generate, GeneratorKind, GeneratorSpec};
use poracle::{BoundedDegreeGraph, VertexId};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

/// Random simple graph with maximum degree `d`: random edge attempts that
/// respect the degree bound.
pub fn bounded_random(n: usize, d: usize, attempts: usize, rng: &mut ChaCha8Rng) -> BoundedDegreeGraph {
    let mut deg = vec![0usize; n];
    let mut seen = FxHashSet::default();
    let mut edges = Vec::new();
    if n >= 2 {
        for _ in 0..attempts {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            let key = (u.min(v) as VertexId, u.max(v) as VertexId);
            if u != v && deg[u] < d && deg[v] < d && seen.insert(key) {
                deg[u] += 1;
                deg[v] += 1;
                edges.push(key);
            }
        }
    }
    BoundedDegreeGraph::from_edges(n, d.max(1), edges).unwrap()
}

/// K5 on the first five vertices plus random bounded-degree edges elsewhere.
pub fn k5_supergraph(n: usize, rng: &mut ChaCha8Rng) -> BoundedDegreeGraph {
    let n = n.max(5);
    let d = 6;
    let mut deg = vec![0usize; n];
    let mut seen = FxHashSet::default();
    let mut edges = Vec::new();
    for u in 0..5u32 {
        for v in u + 1..5 {
            seen.insert((u, v));
            edges.push((u, v));
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
    }
    for _ in 0..2 * n {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let key = (u.min(v) as VertexId, u.max(v) as VertexId);
        if u != v && deg[u] < d && deg[v] < d && seen.insert(key) {
            deg[u] += 1;
            deg[v] += 1;
            edges.push(key);
        }
    }
    BoundedDegreeGraph::from_edges(n, d, edges).unwrap()
}

/// Disjoint union of the given graphs with vertex ids shuffled.
pub fn disjoint_union(parts: &[BoundedDegreeGraph], rng: &mut ChaCha8Rng) -> BoundedDegreeGraph {
    let n: usize = parts.iter().map(BoundedDegreeGraph::n).sum();
    let d = parts.iter().map(BoundedDegreeGraph::d).max().unwrap_or(1);
    let mut perm: Vec<VertexId> = (0..n as VertexId).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    let mut offset = 0;
    for g in parts {
        edges.extend(g.edges().map(|(u, v)| (perm[offset + u as usize], perm[offset + v as usize])));
        offset += g.n();
    }
    BoundedDegreeGraph::from_edges(n, d, edges).unwrap()
}

/// The `idx`-th graph of a varied family: planar generators, tree unions,
/// random regular expanders, sparse random graphs, K5 supergraphs and
/// disconnected unions, with sizes up to `max_n`.
pub fn fuzz_graph(idx: u64, max_n: usize) -> BoundedDegreeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ idx.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = rng.random_range(2..=max_n);
    let seed = rng.random::<u64>();
    match idx % 7 {
        0 => generate(&GeneratorSpec::new(GeneratorKind::Grid, n, seed)).unwrap(),
        1 => generate(&GeneratorSpec::new(GeneratorKind::RandomTriangulation, n, seed)).unwrap(),
        2 => generate(&GeneratorSpec::new(GeneratorKind::TreeUnion { trees: rng.random_range(1..=3) }, n, seed)).unwrap(),
        3 => {
            let r = rng.random_range(3..=5);
            let n = (n.max(r + 1) + 1) & !1;
            generate(&GeneratorSpec::new(GeneratorKind::RandomRegular { degree: r }, n, seed)).unwrap()
        }
        4 => {
            let d = rng.random_range(1..=6);
            let attempts = rng.random_range(0..=3 * n);
            bounded_random(n, d, attempts, &mut rng)
        }
        5 => k5_supergraph(n, &mut rng),
        _ => {
            let pieces: u64 = rng.random_range(2..=4);
            let graphs: Vec<_> =
                (0..pieces).map(|i| fuzz_graph((idx * 31 + i + 1) * 7 + i % 6, (max_n / pieces as usize).max(6))).collect();
            disjoint_union(&graphs, &mut rng)
        }
    }
}

/// Small planar instances: grids and triangulations.
pub fn planar_instance(idx: u64, n: usize) -> BoundedDegreeGraph {
    let kind = if idx.is_multiple_of(2) { GeneratorKind::Grid } else { GeneratorKind::RandomTriangulation };
    generate(&GeneratorSpec::new(kind, n, idx)).unwrap()
}
