//! Fixed instances shared by the benchmarks.

use poracle::generate::{generate, grid, GeneratorKind, GeneratorSpec};
use poracle::BoundedDegreeGraph;

pub fn triangulation(n: usize) -> BoundedDegreeGraph {
    generate(&GeneratorSpec::new(GeneratorKind::RandomTriangulation, n, 1)).expect("triangulation")
}

pub fn square_grid(side: usize) -> BoundedDegreeGraph {
    grid(side, side)
}

/// Evenly spread query vertices.
pub fn spread(n: usize, count: usize) -> Vec<u32> {
    (0..count).map(|i| (i * n / count) as u32).collect()
}
