//! Exact planarity checks for whole graphs and for oracle parts.

use petgraph::graph::UnGraph;
use rustworkx_core::planar::is_planar;

use crate::graph::BoundedDegreeGraph;
use crate::separator::Subgraph;

/// Planarity of a simple graph on `0..n` given by its edge list.
pub fn is_planar_edges<I>(n: usize, edges: I) -> bool
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let edges: Vec<(u32, u32)> = edges.into_iter().map(|(u, v)| (u as u32, v as u32)).collect();
    if n >= 3 && edges.len() > 3 * n - 6 {
        return false;
    }
    if n < 5 || edges.len() < 9 {
        // K5 has 10 edges and K3,3 has 9.
        return true;
    }
    let mut g = UnGraph::<(), ()>::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    g.extend_with_edges(edges);
    is_planar(&g)
}

pub fn is_planar_exact(g: &BoundedDegreeGraph) -> bool {
    is_planar_edges(g.n(), g.edges().map(|(u, v)| (u as usize, v as usize)))
}

pub fn is_planar_subgraph(sub: &Subgraph) -> bool {
    let edges = sub.local_adjacency().iter().enumerate().flat_map(|(i, l)| {
        l.iter().filter(move |&&j| j as usize > i).map(move |&j| (i, j as usize))
    });
    is_planar_edges(sub.len(), edges)
}
