//! Planarity tester on top of the partition oracle.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::planarity::is_planar_subgraph;
use crate::config::RunConfig;
use crate::error::Result;
use crate::graph::VertexId;
use crate::oracle::OracleState;
use crate::separator::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TesterConfig {
    /// Sample size is `ceil(c_test / ε²)` unless `samples` overrides it.
    pub c_test: f64,
    pub samples: Option<usize>,
    /// Reject when the estimated cut exceeds `reject_factor · ε' · n`.
    pub reject_factor: f64,
    pub sample_seed: u64,
}

impl Default for TesterConfig {
    fn default() -> Self {
        TesterConfig { c_test: 32.0, samples: None, reject_factor: 2.0, sample_seed: 0 }
    }
}

impl TesterConfig {
    pub fn sample_size(&self, epsilon: f64) -> usize {
        self.samples.unwrap_or_else(|| (self.c_test / (epsilon * epsilon)).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub decision: Decision,
    pub sampled: Vec<VertexId>,
    /// Estimated number of cut edges divided by `n`.
    pub estimated_cut_fraction: f64,
    /// Cut fraction above which the tester rejects.
    pub threshold: f64,
    /// A sampled part that is not planar, if one was found.
    pub non_planar_part: Option<Vec<VertexId>>,
}

impl TestVerdict {
    pub fn rejects(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Oracle parameters for testing with proximity ε on degree bound `d`: `ε' = min(εd/4, 1)`.
pub fn tester_oracle_config(epsilon: f64, d: usize, mode: Mode, seed: u64) -> Result<RunConfig> {
    let eps = (epsilon * d.max(1) as f64 / 4.0).min(1.0);
    RunConfig::builder(eps, d).mode(mode).seed(seed).build()
}

/// Samples vertices, estimates the oracle partition's cut and checks every
/// sampled part for planarity. The threshold uses the oracle's own ε.
pub fn test_planarity(oracle: &OracleState<'_>, epsilon: f64, cfg: &TesterConfig) -> Result<TestVerdict> {
    let n = oracle.n();
    let s = cfg.sample_size(epsilon);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sample_seed);
    let sampled: Vec<VertexId> = (0..s).map(|_| rng.random_range(0..n as VertexId)).collect();
    let threshold = cfg.reject_factor * oracle.config().epsilon;

    let mut planar: FxHashMap<VertexId, bool> = FxHashMap::default();
    let mut leaving = 0u64;
    let mut non_planar_part = None;
    for &v in &sampled {
        let part = oracle.oracle_query(v)?;
        leaving += oracle.incidence_list(v)?.iter().filter(|&&u| !part.contains(u)).count() as u64;
        if non_planar_part.is_none() {
            let ok = match planar.get(&part.anchor()) {
                Some(&ok) => ok,
                None => {
                    let ok = is_planar_subgraph(&oracle.part_subgraph(&part)?);
                    planar.insert(part.anchor(), ok);
                    ok
                }
            };
            if !ok {
                non_planar_part = Some(part.into_members());
            }
        }
    }
    // each cut edge has two endpoints
    let estimated_cut_fraction = leaving as f64 / (2.0 * s as f64);
    let decision = if non_planar_part.is_some() || estimated_cut_fraction > threshold {
        Decision::Reject
    } else {
        Decision::Accept
    };
    Ok(TestVerdict { decision, sampled, estimated_cut_fraction, threshold, non_planar_part })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BoundedDegreeGraph, GraphAccess};

    #[test]
    fn edgeless_graph_is_accepted() {
        let g = BoundedDegreeGraph::empty(50, 3);
        for eps in [0.1, 0.5, 1.0] {
            let o = OracleState::new(GraphAccess::new(&g), tester_oracle_config(eps, 3, Mode::Practical, 1).unwrap())
                .unwrap();
            let v = test_planarity(&o, eps, &TesterConfig::default()).unwrap();
            assert_eq!(v.decision, Decision::Accept);
            assert_eq!(v.estimated_cut_fraction, 0.0);
        }
    }

    #[test]
    fn disjoint_planar_blobs_are_accepted() {
        // 20 disjoint K4s: every part is a K4 or a piece of one, all planar
        let edges = (0..20u32).flat_map(|b| {
            let o = 4 * b;
            [(o, o + 1), (o, o + 2), (o, o + 3), (o + 1, o + 2), (o + 1, o + 3), (o + 2, o + 3)]
        });
        let g = BoundedDegreeGraph::from_edges(80, 3, edges).unwrap();
        for seed in 0..10 {
            let cfg = tester_oracle_config(0.5, 3, Mode::Practical, seed).unwrap();
            let o = OracleState::new(GraphAccess::new(&g), cfg).unwrap();
            let v = test_planarity(&o, 0.5, &TesterConfig { sample_seed: seed, ..Default::default() }).unwrap();
            assert_eq!(v.decision, Decision::Accept, "seed {seed}");
        }
    }

    #[test]
    fn k5_parts_are_rejected_with_witness() {
        // disjoint K5s with d = 4: far from planar and each K5 fits in one part
        let edges = (0..10u32).flat_map(|b| {
            let o = 5 * b;
            (0..5).flat_map(move |i| (i + 1..5).map(move |j| (o + i, o + j)))
        });
        let g = BoundedDegreeGraph::from_edges(50, 4, edges).unwrap();
        let cfg = tester_oracle_config(0.5, 4, Mode::Practical, 3).unwrap();
        let o = OracleState::new(GraphAccess::new(&g), cfg).unwrap();
        let v = test_planarity(&o, 0.5, &TesterConfig::default()).unwrap();
        assert!(v.rejects());
        let part = v.non_planar_part.unwrap();
        assert_eq!(part.len(), 5);
    }

    #[test]
    fn sample_size_formula() {
        let cfg = TesterConfig::default();
        assert_eq!(cfg.sample_size(0.5), 128);
        assert_eq!(cfg.sample_size(0.1), 3200);
        assert_eq!(TesterConfig { samples: Some(7), ..cfg }.sample_size(0.1), 7);
    }
}
