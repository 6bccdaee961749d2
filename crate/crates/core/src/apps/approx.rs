//! Additive approximation of VC, MIS and DS sizes through the partition oracle.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::solver::{exact_small_solver, Problem};
use crate::config::RunConfig;
use crate::error::Result;
use crate::graph::VertexId;
use crate::oracle::OracleState;
use crate::separator::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxConfig {
    /// Sample size is `ceil(c_apx / ε²)` unless `samples` overrides it.
    pub c_apx: f64,
    pub samples: Option<usize>,
    pub sample_seed: u64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig { c_apx: 16.0, samples: None, sample_seed: 0 }
    }
}

impl ApproxConfig {
    pub fn sample_size(&self, epsilon: f64) -> usize {
        self.samples.unwrap_or_else(|| (self.c_apx / (epsilon * epsilon)).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub problem: Problem,
    pub estimate: f64,
    pub sample_size: usize,
    pub epsilon: f64,
}

/// Oracle parameters for an `εn`-additive estimate on degree bound `d`: partition parameter `ε/(2d)`.
pub fn approx_oracle_config(epsilon: f64, d: usize, mode: Mode, seed: u64) -> Result<RunConfig> {
    RunConfig::builder(epsilon / (2.0 * d.max(1) as f64), d).mode(mode).seed(seed).build()
}

/// Estimates `OPT` as `n` times the sampled mean of `OPT(part(v)) / |part(v)|`.
/// Each part is solved in isolation.
pub fn approx_opt(oracle: &OracleState<'_>, problem: Problem, epsilon: f64, cfg: &ApproxConfig) -> Result<ApproxResult> {
    let n = oracle.n();
    let s = cfg.sample_size(epsilon);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sample_seed);
    let mut local: FxHashMap<VertexId, f64> = FxHashMap::default();
    let mut total = 0.0;
    for _ in 0..s {
        let v = rng.random_range(0..n as VertexId);
        let part = oracle.oracle_query(v)?;
        let density = match local.get(&part.anchor()) {
            Some(&x) => x,
            None => {
                let opt = exact_small_solver(&oracle.part_subgraph(&part)?, problem)?.size;
                let x = opt as f64 / part.len() as f64;
                local.insert(part.anchor(), x);
                x
            }
        };
        total += density;
    }
    let estimate = (n as f64 * total / s as f64).clamp(0.0, n as f64);
    Ok(ApproxResult { problem, estimate, sample_size: s, epsilon })
}
