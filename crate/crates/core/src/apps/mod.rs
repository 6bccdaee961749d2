//! Consumers of the partition oracle.

pub mod approx;
pub mod planarity;
pub mod solver;
pub mod tester;

pub use approx::{approx_opt, approx_oracle_config, ApproxConfig, ApproxResult};
pub use planarity::{is_planar_edges, is_planar_exact, is_planar_subgraph};
pub use solver::{exact_small_solver, Problem, Solution};
pub use tester::{test_planarity, tester_oracle_config, Decision, TestVerdict, TesterConfig};
