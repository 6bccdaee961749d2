//! Partition oracle for bounded-degree minor-free graphs.
//!
//! The crate provides the whole-graph partitioner ([`global::run_global`]), its
//! local emulation ([`oracle::OracleState`]), which answers "which part is `v`
//! in?" by exploring only a neighborhood of `v`, and consumers of the oracle:
//! a planarity tester and additive approximations of vertex cover, independent
//! set and dominating set sizes.

pub mod apps;
pub mod coin;
pub mod config;
pub mod error;
pub mod generate;
pub mod global;
pub mod graph;
pub mod oracle;
pub mod separator;

pub use coin::{coin, Coin, CoinKey};
pub use config::{RunConfig, RunConfigBuilder};
pub use error::{Error, Result};
pub use global::{run_global, GlobalRun, RoundTelemetry};
pub use graph::{
    contract, cut_size, validate_partition, BoundedDegreeGraph, Component, ContractedGraph, GraphAccess,
    Partition, PartitionReport, QueryCounts, VertexId, Violation,
};
pub use oracle::{OracleState, QueryStats};
pub use separator::{Mode, SeparatorConfig, Subgraph};
