//! `poracle`: instance generation and experiments around the partition oracle.
//!
//! Every subcommand prints JSON-lines telemetry on stdout and a CSV summary on
//! stderr, or writes both (plus artifacts) under `--out DIR`. Exit status is 0
//! when every checked invariant held, 1 on a violation and 2 on bad input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poracle::apps::Problem;
use poracle::Mode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] poracle::Error),
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) | CliError::Core(poracle::Error::Contract(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "poracle", version, about = "Partition oracle experiments for bounded-degree graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Grid,
    Triangulation,
    Regular,
    TreeUnion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Theory,
    Practical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Theory => Mode::Theory,
            ModeArg::Practical => Mode::Practical,
        }
    }
}

/// Where the graph comes from: a file, or a generator seeded per trial.
#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge-list graph file (`n=<count> [d=<bound>]` header, one `u v` per line).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generator used when no input file is given.
    #[arg(long, value_enum, default_value = "triangulation")]
    pub kind: Kind,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Degree bound; defaults to the header value or the maximum degree.
    #[arg(long)]
    pub d: Option<usize>,
    /// Degree of `regular` graphs.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    /// Number of trees in a `tree-union` graph.
    #[arg(long, default_value_t = 2)]
    pub trees: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of trials, using seeds `seed, seed+1, ...`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_enum, default_value = "practical")]
    pub mode: ModeArg,
    /// Cap on the breakup bound k (practical mode).
    #[arg(long)]
    pub k: Option<usize>,
    /// Override the number of rounds.
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the global partitioner and validate its output.
    Partition {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
    },
    /// Answer vertex queries through the partition oracle.
    Oracle {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        /// Comma-separated vertices to query.
        #[arg(long, value_delimiter = ',')]
        queries: Vec<u32>,
        /// Number of uniformly sampled vertices to query when `--queries` is absent.
        #[arg(long, default_value_t = 100)]
        sample: usize,
    },
    /// Compare the oracle's partition with the global partition.
    Equivalence {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
    },
    /// Test planarity through the oracle.
    Test {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 32.0)]
        c_test: f64,
        #[arg(long, default_value_t = 2.0)]
        reject_factor: f64,
        /// Override the sample size.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Estimate the optimum of VC, MIS or DS through the oracle.
    Approx {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, value_parser = parse_problem)]
        problem: Problem,
        #[arg(long, default_value_t = 16.0)]
        c_apx: f64,
        #[arg(long)]
        samples: Option<usize>,
        /// Also solve the whole graph exactly (at most 60 vertices).
        #[arg(long)]
        exact: bool,
    },
    /// Per-query probe counts over an ε sweep.
    Bench {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125")]
        eps: Vec<f64>,
        /// Vertices queried per ε, each through a fresh oracle.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Use `ceil(log2(1/ε)) + 2` rounds instead of the default.
        #[arg(long)]
        short_rounds: bool,
    },
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse().map_err(|e: poracle::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { graph, seed, out } => commands::generate(&graph, seed, out.as_deref()),
        Command::Partition { graph, run, eps } => commands::partition(&graph, &run, eps),
        Command::Oracle { graph, run, eps, queries, sample } => commands::oracle(&graph, &run, eps, &queries, sample),
        Command::Equivalence { graph, run, eps } => commands::equivalence(&graph, &run, eps),
        Command::Test { graph, run, eps, c_test, reject_factor, samples } => {
            commands::test(&graph, &run, eps, c_test, reject_factor, samples)
        }
        Command::Approx { graph, run, eps, problem, c_apx, samples, exact } => {
            commands::approx(&graph, &run, eps, problem, c_apx, samples, exact)
        }
        Command::Bench { graph, run, eps, samples, short_rounds } => {
            commands::bench(&graph, &run, &eps, samples, short_rounds)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    // theory-mode round counts recurse deeply in the oracle
    let _ = rayon::ThreadPoolBuilder::new().stack_size(256 << 20).build_global();
    let worker = std::thread::Builder::new().stack_size(256 << 20).spawn(move || run(cli));
    let result = match worker {
        Ok(handle) => handle.join().unwrap_or_else(|_| Err(CliError::Invariant("worker panicked".into()))),
        Err(e) => Err(CliError::Io(e)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
