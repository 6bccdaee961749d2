use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use poracle::apps::{exact_small_solver, Problem};
use poracle::{run_global, GraphAccess, OracleState, RunConfig, Subgraph};
use poracle_bench::{spread, square_grid, triangulation};

fn global(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_global");
    group.sample_size(10);
    for n in [1_000, 10_000] {
        let g = triangulation(n);
        let cfg = RunConfig::builder(0.3, g.d()).k_cap(64).seed(3).build().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| run_global(g, &cfg)));
    }
    group.finish();
}

fn oracle_queries(c: &mut Criterion) {
    let g = square_grid(200);
    let mut group = c.benchmark_group("oracle_query");
    group.sample_size(10);
    for eps in [0.5, 0.25, 0.125] {
        let ell = (1.0f64 / eps).log2().ceil() as usize + 2;
        let cfg = RunConfig::builder(eps, 4).k_cap(64).ell(ell).seed(11).build().unwrap();
        let queries = spread(g.n(), 8);
        group.bench_with_input(BenchmarkId::from_parameter(eps), &cfg, |b, cfg| {
            b.iter(|| {
                // a fresh oracle per query, so no memo is shared
                for &v in &queries {
                    let oracle = OracleState::new(GraphAccess::new(&g), cfg.clone()).unwrap();
                    oracle.oracle_query(v).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let g = square_grid(8);
    let sub = Subgraph::whole(&g);
    let mut group = c.benchmark_group("exact_solver_grid8");
    for p in Problem::ALL {
        group.bench_function(p.to_string(), |b| b.iter(|| exact_small_solver(&sub, p).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, global, oracle_queries, solver);
criterion_main!(benches);
