mod common;

use common::{fuzz_graph, planar_instance};
use poracle::global::{component_coin, star_contraction_round};
use poracle::{contract, cut_size, run_global, validate_partition, Coin, Partition, RunConfig, VertexId};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_forms_stars_and_conserves_weight(idx in 0u64..10_000, seed: u64, rounds in 1usize..6) {
        let g = fuzz_graph(idx, 120);
        let mut gi = contract(&g, &Partition::singletons(g.n())).unwrap();
        for i in 1..=rounds {
            let (next, stats) = star_contraction_round(&gi, i, seed);
            prop_assert!(next.total_weight() <= gi.total_weight());
            prop_assert_eq!(next.num_components() + stats.merges, gi.num_components());
            // every new component is one old component plus Heads satellites around a Tails center
            for comp in next.components() {
                let olds: Vec<_> = gi.components().iter().filter(|c| comp.contains(c.members()[0])).collect();
                let tails = olds.iter().filter(|c| component_coin(seed, i, c) == Coin::Tails).count();
                if olds.len() > 1 {
                    prop_assert_eq!(tails, 1);
                }
                prop_assert_eq!(olds.iter().map(|c| c.len()).sum::<usize>(), comp.len());
                prop_assert!(g.is_connected_set(comp.members()));
            }
            // recomputing the contraction from scratch gives the same weights
            let direct = contract(&g, &Partition::from_components(g.n(), next.components().to_vec()).unwrap()).unwrap();
            prop_assert_eq!(direct.total_weight(), next.total_weight());
            gi = next;
        }
    }

    #[test]
    fn global_output_is_structurally_valid(idx in 0u64..10_000, seed: u64, eps in 0.1f64..1.0, cap in proptest::option::of(1usize..30)) {
        let g = fuzz_graph(idx, 150);
        let mut b = RunConfig::builder(eps, g.d()).seed(seed);
        if let Some(cap) = cap {
            b = b.k_cap(cap);
        }
        let cfg = b.build().unwrap();
        let run = run_global(&g, &cfg);
        let report = validate_partition(&g, &run.partition, 1.0, cfg.k_final);
        prop_assert!(report.structural_ok(), "{:?}", report.violations);
        prop_assert_eq!(&run_global(&g, &cfg).partition, &run.partition);
        let last = run.rounds.last().map_or(g.num_edges() as u64, |r| r.w_after_breakup);
        prop_assert_eq!(last + run.refinement.added_weight, cut_size(&g, &run.partition));
    }
}

#[test]
fn partition_json_round_trips() {
    for idx in 0..10 {
        let g = planar_instance(idx, 300);
        let run = run_global(&g, &RunConfig::practical(0.4, g.d(), idx).unwrap());
        let text = run.partition.to_json();
        assert_eq!(Partition::from_json(g.n(), &text).unwrap(), run.partition);
    }
}

#[test]
fn theory_mode_formulas_run_on_tiny_graphs() {
    // theory constants make k exceed n, so only the final refinement can split
    let g = planar_instance(1, 40);
    let cfg = RunConfig::builder(0.5, g.d()).mode(poracle::Mode::Theory).ell(6).build().unwrap();
    assert!(cfg.k > g.n());
    let run = run_global(&g, &cfg);
    assert!(validate_partition(&g, &run.partition, 1.0, cfg.k_final).structural_ok());
    let members: Vec<VertexId> = run.partition.parts()[0].members().to_vec();
    assert!(g.is_connected_set(&members));
}
