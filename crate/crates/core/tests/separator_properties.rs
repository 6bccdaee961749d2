mod common;

use common::{fuzz_graph, planar_instance};
use poracle::separator::{hyperfinite_partition, separator_set, tree_chop, Ratio, SeparatorConfig, VertexWeights};
use poracle::{BoundedDegreeGraph, Subgraph, VertexId};
use proptest::prelude::*;

/// Heaviest component left after deleting `sep`, as a weight numerator.
fn heaviest_rest(g: &BoundedDegreeGraph, sub: &Subgraph, sep: &[VertexId], w: &[u64]) -> u64 {
    let mut removed = vec![false; g.n()];
    sep.iter().for_each(|&s| removed[s as usize] = true);
    let weight_of = |v: VertexId| w[sub.vertices().binary_search(&v).unwrap()];
    let mut seen = vec![false; g.n()];
    let mut worst = 0;
    for &s in sub.vertices() {
        if removed[s as usize] || seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut stack = vec![s];
        let mut total = 0;
        while let Some(u) = stack.pop() {
            total += weight_of(u);
            for &x in g.neighbors(u) {
                if !removed[x as usize] && !seen[x as usize] && sub.vertices().binary_search(&x).is_ok() {
                    seen[x as usize] = true;
                    stack.push(x);
                }
            }
        }
        worst = worst.max(total);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn separator_meets_weight_bound(idx in 0u64..10_000, num in 1u64..8, den in 1u64..8, raw_weights in proptest::collection::vec(0u64..5, 200)) {
        let g = fuzz_graph(idx, 150);
        let sub = Subgraph::whole(&g);
        let mut nums: Vec<u64> = raw_weights.into_iter().take(g.n()).collect();
        nums.resize(g.n(), 1);
        if nums.iter().all(|&x| x == 0) {
            nums[0] = 1;
        }
        let den_w: u64 = nums.iter().sum();
        let w = VertexWeights::new(nums.clone(), den_w).unwrap();
        let beta = Ratio::new(num.min(den), den);
        let sep = separator_set(&sub, &w, beta).unwrap();
        let worst = heaviest_rest(&g, &sub, &sep, &nums);
        // worst / den_w <= beta
        prop_assert!(u128::from(worst) * u128::from(beta.den) <= u128::from(beta.num) * u128::from(den_w));
    }

    #[test]
    fn hyperfinite_parts_are_connected_and_bounded(idx in 0u64..10_000, gamma in 0.05f64..1.0, cap in 1usize..60) {
        let g = fuzz_graph(idx, 200);
        let sub = Subgraph::whole(&g);
        let out = hyperfinite_partition(&sub, gamma, g.d(), &SeparatorConfig::planar_practical(Some(cap)));
        prop_assert!(out.k <= cap);
        let mut covered: Vec<VertexId> = out.parts.iter().flat_map(|p| p.members().iter().copied()).collect();
        covered.sort_unstable();
        prop_assert_eq!(covered, (0..g.n() as VertexId).collect::<Vec<_>>());
        for p in &out.parts {
            prop_assert!(p.len() <= out.k);
            prop_assert!(g.is_connected_set(p.members()));
        }
    }

    #[test]
    fn tree_chop_parts_are_connected_and_bounded(idx in 0u64..10_000, k in 1usize..30) {
        let g = fuzz_graph(idx, 150);
        let parts = tree_chop(&Subgraph::whole(&g), k);
        prop_assert_eq!(parts.iter().map(|p| p.len()).sum::<usize>(), g.n());
        for p in &parts {
            prop_assert!(p.len() <= k);
            prop_assert!(g.is_connected_set(p.members()));
        }
    }
}

#[test]
fn planar_separators_fit_the_budget() {
    let cfg = SeparatorConfig::planar_practical(None);
    for idx in 0..20 {
        let g = planar_instance(idx, 400 + 100 * idx as usize);
        let sub = Subgraph::whole(&g);
        for beta in [Ratio::new(1, 2), Ratio::new(1, 8)] {
            let sep = separator_set(&sub, &VertexWeights::uniform(g.n()), beta).unwrap();
            assert!((sep.len() as f64) <= cfg.separator_bound(g.n(), beta.as_f64()), "instance {idx}");
        }
    }
}
