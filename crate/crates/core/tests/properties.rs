mod common;

use std::collections::BTreeSet;

use common::{edge_list, rng, single_od_graph};
use ibp_core::embedding::{apply_embedding_steps, find_terminal_isomorphism};
use ibp_core::equilibrium::{
    verify_wardrop, ActiveSet, ConditionalGradient, EquilibriumSolver, SolveError, SolveOptions,
    StartPoint,
};
use ibp_core::fixtures::{f1_graph, F1Variant};
use ibp_core::generators::{
    cycle_with_chords, indexed_graph, random_affine_game, random_two_connected,
};
use ibp_core::graph::{od_subnetwork, EdgeSet, MultiGraph, VertexId};
use ibp_core::paradox::find_f1_embedding;
use ibp_core::paths::{enumerate_simple_paths, PathCap};
use ibp_core::topology::{
    is_li_recursive, is_linearly_independent, is_series_parallel, is_sli, opposite_traversal,
};
use proptest::prelude::*;

/// Counts simple paths by DFS over vertex sequences, weighting each step by
/// the number of parallel edges.
fn oracle_path_count(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> usize {
    let mut mult = vec![vec![0usize; n]; n];
    for &(a, b) in edges {
        mult[a][b] += 1;
        mult[b][a] += 1;
    }
    fn go(v: usize, t: usize, mult: &[Vec<usize>], seen: &mut Vec<bool>) -> usize {
        if v == t {
            return 1;
        }
        let mut total = 0;
        for w in 0..mult.len() {
            if mult[v][w] > 0 && !seen[w] {
                seen[w] = true;
                total += mult[v][w] * go(w, t, mult, seen);
                seen[w] = false;
            }
        }
        total
    }
    let mut seen = vec![false; n];
    seen[s] = true;
    go(s, t, &mult, &mut seen)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn path_count_matches_vertex_dfs(n in 2usize..=6, edges in edge_list(6, 9), s in 0usize..6, t in 0usize..6) {
        let edges: Vec<_> = edges.into_iter().filter(|&(a, b)| a < n && b < n).collect();
        prop_assume!(!edges.is_empty() && s < n && t < n && s != t);
        let g = indexed_graph(n, &edges, &[(s, t)]);
        let paths = enumerate_simple_paths(&g, VertexId(s), VertexId(t), &g.all_edges()).unwrap();
        prop_assert_eq!(paths.len(), oracle_path_count(n, &edges, s, t));
        let distinct: BTreeSet<_> = paths.iter().collect();
        prop_assert_eq!(distinct.len(), paths.len());
    }

    #[test]
    fn subnetwork_is_union_of_paths(g in single_od_graph()) {
        let od = g.od_pairs()[0];
        let paths = enumerate_simple_paths(&g, od.origin, od.destination, &g.all_edges()).unwrap();
        let union: EdgeSet = paths.iter().flatten().copied().collect();
        let net = od_subnetwork(&g, 0).unwrap();
        prop_assert_eq!(net.edges, union);
    }

    #[test]
    fn recognizers_agree_and_nest(g in single_od_graph()) {
        let net = od_subnetwork(&g, 0).unwrap();
        let restricted = g.restrict(&net.edges, &[g.od_pairs()[0]]);
        let net = od_subnetwork(&restricted, 0).unwrap();
        prop_assert_eq!(net.edges.len(), restricted.edge_count());

        let (sp, _) = is_series_parallel(&net).unwrap();
        let opposite = opposite_traversal(&net, PathCap::default()).unwrap();
        prop_assert_eq!(sp, opposite.is_none());

        let (li, _) = is_linearly_independent(&net, PathCap::default()).unwrap();
        prop_assert_eq!(li, is_li_recursive(&net).unwrap());

        let (sli, _) = is_sli(&net).unwrap();
        prop_assert!(!li || sli);
        prop_assert!(!sli || sp);
    }

    #[test]
    fn two_connected_dichotomy(
        n in 3usize..=6,
        chords in prop::collection::vec((0usize..6, 1usize..6), 0..=3),
        ods in prop::collection::vec((0usize..6, 1usize..6), 2),
    ) {
        let fix = |(a, k): (usize, usize)| (a % n, (a % n + 1 + k % (n - 1)) % n);
        let chords: Vec<_> = chords.into_iter().map(fix).collect();
        let ods: Vec<_> = ods.into_iter().map(fix).collect();
        let unordered = |(a, b): (usize, usize)| (a.min(b), a.max(b));
        prop_assume!(unordered(ods[0]) != unordered(ods[1]));
        let g = cycle_with_chords(n, &chords, &ods);
        match find_f1_embedding(&g) {
            Ok(steps) => {
                prop_assert!(!chords.is_empty());
                let reduced = apply_embedding_steps(&g, &steps).unwrap();
                for variant in F1Variant::ALL {
                    let target = f1_graph(variant);
                    if find_terminal_isomorphism(&reduced, &target).is_some() {
                        return Ok(());
                    }
                }
                prop_assert!(false, "replayed steps do not yield F1");
            }
            Err(e) => prop_assert!(chords.is_empty(), "non-cycle block rejected: {e}"),
        }
    }
}

fn solvable(g: &MultiGraph) -> bool {
    g.od_pairs().iter().all(|od| {
        enumerate_simple_paths(g, od.origin, od.destination, &g.all_edges())
            .map(|p| !p.is_empty())
            .unwrap_or(false)
    })
}

#[test]
fn backends_agree_on_random_affine_games() {
    let opts = SolveOptions::default().with_tolerance(1e-10);
    let mut compared = 0;
    for seed in 0..80 {
        let mut r = rng(seed);
        let g = random_two_connected(&mut r, 2);
        if !solvable(&g) {
            continue;
        }
        let game = random_affine_game(&g, &mut r);
        let cg = ConditionalGradient.solve(&game, &opts).unwrap();
        let exact = match ActiveSet.solve(&game, &opts) {
            Ok(x) => x,
            Err(SolveError::NotApplicable { .. }) => continue,
            Err(e) => panic!("seed {seed}: {e}"),
        };
        for (a, b) in cg.type_latencies.iter().zip(&exact.type_latencies) {
            assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        }
        assert!(verify_wardrop(&game, &cg, 1e-8).passed, "seed {seed}");
        assert!(verify_wardrop(&game, &exact, 1e-8).passed, "seed {seed}");
        compared += 1;
    }
    assert!(compared >= 50, "only {compared} games compared");
}

#[test]
fn type_latencies_do_not_depend_on_start() {
    for seed in 100..115 {
        let mut r = rng(seed);
        let g = random_two_connected(&mut r, 2);
        if !solvable(&g) {
            continue;
        }
        let game = random_affine_game(&g, &mut r);
        let runs: Vec<Vec<f64>> = [
            StartPoint::FirstPath,
            StartPoint::Uniform,
            StartPoint::Random(seed),
            StartPoint::Random(seed + 1),
        ]
        .into_iter()
        .map(|start| {
            let opts = SolveOptions::default()
                .with_tolerance(1e-10)
                .with_start(start);
            ConditionalGradient
                .solve(&game, &opts)
                .unwrap()
                .type_latencies
        })
        .collect();
        for run in &runs[1..] {
            for (a, b) in run.iter().zip(&runs[0]) {
                assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
            }
        }
    }
}
