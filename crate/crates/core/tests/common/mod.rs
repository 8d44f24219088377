#![allow(dead_code)]

use ibp_core::generators::indexed_graph;
use ibp_core::graph::MultiGraph;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Loop-free edge lists on `n` vertices.
pub fn edge_list(n: usize, max_edges: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..n, 1..n), 1..=max_edges)
        .prop_map(move |pairs| pairs.into_iter().map(|(a, k)| (a, (a + k) % n)).collect())
}

/// Connected graph with one OD pair `(v0, v{n-1})`: a random spanning tree
/// plus extra edges.
pub fn single_od_graph() -> impl Strategy<Value = MultiGraph> {
    (3usize..=6)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(any::<prop::sample::Index>(), n - 1),
                edge_list(n, 5),
            )
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> =
                (1..n).map(|v| (parents[v - 1].index(v), v)).collect();
            edges.extend(extra);
            indexed_graph(n, &edges, &[(0, n - 1)])
        })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
