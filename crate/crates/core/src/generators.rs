//! Seeded random networks and games for property tests and benchmarks.

use rand::Rng;

use crate::equilibrium::{LatencyFunction, RoutingGame, TravelerType};
use crate::graph::{EdgeId, EdgeSet, MultiGraph};
use crate::paths::enumerate_simple_paths;

/// Graph on `v0..v{n-1}` with edges `e0..` taken from index pairs.
pub fn indexed_graph(n: usize, edges: &[(usize, usize)], od: &[(usize, usize)]) -> MultiGraph {
    MultiGraph::new(
        (0..n).map(|i| format!("v{i}")).collect(),
        edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| (format!("e{k}"), format!("v{a}"), format!("v{b}")))
            .collect(),
        od.iter()
            .map(|&(o, d)| (format!("v{o}"), format!("v{d}")))
            .collect(),
    )
    .expect("indices are in range")
}

/// Cycle `v0 .. v{n-1}` plus the given chords, which may be parallel to
/// cycle edges.
pub fn cycle_with_chords(n: usize, chords: &[(usize, usize)], od: &[(usize, usize)]) -> MultiGraph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    edges.extend_from_slice(chords);
    indexed_graph(n, &edges, od)
}

fn distinct_pair<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    (a, (a + rng.gen_range(1..n)) % n)
}

/// 2-connected network on 3 to 5 vertices with up to `max_chords` chords and
/// two OD pairs with different terminal sets.
pub fn random_two_connected<R: Rng>(rng: &mut R, max_chords: usize) -> MultiGraph {
    let n = rng.gen_range(3..=5);
    let chords: Vec<(usize, usize)> = (0..rng.gen_range(0..=max_chords))
        .map(|_| distinct_pair(rng, n))
        .collect();
    let first = distinct_pair(rng, n);
    let second = loop {
        let p = distinct_pair(rng, n);
        if (p.0.min(p.1), p.0.max(p.1)) != (first.0.min(first.1), first.0.max(first.1)) {
            break p;
        }
    };
    cycle_with_chords(n, &chords, &[first, second])
}

/// Affine game on `g` with one type per OD pair. Each type knows one random
/// OD path plus every other edge with probability 1/2. Constants lie in
/// `[0, 10)`, slopes in `[0, 3)` and rates in `[0.5, 5)`.
pub fn random_affine_game<R: Rng>(g: &MultiGraph, rng: &mut R) -> RoutingGame {
    let latencies = g
        .edge_ids()
        .map(|_| {
            LatencyFunction::affine(rng.gen_range(0.0..10.0), rng.gen_range(0.0..3.0))
                .expect("in range")
        })
        .collect();
    let types = g
        .od_pairs()
        .iter()
        .enumerate()
        .map(|(k, od)| {
            let paths = enumerate_simple_paths(g, od.origin, od.destination, &g.all_edges())
                .expect("small graph");
            assert!(!paths.is_empty(), "OD pair {k} is disconnected");
            let mut info: EdgeSet = paths[rng.gen_range(0..paths.len())]
                .iter()
                .copied()
                .collect();
            info.extend(g.edge_ids().filter(|_| rng.gen_bool(0.5)));
            TravelerType::new(rng.gen_range(0.5..5.0), k, info)
        })
        .collect();
    RoutingGame::new(g.clone(), latencies, types).expect("generated game is valid")
}

/// A chain of 2 to 4 LI blocks from `v0` to the last cut vertex. Each block
/// is either a bundle of 2 or 3 parallel edges or a triangle with the direct
/// edge and a two-edge detour. OD pair 0 runs along the whole chain; when
/// present, OD pair 1 runs along it backwards.
///
/// Two or three types are drawn over those pairs. Every type knows at least
/// one route through each block, and latencies have slopes of at least 1/2,
/// so equilibrium edge flows are unique.
pub fn random_sli_chain_game<R: Rng>(rng: &mut R) -> RoutingGame {
    let blocks = rng.gen_range(2..=4);
    let mut edges = Vec::new();
    // per block, its local routes as edge indices
    let mut routes: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut next_vertex = 1;
    let mut entry = 0;
    for _ in 0..blocks {
        let exit = next_vertex;
        next_vertex += 1;
        let mut local = Vec::new();
        if rng.gen_bool(0.5) {
            for _ in 0..rng.gen_range(2..=3) {
                local.push(vec![edges.len()]);
                edges.push((entry, exit));
            }
        } else {
            let mid = next_vertex;
            next_vertex += 1;
            local.push(vec![edges.len()]);
            edges.push((entry, exit));
            local.push(vec![edges.len(), edges.len() + 1]);
            edges.push((entry, mid));
            edges.push((mid, exit));
        }
        routes.push(local);
        entry = exit;
    }
    let end = entry;
    let two_pairs = rng.gen_bool(0.5);
    let od: Vec<(usize, usize)> = if two_pairs {
        vec![(0, end), (end, 0)]
    } else {
        vec![(0, end)]
    };
    let g = indexed_graph(next_vertex, &edges, &od);
    let latencies = g
        .edge_ids()
        .map(|_| {
            LatencyFunction::affine(rng.gen_range(0.0..10.0), rng.gen_range(0.5..3.0))
                .expect("in range")
        })
        .collect();
    let types = (0..rng.gen_range(2..=3))
        .map(|j| {
            let mut info = EdgeSet::new();
            for local in &routes {
                let route = &local[rng.gen_range(0..local.len())];
                info.extend(route.iter().map(|&e| EdgeId(e)));
            }
            info.extend(g.edge_ids().filter(|_| rng.gen_bool(0.5)));
            TravelerType::new(rng.gen_range(0.5..5.0), j % od.len(), info)
        })
        .collect();
    RoutingGame::new(g, latencies, types).expect("generated game is valid")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::od_subnetwork;
    use crate::topology::is_sli;

    #[test]
    fn chains_are_sli() {
        for seed in 0..20 {
            let game = random_sli_chain_game(&mut ChaCha8Rng::seed_from_u64(seed));
            let g = game.graph();
            for k in 0..g.od_pairs().len() {
                assert!(
                    is_sli(&od_subnetwork(g, k).unwrap()).unwrap().0,
                    "seed {seed}"
                );
            }
        }
    }

    #[test]
    fn two_connected_pairs_differ() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_two_connected(&mut rng, 3);
            let [a, b] = g.od_pairs() else { panic!() };
            assert_ne!(a.unordered(), b.unordered());
        }
    }
}
