use serde::Serialize;

use super::{
    EquilibriumResult, EquilibriumSolver, RoutingGame, SolveError, SolveOptions, TravelerType,
};
use crate::blocks::{decompose_blocks, BlockDecomposition, BlockId};
use crate::graph::{EdgeId, EdgeSet, OdPair};

/// The game seen inside one block: each OD pair whose chain crosses the block
/// becomes the pair of terminals it induces there.
#[derive(Clone, Debug)]
pub struct BlockLocalGame {
    pub game: RoutingGame,
    /// Local edge id to edge id in the parent game.
    pub edge_map: Vec<EdgeId>,
    /// Local OD index to OD index in the parent game.
    pub od_map: Vec<usize>,
    /// Per parent type, whether it routes through the block.
    pub crosses: Vec<bool>,
}

/// Types whose chain avoids the block keep their slot with rate 0 and an
/// empty information set.
pub fn block_local_game(
    game: &RoutingGame,
    block: BlockId,
    decomposition: &BlockDecomposition,
) -> Result<BlockLocalGame, SolveError> {
    let g = game.graph();
    let b = decomposition.block(block);
    let mut od_map = Vec::new();
    let mut local_pairs = Vec::new();
    for k in 0..g.od_pairs().len() {
        if let Some(link) = decomposition.link(k, block) {
            od_map.push(k);
            local_pairs.push(OdPair::new(link.entry, link.exit));
        }
    }
    if od_map.is_empty() {
        return Err(SolveError::BlockNotInChain(block));
    }
    let local_graph = g.restrict(&b.edges, &local_pairs);
    let edge_map: Vec<EdgeId> = b.edges.iter().copied().collect();
    let to_local = |e: &EdgeId| edge_map.iter().position(|x| x == e).map(EdgeId);
    let latencies = edge_map.iter().map(|&e| game.latency(e).clone()).collect();
    let mut crosses = Vec::new();
    let types = game
        .types()
        .iter()
        .map(|t| match od_map.iter().position(|&k| k == t.od_index) {
            Some(local_od) => {
                crosses.push(true);
                let info: EdgeSet = t.info_set.iter().filter_map(to_local).collect();
                TravelerType::new(t.rate, local_od, info)
            }
            None => {
                crosses.push(false);
                TravelerType::new(0.0, 0, EdgeSet::new())
            }
        })
        .collect();
    let local = RoutingGame::new(local_graph, latencies, types)
        .expect("restriction keeps the game well-formed");
    Ok(BlockLocalGame {
        game: local,
        edge_map,
        od_map,
        crosses,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesCheck {
    pub global: Vec<f64>,
    /// Per type, the sum of its block-local equilibrium latencies.
    pub block_sums: Vec<f64>,
    pub per_block: Vec<(BlockId, Vec<f64>)>,
    pub max_gap: f64,
    pub holds: bool,
}

/// Compares each type's equilibrium latency in the whole game with the sum of
/// its latencies in the block-local games along its chain.
pub fn check_series_decomposition(
    game: &RoutingGame,
    solver: &dyn EquilibriumSolver,
    options: &SolveOptions,
    tolerance: f64,
) -> Result<SeriesCheck, SolveError> {
    let global: EquilibriumResult = solver.solve(game, options)?;
    let decomposition = decompose_blocks(game.graph());
    let mut block_sums = vec![0.0; game.types().len()];
    let mut per_block = Vec::new();
    for b in &decomposition.blocks {
        let local = match block_local_game(game, b.id, &decomposition) {
            Ok(l) => l,
            Err(SolveError::BlockNotInChain(_)) => continue,
            Err(e) => return Err(e),
        };
        let result = solver.solve(&local.game, options)?;
        for (j, sum) in block_sums.iter_mut().enumerate() {
            if local.crosses[j] {
                *sum += result.type_latencies[j];
            }
        }
        per_block.push((b.id, result.type_latencies));
    }
    let max_gap = global
        .type_latencies
        .iter()
        .zip(&block_sums)
        .zip(game.types())
        .filter(|(_, t)| t.rate > 0.0)
        .map(|((a, b), _)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SeriesCheck {
        global: global.type_latencies,
        block_sums,
        per_block,
        max_gap,
        holds: max_gap <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{ConditionalGradient, LatencyFunction};
    use super::*;
    use crate::fixtures;

    #[test]
    fn chain_with_f1_middle_decomposes() {
        let g = fixtures::chain_with_f1_middle();
        // p1 p2 | e1 e2 e3 e4 | q1 q2
        let lat: Vec<LatencyFunction> = [
            (1.0, 1.0),
            (0.0, 2.0),
            (0.0, 0.0),
            (0.0, 4.0),
            (22.0, 1.0),
            (10.0, 2.0),
            (3.0, 1.0),
            (1.0, 3.0),
        ]
        .iter()
        .map(|&(c, s)| LatencyFunction::affine(c, s).unwrap())
        .collect();
        let names = |n: &[&str]| g.edge_set_by_names(n.iter().copied()).unwrap();
        let game = RoutingGame::new(
            g.clone(),
            lat,
            vec![
                TravelerType::new(3.0, 0, names(&["p1", "p2", "e2", "e3", "e4", "q1", "q2"])),
                TravelerType::new(2.0, 1, names(&["p1", "p2", "e1", "e2", "e4"])),
            ],
        )
        .unwrap();
        let d = decompose_blocks(game.graph());
        assert_eq!(d.blocks.len(), 3);
        let middle = d.block_of_edge(g.edge_by_name("e1").unwrap()).unwrap();
        let local = block_local_game(&game, middle, &d).unwrap();
        assert_eq!(local.od_map, vec![0, 1]);
        assert_eq!(local.game.graph().edge_count(), 4);
        let check =
            check_series_decomposition(&game, &ConditionalGradient, &SolveOptions::default(), 1e-6)
                .unwrap();
        assert!(check.holds, "{check:?}");
    }
}
