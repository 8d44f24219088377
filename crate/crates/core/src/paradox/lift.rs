use std::collections::BTreeSet;

use super::{IbpInstance, ParadoxError};
use crate::blocks::{decompose_blocks, BlockId};
use crate::embedding::{apply_embedding_steps, find_terminal_isomorphism, EmbeddingStep, StepKind};
use crate::equilibrium::{LatencyFunction, RoutingGame, TravelerType};
use crate::graph::{EdgeId, EdgeSet, GraphError, MultiGraph, OdPair};

/// Transports `source` onto `target`, where `steps` reduce `target` to a
/// graph isomorphic to the source graph. Deleted edges join no information
/// set; contracted edges get latency zero and join every information set.
pub fn lift_instance(
    target: &MultiGraph,
    steps: &[EmbeddingStep],
    source: &IbpInstance,
) -> Result<IbpInstance, ParadoxError> {
    if steps.is_empty() && target == source.game.graph() {
        return Ok(source.clone());
    }
    let reduced = apply_embedding_steps(target, steps).map_err(|e| match e {
        GraphError::TerminalMergeForbidden { edge, od_index } => {
            ParadoxError::TerminalMergeForbidden { edge, od_index }
        }
        other => ParadoxError::Graph(other),
    })?;
    let iso = find_terminal_isomorphism(&reduced, source.game.graph())
        .ok_or(ParadoxError::StepsDoNotReproduceSource)?;

    let contracted: BTreeSet<&str> = steps
        .iter()
        .filter(|s| s.kind == StepKind::Contract)
        .map(|s| s.edge.as_str())
        .collect();
    // target edge -> source edge, for edges surviving the reduction
    let image: Vec<Option<EdgeId>> = target
        .edges()
        .iter()
        .map(|e| reduced.edge_by_name(&e.name).map(|r| iso.edge_map[r.0]))
        .collect();
    let contracted_set: EdgeSet = target
        .edge_ids()
        .filter(|&e| contracted.contains(target.edge_name(e)))
        .collect();
    let pull_back = |set: &EdgeSet| -> EdgeSet {
        target
            .edge_ids()
            .filter(|e| image[e.0].is_some_and(|s| set.contains(&s)))
            .collect()
    };

    let latencies = image
        .iter()
        .map(|img| img.map_or_else(LatencyFunction::zero, |s| source.game.latency(s).clone()))
        .collect();
    let types = source
        .game
        .types()
        .iter()
        .map(|t| {
            let od_index = iso
                .od_map
                .iter()
                .position(|&s| s == t.od_index)
                .expect("isomorphism is a bijection on OD pairs");
            let mut info = pull_back(&t.info_set);
            info.extend(contracted_set.iter().copied());
            TravelerType::new(t.rate, od_index, info)
        })
        .collect();
    let game = RoutingGame::new(target.clone(), latencies, types)?;
    IbpInstance::new(game, pull_back(&source.extension.added_edges))
}

/// Lifts an instance on one block of `g` to all of `g`. The block-local
/// graph must be `g` restricted to the block, with local OD `k` induced by
/// global OD `ods[k]`. Edges off the block get latency zero and every type
/// knows the other blocks of its chain.
pub fn lift_block_to_whole(
    g: &MultiGraph,
    block: BlockId,
    ods: &[usize],
    local: &IbpInstance,
) -> Result<IbpInstance, ParadoxError> {
    let d = decompose_blocks(g);
    let block_edges = &d.block(block).edges;
    let mut pairs = Vec::with_capacity(ods.len());
    for &k in ods {
        let link = d.link(k, block).ok_or_else(|| {
            ParadoxError::PreconditionViolated(format!(
                "OD pair {k} does not cross block {}",
                block.0
            ))
        })?;
        pairs.push(OdPair::new(link.entry, link.exit));
    }
    let expected = g.restrict(block_edges, &pairs);
    if local.game.graph() != &expected {
        return Err(ParadoxError::PreconditionViolated(
            "local instance is not posed on the block restriction".into(),
        ));
    }
    let to_global: Vec<EdgeId> = block_edges.iter().copied().collect();
    let map = |set: &EdgeSet| -> EdgeSet { set.iter().map(|e| to_global[e.0]).collect() };

    let mut latencies = vec![LatencyFunction::zero(); g.edge_count()];
    for (local_id, &e) in to_global.iter().enumerate() {
        latencies[e.0] = local.game.latencies()[local_id].clone();
    }
    let types = local
        .game
        .types()
        .iter()
        .map(|t| {
            let od = ods[t.od_index];
            let mut info = map(&t.info_set);
            for link in d.chains[od].as_deref().unwrap_or_default() {
                if link.block != block {
                    info.extend(d.block(link.block).edges.iter().copied());
                }
            }
            TravelerType::new(t.rate, od, info)
        })
        .collect();
    let game = RoutingGame::new(g.clone(), latencies, types)?;
    IbpInstance::new(game, map(&local.extension.added_edges))
}

#[cfg(test)]
mod tests {
    use super::super::{confirm, f1_instance};
    use super::*;
    use crate::fixtures::{self, F1Variant};

    /// F1 with `e1` subdivided into `e1` and `s1` through a new vertex `m`.
    fn subdivided_f1() -> MultiGraph {
        MultiGraph::builder()
            .edge("e1", "u", "m")
            .edge("s1", "m", "v")
            .edge("e2", "u", "w")
            .edge("e3", "w", "v")
            .edge("e4", "w", "v")
            .od("u", "v")
            .od("u", "w")
            .build()
            .unwrap()
    }

    #[test]
    fn zero_steps_is_identity() {
        let src = f1_instance(F1Variant::Origin2AtOrigin1);
        assert_eq!(lift_instance(src.game.graph(), &[], &src).unwrap(), src);
    }

    #[test]
    fn subdivision_lift_keeps_margin() {
        let src = f1_instance(F1Variant::Origin2AtOrigin1);
        let target = subdivided_f1();
        let lifted = lift_instance(&target, &[EmbeddingStep::contract("s1", "v")], &src).unwrap();
        let s1 = target.edge_by_name("s1").unwrap();
        assert!(lifted.game.types().iter().all(|t| t.info_set.contains(&s1)));
        assert_eq!(lifted.game.latency(s1), &LatencyFunction::zero());
        let v = confirm(&lifted).unwrap();
        assert!((v.margin - 1.0).abs() < 1e-6);
    }

    #[test]
    fn chord_lift_keeps_margin() {
        let src = f1_instance(F1Variant::Origin2AtDestination1);
        let g0 = src.game.graph();
        let target = MultiGraph::builder()
            .edge("e1", "u", "v")
            .edge("e2", "u", "w")
            .edge("e3", "w", "v")
            .edge("e4", "w", "v")
            .edge("x", "u", "v")
            .od("u", "v")
            .od(
                g0.vertex_name(g0.od_pairs()[1].origin),
                g0.vertex_name(g0.od_pairs()[1].destination),
            )
            .build()
            .unwrap();
        let lifted = lift_instance(&target, &[EmbeddingStep::delete("x")], &src).unwrap();
        let x = target.edge_by_name("x").unwrap();
        assert!(lifted.game.types().iter().all(|t| !t.info_set.contains(&x)));
        assert!((confirm(&lifted).unwrap().margin - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wrong_steps_rejected() {
        let src = f1_instance(F1Variant::Origin2AtOrigin1);
        let target = subdivided_f1();
        assert_eq!(
            lift_instance(&target, &[], &src),
            Err(ParadoxError::StepsDoNotReproduceSource)
        );
        assert!(matches!(
            lift_instance(
                &target,
                &[
                    EmbeddingStep::contract("e1", "u"),
                    EmbeddingStep::contract("s1", "u")
                ],
                &src
            ),
            Err(ParadoxError::TerminalMergeForbidden { .. })
        ));
    }

    #[test]
    fn block_to_whole_on_chain() {
        let g = fixtures::chain_with_f1_middle();
        let d = decompose_blocks(&g);
        let block = d.block_of_edge(g.edge_by_name("e1").unwrap()).unwrap();
        let pairs: Vec<OdPair> = [0, 1]
            .iter()
            .map(|&k| {
                let l = d.link(k, block).unwrap();
                OdPair::new(l.entry, l.exit)
            })
            .collect();
        let local_graph = g.restrict(&d.block(block).edges, &pairs);
        let local =
            lift_instance(&local_graph, &[], &f1_instance(F1Variant::Origin2AtOrigin1)).unwrap();
        let whole = lift_block_to_whole(&g, block, &[0, 1], &local).unwrap();
        let p1 = g.edge_by_name("p1").unwrap();
        assert_eq!(whole.game.latency(p1), &LatencyFunction::zero());
        assert!(whole.game.types()[0].info_set.contains(&p1));
        assert!((confirm(&whole).unwrap().margin - 1.0).abs() < 1e-6);
    }
}
