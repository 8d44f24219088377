use std::collections::BTreeMap;

use super::{check_single_od, TopologyError};
use crate::blocks::{decompose_within, ChainLink};
use crate::graph::{EdgeId, EdgeSet, MultiGraph, Path, Subnetwork, VertexId};
use crate::paths::PathCap;

/// Direct test: every OD path owns an edge no other OD path uses. On failure
/// returns the first path without a private edge.
pub fn is_linearly_independent(
    net: &Subnetwork<'_>,
    cap: PathCap,
) -> Result<(bool, Option<Path>), TopologyError> {
    check_single_od(net)?;
    let paths = net.paths(cap)?;
    Ok(match path_without_private_edge(&paths) {
        Some(p) => (false, Some(p)),
        None => (true, None),
    })
}

pub(crate) fn path_without_private_edge(paths: &[Path]) -> Option<Path> {
    let mut uses: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for p in paths {
        for &e in p {
            *uses.entry(e).or_default() += 1;
        }
    }
    paths
        .iter()
        .find(|p| !p.iter().any(|e| uses[e] == 1))
        .cloned()
}

/// Recursive recognizer: a single edge, a parallel connection of LI networks,
/// or a single edge in series with an LI network.
pub fn is_li_recursive(net: &Subnetwork<'_>) -> Result<bool, TopologyError> {
    check_single_od(net)?;
    Ok(li_rec(
        net.parent,
        &net.edges,
        net.terminals.0,
        net.terminals.1,
    ))
}

pub(crate) fn li_rec(g: &MultiGraph, edges: &EdgeSet, s: VertexId, t: VertexId) -> bool {
    if edges.len() == 1 {
        let e = g.edge(*edges.iter().next().expect("one edge"));
        return (e.ends[0] == s && e.ends[1] == t) || (e.ends[0] == t && e.ends[1] == s);
    }
    let parts = parallel_parts(g, edges, s, t);
    if parts.len() >= 2 {
        return parts.iter().all(|p| li_rec(g, p, s, t));
    }
    let Some(chain) = series_parts(g, edges, s, t) else {
        return false;
    };
    if chain.len() < 2 {
        return false;
    }
    let mut heavy = chain.iter().filter(|(edges, _)| edges.len() > 1);
    match (heavy.next(), heavy.next()) {
        (None, _) => true,
        (Some((edges, link)), None) => li_rec(g, edges, link.entry, link.exit),
        _ => false,
    }
}

/// Edge groups that stay connected once `s` and `t` are removed; every
/// `s`–`t` edge forms its own group.
pub(crate) fn parallel_parts(
    g: &MultiGraph,
    edges: &EdgeSet,
    s: VertexId,
    t: VertexId,
) -> Vec<EdgeSet> {
    let inner = |v: VertexId| v != s && v != t;
    let mut restricted = EdgeSet::new();
    let mut direct = Vec::new();
    for &e in edges {
        let [a, b] = g.edge(e).ends;
        if inner(a) || inner(b) {
            restricted.insert(e);
        } else {
            direct.push(EdgeSet::from([e]));
        }
    }
    // components over inner vertices only
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    fn find(p: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
        let up = *p.entry(v).or_insert(v);
        if up == v {
            v
        } else {
            let r = find(p, up);
            p.insert(v, r);
            r
        }
    }
    for &e in &restricted {
        let [a, b] = g.edge(e).ends;
        if inner(a) && inner(b) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent.insert(ra.max(rb), ra.min(rb));
            }
        }
    }
    let mut groups: BTreeMap<VertexId, EdgeSet> = BTreeMap::new();
    for &e in &restricted {
        let [a, b] = g.edge(e).ends;
        let anchor = if inner(a) { a } else { b };
        let root = find(&mut parent, anchor);
        groups.entry(root).or_default().insert(e);
    }
    let mut out: Vec<EdgeSet> = groups.into_values().chain(direct).collect();
    out.sort_by_key(|set| *set.iter().next().expect("nonempty"));
    out
}

/// Blocks along the `s`–`t` chain with their induced terminals, or `None`
/// when some edge lies off the chain.
pub(crate) fn series_parts(
    g: &MultiGraph,
    edges: &EdgeSet,
    s: VertexId,
    t: VertexId,
) -> Option<Vec<(EdgeSet, ChainLink)>> {
    let d = decompose_within(g, edges);
    let chain = d.chain_between(s, t)?;
    let parts: Vec<(EdgeSet, ChainLink)> = chain
        .into_iter()
        .map(|l| (d.blocks[l.block.0].edges.clone(), l))
        .collect();
    let covered: usize = parts.iter().map(|(e, _)| e.len()).sum();
    (covered == edges.len()).then_some(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::od_subnetwork;

    fn both(g: &MultiGraph) -> (bool, bool) {
        let net = od_subnetwork(g, 0).unwrap();
        (
            is_linearly_independent(&net, PathCap::default()).unwrap().0,
            is_li_recursive(&net).unwrap(),
        )
    }

    #[test]
    fn parallel_pair_is_li() {
        assert_eq!(both(&fixtures::pigou()), (true, true));
    }

    #[test]
    fn series_of_parallel_pairs_is_not_li() {
        let g = fixtures::series_of_parallel_pairs();
        let net = od_subnetwork(&g, 0).unwrap();
        assert_eq!(net.paths(PathCap::default()).unwrap().len(), 4);
        let (ok, witness) = is_linearly_independent(&net, PathCap::default()).unwrap();
        assert!(!ok);
        assert_eq!(g.path_names(&witness.unwrap()), vec!["a", "c"]);
        assert!(!is_li_recursive(&net).unwrap());
    }

    #[test]
    fn edge_in_series_with_parallel_pair_is_li() {
        let g = MultiGraph::builder()
            .edge("x", "o", "m")
            .edge("a", "m", "d")
            .edge("b", "m", "d")
            .od("o", "d")
            .build()
            .unwrap();
        assert_eq!(both(&g), (true, true));
    }

    #[test]
    fn wheatstone_is_not_li() {
        assert_eq!(both(&fixtures::wheatstone()), (false, false));
    }

    #[test]
    fn f1_pairs_are_li() {
        let g = fixtures::f1_graph(fixtures::F1Variant::Origin2AtOrigin1);
        for i in 0..2 {
            let net = od_subnetwork(&g, i).unwrap();
            assert!(is_linearly_independent(&net, PathCap::default()).unwrap().0);
            assert!(is_li_recursive(&net).unwrap());
        }
    }
}
