use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_single_od, TopologyError};
use crate::graph::{EdgeId, Path, Subnetwork};
use crate::paths::{path_orientations, PathCap};

/// An edge traversed in opposite directions by two OD paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OppositeTraversal {
    pub edge: EdgeId,
    pub first: Path,
    pub second: Path,
}

/// Series-parallel test by iterated series/parallel reduction. On failure the
/// witness is searched by path enumeration, and is `None` if that exceeds the
/// default path cap.
pub fn is_series_parallel(
    net: &Subnetwork<'_>,
) -> Result<(bool, Option<OppositeTraversal>), TopologyError> {
    check_single_od(net)?;
    if reduces_to_single_edge(net) {
        return Ok((true, None));
    }
    let witness = opposite_traversal(net, PathCap::default()).ok().flatten();
    Ok((false, witness))
}

pub(crate) fn reduces_to_single_edge(net: &Subnetwork<'_>) -> bool {
    let g = net.parent;
    let (s, t) = (net.terminals.0 .0, net.terminals.1 .0);
    let mut edges: Vec<Option<(usize, usize)>> = net
        .edges
        .iter()
        .map(|&e| {
            let [a, b] = g.edge(e).ends;
            Some((a.0.min(b.0), a.0.max(b.0)))
        })
        .collect();
    loop {
        let mut changed = false;
        // parallel
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, slot) in edges.iter_mut().enumerate() {
            if let Some(pair) = *slot {
                if seen.insert(pair, i).is_some() {
                    *slot = None;
                    changed = true;
                }
            }
        }
        // series
        let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if let Some((a, b)) = *e {
                incident.entry(a).or_default().push(i);
                incident.entry(b).or_default().push(i);
            }
        }
        for (&v, list) in &incident {
            if v == s || v == t || list.len() != 2 {
                continue;
            }
            let (i, j) = (list[0], list[1]);
            let (Some(x), Some(y)) = (edges[i], edges[j]) else {
                continue;
            };
            let a = if x.0 == v { x.1 } else { x.0 };
            let b = if y.0 == v { y.1 } else { y.0 };
            if a == b {
                continue;
            }
            edges[i] = Some((a.min(b), a.max(b)));
            edges[j] = None;
            changed = true;
            break;
        }
        if !changed {
            break;
        }
    }
    let alive: Vec<(usize, usize)> = edges.into_iter().flatten().collect();
    alive.len() == 1 && alive[0] == (s.min(t), s.max(t))
}

/// Literal check: two OD paths crossing one edge in opposite directions.
/// Returns the lexicographically first such witness, or `None` when the
/// network is series-parallel.
pub fn opposite_traversal(
    net: &Subnetwork<'_>,
    cap: PathCap,
) -> Result<Option<OppositeTraversal>, TopologyError> {
    let paths = net.paths(cap)?;
    let mut first_seen: BTreeMap<(EdgeId, bool), usize> = BTreeMap::new();
    let oriented: Vec<Vec<(EdgeId, bool)>> = paths
        .iter()
        .map(|p| path_orientations(net.parent, net.terminals.0, p))
        .collect();
    for (i, path) in oriented.iter().enumerate() {
        for &(e, dir) in path {
            first_seen.entry((e, dir)).or_insert(i);
        }
    }
    for (i, path) in oriented.iter().enumerate() {
        for &(e, dir) in path {
            if let Some(&j) = first_seen.get(&(e, !dir)) {
                let (a, b) = (i.min(j), i.max(j));
                return Ok(Some(OppositeTraversal {
                    edge: e,
                    first: paths[a].clone(),
                    second: paths[b].clone(),
                }));
            }
        }
    }
    Ok(None)
}
