//! Simple-path enumeration by depth-first backtracking.
//!
//! Exponential in the worst case; every entry point carries a cap on the number
//! of paths and fails with [`GraphError::PathCapExceeded`] past it.

use crate::graph::{EdgeId, EdgeSet, GraphError, MultiGraph, Path, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathCap(pub usize);

impl Default for PathCap {
    fn default() -> Self {
        PathCap(10_000)
    }
}

/// All simple `s`–`t` paths inside `allowed`, sorted lexicographically by
/// edge-id sequence. `s == t` yields no paths.
pub fn enumerate_simple_paths(
    g: &MultiGraph,
    s: VertexId,
    t: VertexId,
    allowed: &EdgeSet,
) -> Result<Vec<Path>, GraphError> {
    enumerate_simple_paths_capped(g, s, t, allowed, PathCap::default())
}

pub fn enumerate_simple_paths_capped(
    g: &MultiGraph,
    s: VertexId,
    t: VertexId,
    allowed: &EdgeSet,
    cap: PathCap,
) -> Result<Vec<Path>, GraphError> {
    let mut out = Vec::new();
    if s == t {
        return Ok(out);
    }
    let adjacency: Vec<Vec<EdgeId>> = g
        .adjacency()
        .into_iter()
        .map(|list| list.into_iter().filter(|e| allowed.contains(e)).collect())
        .collect();
    let mut on_path = vec![false; g.vertex_count()];
    let mut stack: Path = Vec::new();
    on_path[s.0] = true;
    dfs(g, &adjacency, s, t, &mut on_path, &mut stack, &mut out, cap)?;
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &MultiGraph,
    adjacency: &[Vec<EdgeId>],
    at: VertexId,
    t: VertexId,
    on_path: &mut [bool],
    stack: &mut Path,
    out: &mut Vec<Path>,
    cap: PathCap,
) -> Result<(), GraphError> {
    for &e in &adjacency[at.0] {
        let next = g.edge(e).other(at);
        if on_path[next.0] {
            continue;
        }
        stack.push(e);
        if next == t {
            if out.len() == cap.0 {
                return Err(GraphError::PathCapExceeded(cap.0));
            }
            out.push(stack.clone());
        } else {
            on_path[next.0] = true;
            dfs(g, adjacency, next, t, on_path, stack, out, cap)?;
            on_path[next.0] = false;
        }
        stack.pop();
    }
    Ok(())
}

/// Vertex sequence of a path starting at `s`.
pub fn path_vertices(g: &MultiGraph, s: VertexId, path: &[EdgeId]) -> Vec<VertexId> {
    let mut out = vec![s];
    let mut at = s;
    for &e in path {
        at = g.edge(e).other(at);
        out.push(at);
    }
    out
}

/// Orientation of each edge along the path: `true` when traversed from
/// `ends[0]` to `ends[1]`.
pub fn path_orientations(g: &MultiGraph, s: VertexId, path: &[EdgeId]) -> Vec<(EdgeId, bool)> {
    let mut at = s;
    path.iter()
        .map(|&e| {
            let edge = g.edge(e);
            let forward = edge.ends[0] == at;
            at = edge.other(at);
            (e, forward)
        })
        .collect()
}
