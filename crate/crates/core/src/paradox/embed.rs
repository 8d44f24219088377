use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ParadoxError;
use crate::blocks::decompose_blocks;
use crate::embedding::{apply_embedding_steps, find_terminal_isomorphism, EmbeddingStep};
use crate::fixtures::{f1_graph, F1Variant};
use crate::graph::{is_cycle_graph, EdgeId, EdgeSet, MultiGraph, Path, VertexId};
use crate::paths::{enumerate_simple_paths_capped, PathCap};

/// Steps that reduce a two-OD block to F1 without merging an OD pair.
///
/// The kept subgraph is a cycle `C` plus an ear `P` (a path between two
/// vertices of `C`, internally disjoint from it) that together cover every
/// terminal. Cycles through the first OD pair come first, then cycles missing
/// fewer terminals, then by edge ids; ears are tried in edge-id order. The
/// remaining theta graph is contracted onto three vertices using the
/// lexicographically least admissible set of edges. The resulting graph is
/// checked against both F1 variants before the steps are returned.
pub fn find_f1_embedding(block: &MultiGraph) -> Result<Vec<EmbeddingStep>, ParadoxError> {
    check_preconditions(block)?;
    if is_f1(block) {
        return Ok(Vec::new());
    }
    let terminals: BTreeSet<VertexId> = block
        .od_pairs()
        .iter()
        .flat_map(|od| [od.origin, od.destination])
        .collect();
    let first = block.od_pairs()[0];
    let mut cycles = simple_cycles(block);
    cycles.retain(|c| terminals.difference(&c.vertices).count() <= 1);
    cycles.sort_by_key(|c| {
        let through_first =
            c.vertices.contains(&first.origin) && c.vertices.contains(&first.destination);
        (
            !through_first,
            terminals.difference(&c.vertices).count(),
            c.sorted_edges(),
        )
    });
    for cycle in &cycles {
        for ear in ears(block, cycle) {
            let mut kept: EdgeSet = cycle.edges.iter().copied().collect();
            kept.extend(ear.iter().copied());
            if !terminals.is_subset(&block.vertices_of(&kept)) {
                continue;
            }
            if let Some(steps) = reduce_theta(block, &kept, &terminals) {
                return Ok(steps);
            }
        }
    }
    Err(ParadoxError::PreconditionViolated(
        "no cycle-plus-ear subgraph reduces to F1".into(),
    ))
}

fn check_preconditions(block: &MultiGraph) -> Result<(), ParadoxError> {
    let violated = |msg: &str| Err(ParadoxError::PreconditionViolated(msg.into()));
    if block.od_pairs().len() != 2 {
        return violated("exactly two OD pairs are required");
    }
    let (a, b) = (block.od_pairs()[0], block.od_pairs()[1]);
    if a.origin == a.destination || b.origin == b.destination {
        return violated("an OD pair has equal endpoints");
    }
    if block.edges().iter().any(|e| e.is_loop()) {
        return violated("the block has a loop");
    }
    let d = decompose_blocks(block);
    if d.blocks.len() != 1 || block.vertices_of(&block.all_edges()).len() != block.vertex_count() {
        return violated("the graph is not 2-connected");
    }
    if is_cycle_graph(block) {
        return Err(ParadoxError::IsCycle);
    }
    if a.unordered() == b.unordered() {
        return violated("the terminal sets coincide");
    }
    Ok(())
}

fn is_f1(g: &MultiGraph) -> bool {
    F1Variant::ALL
        .iter()
        .any(|&v| find_terminal_isomorphism(g, &f1_graph(v)).is_some())
}

struct Cycle {
    edges: Path,
    vertices: BTreeSet<VertexId>,
}

impl Cycle {
    fn sorted_edges(&self) -> Vec<EdgeId> {
        let mut e = self.edges.clone();
        e.sort();
        e
    }
}

/// Every simple cycle once, found from its smallest edge.
fn simple_cycles(g: &MultiGraph) -> Vec<Cycle> {
    let mut out = Vec::new();
    for e in g.edge_ids() {
        let [a, b] = g.edge(e).ends;
        let later: EdgeSet = g.edge_ids().filter(|&f| f > e).collect();
        let Ok(paths) = enumerate_simple_paths_capped(g, b, a, &later, PathCap::default()) else {
            continue;
        };
        for p in paths {
            let mut edges = vec![e];
            edges.extend(p);
            let set: EdgeSet = edges.iter().copied().collect();
            out.push(Cycle {
                vertices: g.vertices_of(&set),
                edges,
            });
        }
    }
    out
}

/// Paths between two distinct cycle vertices whose edges avoid the cycle and
/// whose interior avoids its vertices, in edge-id order.
fn ears(g: &MultiGraph, cycle: &Cycle) -> Vec<Path> {
    let on_cycle: BTreeSet<EdgeId> = cycle.edges.iter().copied().collect();
    let mut out = Vec::new();
    let verts: Vec<VertexId> = cycle.vertices.iter().copied().collect();
    for (i, &x) in verts.iter().enumerate() {
        for &y in &verts[i + 1..] {
            let allowed: EdgeSet = g
                .edge_ids()
                .filter(|e| !on_cycle.contains(e))
                .filter(|&e| {
                    g.edge(e)
                        .ends
                        .iter()
                        .all(|v| *v == x || *v == y || !cycle.vertices.contains(v))
                })
                .collect();
            if let Ok(paths) = enumerate_simple_paths_capped(g, x, y, &allowed, PathCap::default())
            {
                out.extend(paths);
            }
        }
    }
    out.sort();
    out
}

/// Deletes everything outside `kept`, then contracts a forest of `kept` so
/// that three vertices remain, each holding a terminal and no OD pair split
/// across a single vertex.
fn reduce_theta(
    g: &MultiGraph,
    kept: &EdgeSet,
    terminals: &BTreeSet<VertexId>,
) -> Option<Vec<EmbeddingStep>> {
    let vertices: Vec<VertexId> = g.vertices_of(kept).into_iter().collect();
    let edges: Vec<EdgeId> = kept.iter().copied().collect();
    if edges.len() != vertices.len() + 1 || vertices.len() < 3 {
        return None;
    }
    let deletions: Vec<EmbeddingStep> = g
        .edge_ids()
        .filter(|e| !kept.contains(e))
        .map(|e| EmbeddingStep::delete(g.edge_name(e)))
        .collect();
    let need = vertices.len() - 3;
    for chosen in combinations(edges.len(), need) {
        let forest: Vec<EdgeId> = chosen.iter().map(|&i| edges[i]).collect();
        let Some(parts) = partition(g, &vertices, &forest) else {
            continue;
        };
        if !admissible(g, kept, &forest, &parts, terminals) {
            continue;
        }
        let mut steps = deletions.clone();
        steps.extend(contraction_order(g, &forest, &parts, terminals));
        let reduced = apply_embedding_steps(g, &steps).ok()?;
        if is_f1(&reduced) {
            return Some(steps);
        }
    }
    None
}

/// Index combinations of size `k` from `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Component root per vertex under the forest, or `None` if it has a cycle.
fn partition(
    g: &MultiGraph,
    vertices: &[VertexId],
    forest: &[EdgeId],
) -> Option<BTreeMap<VertexId, VertexId>> {
    let mut parent: BTreeMap<VertexId, VertexId> = vertices.iter().map(|&v| (v, v)).collect();
    fn find(p: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
        let up = p[&v];
        if up == v {
            return v;
        }
        let r = find(p, up);
        p.insert(v, r);
        r
    }
    for &e in forest {
        let [a, b] = g.edge(e).ends;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return None;
        }
        parent.insert(ra.max(rb), ra.min(rb));
    }
    Some(
        vertices
            .iter()
            .map(|&v| (v, find(&mut parent, v)))
            .collect(),
    )
}

fn admissible(
    g: &MultiGraph,
    kept: &EdgeSet,
    forest: &[EdgeId],
    parts: &BTreeMap<VertexId, VertexId>,
    terminals: &BTreeSet<VertexId>,
) -> bool {
    let split_pairs = g
        .od_pairs()
        .iter()
        .all(|od| parts[&od.origin] != parts[&od.destination]);
    let roots: BTreeSet<VertexId> = parts.values().copied().collect();
    let each_has_terminal = roots
        .iter()
        .all(|r| terminals.iter().any(|t| parts[t] == *r));
    let no_loops = kept.iter().filter(|e| !forest.contains(e)).all(|&e| {
        let [a, b] = g.edge(e).ends;
        parts[&a] != parts[&b]
    });
    split_pairs && each_has_terminal && no_loops
}

/// Contractions grown outward from each part's representative (its first
/// terminal), so the merged vertex always keeps the representative's name.
fn contraction_order(
    g: &MultiGraph,
    forest: &[EdgeId],
    parts: &BTreeMap<VertexId, VertexId>,
    terminals: &BTreeSet<VertexId>,
) -> Vec<EmbeddingStep> {
    let mut steps = Vec::new();
    let roots: BTreeSet<VertexId> = parts.values().copied().collect();
    for root in roots {
        let rep = terminals
            .iter()
            .copied()
            .find(|t| parts[t] == root)
            .expect("every part holds a terminal");
        let name = g.vertex_name(rep).to_string();
        let mut reached = BTreeSet::from([rep]);
        let mut queue = VecDeque::from([rep]);
        while let Some(v) = queue.pop_front() {
            for &e in forest {
                let edge = g.edge(e);
                if edge.touches(v) && !reached.contains(&edge.other(v)) {
                    reached.insert(edge.other(v));
                    queue.push_back(edge.other(v));
                    steps.push(EmbeddingStep::contract(g.edge_name(e), name.clone()));
                }
            }
        }
    }
    steps
}
