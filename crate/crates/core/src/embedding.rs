//! Terminal-preserving edge deletion and contraction, and isomorphism of
//! terminal-marked multigraphs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{EdgeId, GraphError, MultiGraph, OdPair, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Delete,
    Contract,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingStep {
    pub kind: StepKind,
    /// Edge name; names survive re-indexing across steps.
    pub edge: String,
    pub merged_vertex_name: Option<String>,
}

impl EmbeddingStep {
    pub fn delete(edge: impl Into<String>) -> Self {
        Self {
            kind: StepKind::Delete,
            edge: edge.into(),
            merged_vertex_name: None,
        }
    }

    pub fn contract(edge: impl Into<String>, merged: impl Into<String>) -> Self {
        Self {
            kind: StepKind::Contract,
            edge: edge.into(),
            merged_vertex_name: Some(merged.into()),
        }
    }
}

impl std::fmt::Display for EmbeddingStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (&self.kind, &self.merged_vertex_name) {
            (StepKind::Contract, Some(v)) => write!(f, "contract {} into {v}", self.edge),
            (StepKind::Contract, None) => write!(f, "contract {}", self.edge),
            (StepKind::Delete, _) => write!(f, "delete {}", self.edge),
        }
    }
}

/// Applies one step. Deleting an edge also drops endpoints left isolated
/// unless they are terminals. Contraction refuses to merge the two terminals
/// of an OD pair or to turn a parallel edge into a loop.
pub fn apply_embedding_step(
    g: &MultiGraph,
    step: &EmbeddingStep,
) -> Result<MultiGraph, GraphError> {
    let target = g
        .edge_by_name(&step.edge)
        .ok_or_else(|| GraphError::EdgeNotFound(step.edge.clone()))?;
    let [a, b] = g.edge(target).ends;
    let is_terminal = |v: VertexId| g.od_pairs().iter().any(|od| od.contains(v));
    let name = |v: VertexId| g.vertex_name(v).to_string();
    let od_names = |rename: &dyn Fn(VertexId) -> String| -> Vec<(String, String)> {
        g.od_pairs()
            .iter()
            .map(|od| (rename(od.origin), rename(od.destination)))
            .collect()
    };

    match step.kind {
        StepKind::Delete => {
            let remaining: Vec<EdgeId> = g.edge_ids().filter(|&e| e != target).collect();
            let orphaned =
                |v: VertexId| !is_terminal(v) && !remaining.iter().any(|&e| g.edge(e).touches(v));
            let vertices = g
                .vertices()
                .filter(|&v| !((v == a || v == b) && orphaned(v)))
                .map(name)
                .collect();
            let edges = remaining
                .iter()
                .map(|&e| {
                    let ed = g.edge(e);
                    (ed.name.clone(), name(ed.ends[0]), name(ed.ends[1]))
                })
                .collect();
            MultiGraph::new(vertices, edges, od_names(&name))
        }
        StepKind::Contract => {
            let merged = step
                .merged_vertex_name
                .clone()
                .ok_or_else(|| GraphError::MissingMergedName(step.edge.clone()))?;
            for (i, od) in g.od_pairs().iter().enumerate() {
                if od.unordered() == (a.min(b), a.max(b)) {
                    return Err(GraphError::TerminalMergeForbidden {
                        edge: step.edge.clone(),
                        od_index: i,
                    });
                }
            }
            if let Some(p) = g.edge_ids().find(|&e| {
                e != target && {
                    let ends = g.edge(e).ends;
                    (ends[0] == a && ends[1] == b) || (ends[0] == b && ends[1] == a)
                }
            }) {
                return Err(GraphError::LoopWouldForm {
                    edge: step.edge.clone(),
                    parallel: g.edge_name(p).to_string(),
                });
            }
            if let Some(clash) = g.vertex_by_name(&merged) {
                if clash != a && clash != b {
                    return Err(GraphError::MergedNameTaken(merged));
                }
            }
            let rename = |v: VertexId| {
                if v == a || v == b {
                    merged.clone()
                } else {
                    name(v)
                }
            };
            let vertices = g
                .vertices()
                .filter(|&v| v != a.max(b))
                .map(&rename)
                .collect();
            let edges = g
                .edge_ids()
                .filter(|&e| e != target)
                .map(|e| {
                    let ed = g.edge(e);
                    (ed.name.clone(), rename(ed.ends[0]), rename(ed.ends[1]))
                })
                .collect();
            MultiGraph::new(vertices, edges, od_names(&rename))
        }
    }
}

pub fn apply_embedding_steps(
    g: &MultiGraph,
    steps: &[EmbeddingStep],
) -> Result<MultiGraph, GraphError> {
    steps
        .iter()
        .try_fold(g.clone(), |acc, step| apply_embedding_step(&acc, step))
}

/// Isomorphism between terminal-marked multigraphs. OD pairs may be permuted
/// and reoriented; each pair maps onto a pair with the same terminal set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminalIsomorphism {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
    pub od_map: Vec<usize>,
}

pub fn find_terminal_isomorphism(
    from: &MultiGraph,
    to: &MultiGraph,
) -> Option<TerminalIsomorphism> {
    if from.vertex_count() != to.vertex_count()
        || from.edge_count() != to.edge_count()
        || from.od_pairs().len() != to.od_pairs().len()
    {
        return None;
    }
    let multiplicities = |g: &MultiGraph| {
        let mut m: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
        for e in g.edge_ids() {
            let [x, y] = g.edge(e).ends;
            m.entry((x.min(y), x.max(y))).or_default().push(e);
        }
        m
    };
    let from_mult = multiplicities(from);
    let to_mult = multiplicities(to);
    let degree = |g: &MultiGraph, v: VertexId| g.edges().iter().filter(|e| e.touches(v)).count();
    let from_deg: Vec<usize> = from.vertices().map(|v| degree(from, v)).collect();
    let to_deg: Vec<usize> = to.vertices().map(|v| degree(to, v)).collect();

    let n = from.vertex_count();
    let mut assignment: Vec<Option<VertexId>> = vec![None; n];
    let mut used = vec![false; n];
    let mut result = None;
    search(
        0,
        &mut assignment,
        &mut used,
        &mut |assignment: &[Option<VertexId>]| {
            let map: Vec<VertexId> = assignment.iter().map(|v| v.expect("complete")).collect();
            let mapped_pair = |x: VertexId, y: VertexId| {
                let (p, q) = (map[x.0], map[y.0]);
                (p.min(q), p.max(q))
            };
            // edge multiplicities
            for ((x, y), edges) in &from_mult {
                if to_mult.get(&mapped_pair(*x, *y)).map(Vec::len) != Some(edges.len()) {
                    return false;
                }
            }
            let od_map = match match_od_pairs(from.od_pairs(), to.od_pairs(), &map) {
                Some(m) => m,
                None => return false,
            };
            let mut edge_map = vec![EdgeId(0); from.edge_count()];
            for ((x, y), edges) in &from_mult {
                for (src, dst) in edges.iter().zip(&to_mult[&mapped_pair(*x, *y)]) {
                    edge_map[src.0] = *dst;
                }
            }
            result = Some(TerminalIsomorphism {
                vertex_map: map,
                edge_map,
                od_map,
            });
            true
        },
        &|v: usize, w: usize, partial: &[Option<VertexId>]| {
            if from_deg[v] != to_deg[w] {
                return false;
            }
            // multiplicity with already-assigned vertices
            (0..v).all(|u| {
                let img = partial[u].expect("assigned in order");
                let key_from = (VertexId(u.min(v)), VertexId(u.max(v)));
                let key_to = (img.min(VertexId(w)), img.max(VertexId(w)));
                from_mult.get(&key_from).map_or(0, Vec::len)
                    == to_mult.get(&key_to).map_or(0, Vec::len)
            })
        },
    );
    result
}

/// Whether vertex `v` may map to candidate `c` given the partial assignment.
type Compatibility<'a> = dyn Fn(usize, usize, &[Option<VertexId>]) -> bool + 'a;

fn search(
    v: usize,
    assignment: &mut Vec<Option<VertexId>>,
    used: &mut Vec<bool>,
    accept: &mut dyn FnMut(&[Option<VertexId>]) -> bool,
    compatible: &Compatibility<'_>,
) -> bool {
    if v == assignment.len() {
        return accept(assignment);
    }
    for w in 0..used.len() {
        if used[w] || !compatible(v, w, assignment) {
            continue;
        }
        used[w] = true;
        assignment[v] = Some(VertexId(w));
        if search(v + 1, assignment, used, accept, compatible) {
            return true;
        }
        assignment[v] = None;
        used[w] = false;
    }
    false
}

fn match_od_pairs(from: &[OdPair], to: &[OdPair], map: &[VertexId]) -> Option<Vec<usize>> {
    let mut taken = vec![false; to.len()];
    let mut out = Vec::with_capacity(from.len());
    for od in from {
        let image = OdPair::new(map[od.origin.0], map[od.destination.0]).unordered();
        let k = (0..to.len()).find(|&k| !taken[k] && to[k].unordered() == image)?;
        taken[k] = true;
        out.push(k);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, F1Variant};

    #[test]
    fn contracting_a_triangle_edge_leaves_a_digon() {
        let g = fixtures::cycle(3, &[]);
        let h = apply_embedding_step(&g, &EmbeddingStep::contract("k0", "m")).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 2);
        assert!(crate::graph::is_cycle_graph(&h));
    }

    #[test]
    fn deleting_e1_from_f1() {
        let g = fixtures::f1_graph(F1Variant::Origin2AtOrigin1);
        let h = apply_embedding_step(&g, &EmbeddingStep::delete("e1")).unwrap();
        assert_eq!(h.edge_count(), 3);
        assert_eq!(h.vertex_count(), 3);
        assert!(h.edge_by_name("e1").is_none());
    }

    #[test]
    fn merging_od_terminals_is_forbidden() {
        let g = fixtures::f1_graph(F1Variant::Origin2AtOrigin1);
        assert_eq!(
            apply_embedding_step(&g, &EmbeddingStep::contract("e1", "z")),
            Err(GraphError::TerminalMergeForbidden {
                edge: "e1".into(),
                od_index: 0
            })
        );
    }

    #[test]
    fn step_errors() {
        let g = fixtures::f1_graph(F1Variant::Origin2AtOrigin1);
        assert_eq!(
            apply_embedding_step(&g, &EmbeddingStep::delete("zz")),
            Err(GraphError::EdgeNotFound("zz".into()))
        );
        // e3 has parallel e4
        let g = fixtures::cycle(4, &[(0, 2)]);
        let g = MultiGraph::new(
            g.vertex_names().to_vec(),
            g.edges()
                .iter()
                .map(|e| {
                    (
                        e.name.clone(),
                        g.vertex_name(e.ends[0]).into(),
                        g.vertex_name(e.ends[1]).into(),
                    )
                })
                .chain([("x".to_string(), "c0".to_string(), "c1".to_string())])
                .collect(),
            vec![("c0".into(), "c2".into())],
        )
        .unwrap();
        assert!(matches!(
            apply_embedding_step(&g, &EmbeddingStep::contract("k0", "m")),
            Err(GraphError::LoopWouldForm { .. })
        ));
        assert_eq!(
            apply_embedding_step(&g, &EmbeddingStep::contract("k1", "c3")),
            Err(GraphError::MergedNameTaken("c3".into()))
        );
    }

    #[test]
    fn contraction_rehomes_terminals() {
        // path s - m - t plus a parallel route; contract s-m
        let g = MultiGraph::builder()
            .edge("a", "s", "m")
            .edge("b", "m", "t")
            .edge("c", "s", "t")
            .od("s", "t")
            .build()
            .unwrap();
        let h = apply_embedding_step(&g, &EmbeddingStep::contract("a", "s")).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.vertex_name(h.od_pairs()[0].origin), "s");
    }

    #[test]
    fn isomorphism_distinguishes_f1_variants() {
        let a = fixtures::f1_graph(F1Variant::Origin2AtOrigin1);
        let b = fixtures::f1_graph(F1Variant::Origin2AtDestination1);
        assert!(find_terminal_isomorphism(&a, &a).is_some());
        assert!(find_terminal_isomorphism(&a, &b).is_none());
        // swap OD roles of variant B: still variant B up to relabeling
        let swapped = b.with_od_pairs(vec![b.od_pairs()[1], b.od_pairs()[0]]);
        let iso = find_terminal_isomorphism(&swapped, &b).unwrap();
        assert_eq!(iso.od_map, vec![1, 0]);
    }
}
