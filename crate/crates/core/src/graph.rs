//! Undirected multigraphs with named vertices, named edges and OD terminal pairs.
//!
//! Vertices and edges are addressed by dense indices ([`VertexId`], [`EdgeId`])
//! that follow declaration order. Names are the stable identity across graph
//! rewrites (deletion and contraction re-index, names survive).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::blocks;
use crate::paths::{self, PathCap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v#{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e#{}", self.0)
    }
}

pub type EdgeSet = BTreeSet<EdgeId>;

/// A path is an ordered edge sequence; parallel edges make vertex sequences ambiguous.
pub type Path = Vec<EdgeId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub ends: [VertexId; 2],
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.ends[0] == v || self.ends[1] == v
    }

    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OdPair {
    pub origin: VertexId,
    pub destination: VertexId,
}

impl OdPair {
    pub fn new(origin: VertexId, destination: VertexId) -> Self {
        Self {
            origin,
            destination,
        }
    }

    /// Terminal set as an ordered pair `(min, max)`, i.e. ignoring orientation.
    pub fn unordered(&self) -> (VertexId, VertexId) {
        if self.origin <= self.destination {
            (self.origin, self.destination)
        } else {
            (self.destination, self.origin)
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.origin == v || self.destination == v
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge name `{0}`")]
    DuplicateEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    EdgeNotFound(String),
    #[error("OD index {0} out of range")]
    OdIndexOutOfRange(usize),
    #[error("no path between the terminals of OD pair {0}")]
    NoPath(usize),
    #[error("path enumeration exceeded the cap of {0} paths")]
    PathCapExceeded(usize),
    #[error("contracting `{edge}` would merge the terminals of OD pair {od_index}")]
    TerminalMergeForbidden { edge: String, od_index: usize },
    #[error("contracting `{edge}` would turn parallel edge `{parallel}` into a loop")]
    LoopWouldForm { edge: String, parallel: String },
    #[error("merged vertex name `{0}` collides with an existing vertex")]
    MergedNameTaken(String),
    #[error("contraction step for `{0}` has no merged vertex name")]
    MissingMergedName(String),
}

/// Undirected multigraph with OD pairs. Loops and disconnected graphs can be
/// represented so that [`MultiGraph::validate`] can report them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    od_pairs: Vec<OdPair>,
    vertex_index: BTreeMap<String, VertexId>,
    edge_index: BTreeMap<String, EdgeId>,
}

#[derive(Default, Debug, Clone)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    od_pairs: Vec<(String, String)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, name: impl Into<String>) -> Self {
        self.vertices.push(name.into());
        self
    }

    /// Adds an edge; endpoints not yet declared are appended to the vertex list.
    pub fn edge(
        mut self,
        name: impl Into<String>,
        a: impl Into<String>,
        b: impl Into<String>,
    ) -> Self {
        let (a, b) = (a.into(), b.into());
        for v in [&a, &b] {
            if !self.vertices.contains(v) {
                self.vertices.push(v.clone());
            }
        }
        self.edges.push((name.into(), a, b));
        self
    }

    pub fn od(mut self, origin: impl Into<String>, destination: impl Into<String>) -> Self {
        self.od_pairs.push((origin.into(), destination.into()));
        self
    }

    pub fn build(self) -> Result<MultiGraph, GraphError> {
        MultiGraph::new(self.vertices, self.edges, self.od_pairs)
    }
}

impl MultiGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        od_pairs: Vec<(String, String)>,
    ) -> Result<Self, GraphError> {
        let mut vertex_index = BTreeMap::new();
        for (i, name) in vertices.iter().enumerate() {
            if vertex_index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let lookup = |name: &str| {
            vertex_index
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
        };
        let mut edge_index = BTreeMap::new();
        let mut built = Vec::with_capacity(edges.len());
        for (i, (name, a, b)) in edges.into_iter().enumerate() {
            if edge_index.insert(name.clone(), EdgeId(i)).is_some() {
                return Err(GraphError::DuplicateEdge(name));
            }
            built.push(Edge {
                ends: [lookup(&a)?, lookup(&b)?],
                name,
            });
        }
        let od_pairs = od_pairs
            .iter()
            .map(|(o, d)| Ok(OdPair::new(lookup(o)?, lookup(d)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(Self {
            vertex_names: vertices,
            edges: built,
            od_pairs,
            vertex_index,
            edge_index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn all_edges(&self) -> EdgeSet {
        self.edge_ids().collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn od_pairs(&self) -> &[OdPair] {
        &self.od_pairs
    }

    pub fn od(&self, i: usize) -> Result<OdPair, GraphError> {
        self.od_pairs
            .get(i)
            .copied()
            .ok_or(GraphError::OdIndexOutOfRange(i))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn edge_set_by_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<EdgeSet, GraphError> {
        names
            .into_iter()
            .map(|n| {
                self.edge_by_name(n)
                    .ok_or_else(|| GraphError::EdgeNotFound(n.to_string()))
            })
            .collect()
    }

    pub fn path_names(&self, path: &[EdgeId]) -> Vec<&str> {
        path.iter().map(|&e| self.edge_name(e)).collect()
    }

    /// Incident edges of every vertex, each list sorted by edge id.
    pub fn adjacency(&self) -> Vec<Vec<EdgeId>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.ends[0].0].push(EdgeId(i));
            if !e.is_loop() {
                adj[e.ends[1].0].push(EdgeId(i));
            }
        }
        adj
    }

    pub fn degree_within(&self, v: VertexId, edges: &EdgeSet) -> usize {
        edges.iter().filter(|&&e| self.edge(e).touches(v)).count()
    }

    pub fn vertices_of(&self, edges: &EdgeSet) -> BTreeSet<VertexId> {
        edges.iter().flat_map(|&e| self.edge(e).ends).collect()
    }

    /// Connected components over the given edges, as vertex sets. Vertices not
    /// touched by any edge are omitted.
    pub fn components_of(&self, edges: &EdgeSet) -> Vec<BTreeSet<VertexId>> {
        let mut parent: Vec<usize> = (0..self.vertex_count()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        for &e in edges {
            let [a, b] = self.edge(e).ends;
            let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
        for v in self.vertices_of(edges) {
            let r = find(&mut parent, v.0);
            groups.entry(r).or_default().insert(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count() <= 1 {
            return true;
        }
        let comps = self.components_of(&self.all_edges());
        comps.len() == 1 && comps[0].len() == self.vertex_count()
    }

    /// Subgraph on the given edges, keeping only touched vertices (plus the
    /// given OD terminals). Names are preserved; ids are renumbered.
    pub fn restrict(&self, edges: &EdgeSet, od_pairs: &[OdPair]) -> MultiGraph {
        let mut keep: BTreeSet<VertexId> = self.vertices_of(edges);
        for od in od_pairs {
            keep.insert(od.origin);
            keep.insert(od.destination);
        }
        let name = |v: VertexId| self.vertex_name(v).to_string();
        MultiGraph::new(
            keep.iter().map(|&v| name(v)).collect(),
            edges
                .iter()
                .map(|&e| {
                    let ed = self.edge(e);
                    (ed.name.clone(), name(ed.ends[0]), name(ed.ends[1]))
                })
                .collect(),
            od_pairs
                .iter()
                .map(|od| (name(od.origin), name(od.destination)))
                .collect(),
        )
        .expect("restriction of a well-formed graph is well-formed")
    }

    /// Same graph with a different OD list.
    pub fn with_od_pairs(&self, od_pairs: Vec<OdPair>) -> MultiGraph {
        let mut g = self.clone();
        g.od_pairs = od_pairs;
        g
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// Violations found by [`validate`]; an empty report means the graph is a
/// well-formed network.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub loops: Vec<EdgeId>,
    pub degenerate_od_pairs: Vec<usize>,
    pub uncovered_edges: Vec<EdgeId>,
    pub uncovered_vertices: Vec<VertexId>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.connected
            && self.loops.is_empty()
            && self.degenerate_od_pairs.is_empty()
            && self.uncovered_edges.is_empty()
            && self.uncovered_vertices.is_empty()
    }

    pub fn describe(&self, g: &MultiGraph) -> Vec<String> {
        let mut out = Vec::new();
        if !self.connected {
            out.push("graph is not connected".to_string());
        }
        for &e in &self.loops {
            out.push(format!("edge `{}` is a loop", g.edge_name(e)));
        }
        for &i in &self.degenerate_od_pairs {
            out.push(format!("OD pair {i} has origin equal to destination"));
        }
        for &e in &self.uncovered_edges {
            out.push(format!("edge `{}` lies on no OD path", g.edge_name(e)));
        }
        for &v in &self.uncovered_vertices {
            out.push(format!("vertex `{}` lies on no OD path", g.vertex_name(v)));
        }
        out
    }
}

pub fn validate(g: &MultiGraph) -> ValidationReport {
    let loops: Vec<EdgeId> = g.edge_ids().filter(|&e| g.edge(e).is_loop()).collect();
    let degenerate: Vec<usize> = g
        .od_pairs()
        .iter()
        .enumerate()
        .filter(|(_, od)| od.origin == od.destination)
        .map(|(i, _)| i)
        .collect();

    // Loops are never on a simple path; ignore them for coverage.
    let proper: EdgeSet = g.edge_ids().filter(|e| !loops.contains(e)).collect();
    let decomposition = blocks::decompose_within(g, &proper);
    let mut covered_edges = EdgeSet::new();
    let mut covered_vertices = BTreeSet::new();
    for (i, od) in g.od_pairs().iter().enumerate() {
        if degenerate.contains(&i) {
            continue;
        }
        covered_vertices.insert(od.origin);
        covered_vertices.insert(od.destination);
        if let Some(chain) = decomposition.chain_between(od.origin, od.destination) {
            for link in chain {
                let block = &decomposition.blocks[link.block.0];
                covered_edges.extend(block.edges.iter().copied());
                covered_vertices.extend(block.vertices.iter().copied());
            }
        }
    }
    ValidationReport {
        connected: g.is_connected(),
        loops,
        degenerate_od_pairs: degenerate,
        uncovered_edges: g
            .edge_ids()
            .filter(|e| !covered_edges.contains(e))
            .collect(),
        uncovered_vertices: g
            .vertices()
            .filter(|v| !covered_vertices.contains(v))
            .collect(),
    }
}

/// The single-OD subnetwork spanned by all simple paths between two terminals.
#[derive(Clone, Debug)]
pub struct Subnetwork<'g> {
    pub parent: &'g MultiGraph,
    pub edges: EdgeSet,
    pub terminals: (VertexId, VertexId),
}

impl<'g> Subnetwork<'g> {
    pub fn new(parent: &'g MultiGraph, edges: EdgeSet, terminals: (VertexId, VertexId)) -> Self {
        Self {
            parent,
            edges,
            terminals,
        }
    }

    /// Whole parent graph as the network between `s` and `t`.
    pub fn whole(parent: &'g MultiGraph, s: VertexId, t: VertexId) -> Self {
        Self::new(parent, parent.all_edges(), (s, t))
    }

    pub fn paths(&self, cap: PathCap) -> Result<Vec<Path>, GraphError> {
        paths::enumerate_simple_paths_capped(
            self.parent,
            self.terminals.0,
            self.terminals.1,
            &self.edges,
            cap,
        )
    }

    /// Edges on no terminal-to-terminal path within `edges`.
    pub fn stray_edges(&self) -> EdgeSet {
        let spanned = span_between(self.parent, &self.edges, self.terminals.0, self.terminals.1);
        self.edges.difference(&spanned).copied().collect()
    }
}

/// Union of all simple `s`–`t` paths inside `allowed`, via the block-cut tree.
pub fn span_between(g: &MultiGraph, allowed: &EdgeSet, s: VertexId, t: VertexId) -> EdgeSet {
    let decomposition = blocks::decompose_within(g, allowed);
    decomposition
        .chain_between(s, t)
        .map(|chain| {
            chain
                .iter()
                .flat_map(|l| decomposition.blocks[l.block.0].edges.iter().copied())
                .collect()
        })
        .unwrap_or_default()
}

pub fn od_subnetwork(g: &MultiGraph, i: usize) -> Result<Subnetwork<'_>, GraphError> {
    let od = g.od(i)?;
    if od.origin == od.destination {
        return Err(GraphError::NoPath(i));
    }
    let edges = span_between(g, &g.all_edges(), od.origin, od.destination);
    if edges.is_empty() {
        return Err(GraphError::NoPath(i));
    }
    Ok(Subnetwork::new(g, edges, (od.origin, od.destination)))
}

/// Connected, 2-regular, and `|E| = |V| >= 2`. Two parallel edges count.
pub fn is_cycle(g: &MultiGraph, edges: &EdgeSet) -> bool {
    if edges.iter().any(|&e| g.edge(e).is_loop()) {
        return false;
    }
    let vertices = g.vertices_of(edges);
    vertices.len() >= 2
        && edges.len() == vertices.len()
        && vertices.iter().all(|&v| g.degree_within(v, edges) == 2)
        && g.components_of(edges).len() == 1
}

pub fn is_cycle_graph(g: &MultiGraph) -> bool {
    g.vertex_count() == g.vertices_of(&g.all_edges()).len() && is_cycle(g, &g.all_edges())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn single_edge_is_valid() {
        let g = MultiGraph::builder()
            .edge("a", "u", "v")
            .od("u", "v")
            .build()
            .unwrap();
        assert!(g.validate().is_valid());
    }

    #[test]
    fn f1_is_valid() {
        let g = fixtures::f1_graph(fixtures::F1Variant::Origin2AtOrigin1);
        let report = g.validate();
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn pendant_edge_is_flagged() {
        let g = MultiGraph::builder()
            .edge("a", "x", "y")
            .edge("b", "y", "z")
            .edge("c", "z", "x")
            .edge("p", "z", "q")
            .od("x", "y")
            .build()
            .unwrap();
        let report = g.validate();
        assert!(!report.is_valid());
        assert_eq!(report.uncovered_edges, vec![g.edge_by_name("p").unwrap()]);
        assert_eq!(
            report.uncovered_vertices,
            vec![g.vertex_by_name("q").unwrap()]
        );
    }

    #[test]
    fn loops_and_disconnection_are_reported() {
        let g = MultiGraph::builder()
            .edge("a", "x", "y")
            .edge("l", "x", "x")
            .vertex("lonely")
            .od("x", "y")
            .od("y", "y")
            .build()
            .unwrap();
        let r = g.validate();
        assert!(!r.connected);
        assert_eq!(r.loops, vec![EdgeId(1)]);
        assert_eq!(r.degenerate_od_pairs, vec![1]);
        assert!(r.uncovered_edges.contains(&EdgeId(1)));
        assert_eq!(r.describe(&g).len(), 5);
    }

    #[test]
    fn unknown_and_duplicate_names_rejected() {
        assert_eq!(
            MultiGraph::new(
                vec!["u".into()],
                vec![("a".into(), "u".into(), "x".into())],
                vec![]
            ),
            Err(GraphError::UnknownVertex("x".into()))
        );
        assert!(matches!(
            MultiGraph::builder()
                .edge("a", "u", "v")
                .edge("a", "v", "w")
                .build(),
            Err(GraphError::DuplicateEdge(_))
        ));
    }

    #[test]
    fn od_subnetwork_across_cut_vertex() {
        // two triangles sharing c
        let g = MultiGraph::builder()
            .edge("a1", "x", "y")
            .edge("a2", "y", "c")
            .edge("a3", "c", "x")
            .edge("b1", "c", "p")
            .edge("b2", "p", "q")
            .edge("b3", "q", "c")
            .od("x", "q")
            .od("x", "y")
            .build()
            .unwrap();
        let far = od_subnetwork(&g, 0).unwrap();
        assert_eq!(far.edges, g.all_edges());
        let near = od_subnetwork(&g, 1).unwrap();
        assert_eq!(near.edges, g.edge_set_by_names(["a1", "a2", "a3"]).unwrap());
    }

    #[test]
    fn f1_subnetwork_is_everything() {
        let g = fixtures::f1_graph(fixtures::F1Variant::Origin2AtOrigin1);
        assert_eq!(od_subnetwork(&g, 0).unwrap().edges.len(), 4);
        assert_eq!(od_subnetwork(&g, 1).unwrap().edges.len(), 4);
    }

    #[test]
    fn cycle_recognition() {
        let tri = fixtures::triangle_two_od();
        assert!(is_cycle(&tri, &tri.all_edges()));
        let f1 = fixtures::f1_graph(fixtures::F1Variant::Origin2AtOrigin1);
        assert!(!is_cycle(&f1, &f1.all_edges()));
        let two = MultiGraph::builder()
            .edge("a", "u", "v")
            .edge("b", "u", "v")
            .build()
            .unwrap();
        assert!(is_cycle(&two, &two.all_edges()));
        let single = MultiGraph::builder().edge("a", "u", "v").build().unwrap();
        assert!(!is_cycle(&single, &single.all_edges()));
        let bowtie = MultiGraph::builder()
            .edge("a", "x", "y")
            .edge("b", "y", "c")
            .edge("d", "c", "x")
            .edge("e", "c", "p")
            .edge("f", "p", "q")
            .edge("g", "q", "c")
            .build()
            .unwrap();
        assert!(!is_cycle(&bowtie, &bowtie.all_edges()));
    }
}
