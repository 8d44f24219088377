//! Biconnected-component (block) decomposition and OD block chains.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::graph::{EdgeId, EdgeSet, MultiGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct BlockId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub id: BlockId,
    pub edges: EdgeSet,
    pub vertices: BTreeSet<VertexId>,
}

/// One block of an OD chain with the terminals the chain induces on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub block: BlockId,
    pub entry: VertexId,
    pub exit: VertexId,
}

impl ChainLink {
    pub fn terminal_set(&self) -> (VertexId, VertexId) {
        (self.entry.min(self.exit), self.entry.max(self.exit))
    }
}

/// Blocks of the subgraph formed by some edge subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub blocks: Vec<Block>,
    pub cut_vertices: BTreeSet<VertexId>,
    /// Blocks containing each vertex (empty for vertices without allowed edges).
    pub vertex_blocks: Vec<Vec<BlockId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub cut_vertices: BTreeSet<VertexId>,
    /// Per OD index, the ordered block chain from origin to destination.
    pub chains: Vec<Option<Vec<ChainLink>>>,
}

impl BlockDecomposition {
    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.0]
    }

    pub fn block_of_edge(&self, e: EdgeId) -> Option<BlockId> {
        self.blocks
            .iter()
            .find(|b| b.edges.contains(&e))
            .map(|b| b.id)
    }

    pub fn link(&self, od: usize, block: BlockId) -> Option<ChainLink> {
        self.chains
            .get(od)?
            .as_ref()?
            .iter()
            .find(|l| l.block == block)
            .copied()
    }
}

pub fn decompose_blocks(g: &MultiGraph) -> BlockDecomposition {
    let d = decompose_within(g, &g.all_edges());
    let chains = g
        .od_pairs()
        .iter()
        .map(|od| d.chain_between(od.origin, od.destination))
        .collect();
    BlockDecomposition {
        blocks: d.blocks,
        cut_vertices: d.cut_vertices,
        chains,
    }
}

pub fn decompose_within(g: &MultiGraph, allowed: &EdgeSet) -> Decomposition {
    let n = g.vertex_count();
    let adjacency: Vec<Vec<EdgeId>> = g
        .adjacency()
        .into_iter()
        .map(|l| {
            l.into_iter()
                .filter(|e| allowed.contains(e) && !g.edge(*e).is_loop())
                .collect()
        })
        .collect();
    let mut state = Tarjan {
        g,
        adjacency: &adjacency,
        disc: vec![usize::MAX; n],
        low: vec![0; n],
        timer: 0,
        stack: Vec::new(),
        found: Vec::new(),
    };
    for v in g.vertices() {
        if state.disc[v.0] == usize::MAX && !adjacency[v.0].is_empty() {
            state.visit(v, None);
        }
    }
    let mut raw = state.found;
    raw.sort_by_key(|edges| *edges.iter().next().expect("blocks are nonempty"));

    let mut vertex_blocks = vec![Vec::new(); n];
    let blocks: Vec<Block> = raw
        .into_iter()
        .enumerate()
        .map(|(i, edges)| {
            let vertices = g.vertices_of(&edges);
            for v in &vertices {
                vertex_blocks[v.0].push(BlockId(i));
            }
            Block {
                id: BlockId(i),
                edges,
                vertices,
            }
        })
        .collect();
    let cut_vertices = g
        .vertices()
        .filter(|v| vertex_blocks[v.0].len() > 1)
        .collect();
    Decomposition {
        blocks,
        cut_vertices,
        vertex_blocks,
    }
}

struct Tarjan<'a> {
    g: &'a MultiGraph,
    adjacency: &'a [Vec<EdgeId>],
    disc: Vec<usize>,
    low: Vec<usize>,
    timer: usize,
    stack: Vec<EdgeId>,
    found: Vec<EdgeSet>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: VertexId, via: Option<EdgeId>) {
        self.disc[v.0] = self.timer;
        self.low[v.0] = self.timer;
        self.timer += 1;
        for &e in &self.adjacency[v.0] {
            // Skip only the tree edge itself so parallel edges act as back edges.
            if Some(e) == via {
                continue;
            }
            let w = self.g.edge(e).other(v);
            if self.disc[w.0] == usize::MAX {
                self.stack.push(e);
                self.visit(w, Some(e));
                self.low[v.0] = self.low[v.0].min(self.low[w.0]);
                if self.low[w.0] >= self.disc[v.0] {
                    let mut block = EdgeSet::new();
                    while let Some(top) = self.stack.pop() {
                        block.insert(top);
                        if top == e {
                            break;
                        }
                    }
                    self.found.push(block);
                }
            } else if self.disc[w.0] < self.disc[v.0] {
                self.stack.push(e);
                self.low[v.0] = self.low[v.0].min(self.disc[w.0]);
            }
        }
    }
}

impl Decomposition {
    /// Blocks on the block-cut tree path from `s` to `t`, with induced
    /// terminals. `None` when `s == t` or they are not connected.
    pub fn chain_between(&self, s: VertexId, t: VertexId) -> Option<Vec<ChainLink>> {
        if s == t || self.vertex_blocks[s.0].is_empty() || self.vertex_blocks[t.0].is_empty() {
            return None;
        }
        #[derive(Clone, Copy, PartialEq, Eq)]
        enum Node {
            V(VertexId),
            B(BlockId),
        }
        let nv = self.vertex_blocks.len();
        let index = |n: Node| match n {
            Node::V(v) => v.0,
            Node::B(b) => nv + b.0,
        };
        let mut prev: Vec<Option<Node>> = vec![None; nv + self.blocks.len()];
        let mut seen = vec![false; nv + self.blocks.len()];
        let mut queue = VecDeque::from([Node::V(s)]);
        seen[s.0] = true;
        while let Some(node) = queue.pop_front() {
            if node == Node::V(t) {
                break;
            }
            let next: Vec<Node> = match node {
                Node::V(v) => self.vertex_blocks[v.0]
                    .iter()
                    .map(|&b| Node::B(b))
                    .collect(),
                Node::B(b) => self.blocks[b.0]
                    .vertices
                    .iter()
                    .map(|&v| Node::V(v))
                    .collect(),
            };
            for m in next {
                if !seen[index(m)] {
                    seen[index(m)] = true;
                    prev[index(m)] = Some(node);
                    queue.push_back(m);
                }
            }
        }
        if !seen[t.0] {
            return None;
        }
        let mut nodes = vec![Node::V(t)];
        let mut at = Node::V(t);
        while let Some(p) = prev[index(at)] {
            nodes.push(p);
            at = p;
        }
        nodes.reverse();
        let links = nodes
            .windows(3)
            .filter_map(|w| match (w[0], w[1], w[2]) {
                (Node::V(a), Node::B(b), Node::V(c)) => Some(ChainLink {
                    block: b,
                    entry: a,
                    exit: c,
                }),
                _ => None,
            })
            .collect();
        Some(links)
    }
}
