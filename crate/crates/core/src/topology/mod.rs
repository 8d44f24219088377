//! Recognition of series-parallel (SP), linearly independent (LI) and
//! series-of-LI (SLI) single-OD networks, common-block classification across
//! OD subnetworks, and the resulting IBP-freeness verdict.
//!
//! A network is IBP-free exactly when every OD subnetwork is SLI and any two
//! OD subnetworks share either nothing or only blocks that are coincident
//! (same terminal set in both) or cycles.

mod li;
mod sp;

use serde::Serialize;
use thiserror::Error;

pub use li::{is_li_recursive, is_linearly_independent};
pub use sp::{is_series_parallel, opposite_traversal, OppositeTraversal};

use crate::blocks::{decompose_blocks, decompose_within, BlockDecomposition, BlockId, ChainLink};
use crate::graph::{
    is_cycle, od_subnetwork, EdgeId, EdgeSet, GraphError, MultiGraph, Path, Subnetwork, VertexId,
};
use crate::paths::PathCap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("network is not a single-OD network: {} edge(s) lie on no OD path", stray.len())]
    NotSingleOd { stray: Vec<EdgeId> },
    #[error("OD subnetwork {od_index} is not SLI")]
    PreconditionNotSli { od_index: usize },
}

pub(crate) fn check_single_od(net: &Subnetwork<'_>) -> Result<(), TopologyError> {
    let stray = net.stray_edges();
    if !stray.is_empty() || net.edges.is_empty() {
        return Err(TopologyError::NotSingleOd {
            stray: stray.into_iter().collect(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClassWitness {
    /// Two OD paths cross `edge` in opposite directions (not SP).
    OppositeTraversal(OppositeTraversal),
    /// A chain block that is not LI, with a block path lacking a private edge.
    NonLiBlock { block: BlockId, path: Option<Path> },
    /// An OD path without a private edge (not LI).
    NoPrivateEdge { path: Path },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingleOdClass {
    pub is_sp: bool,
    pub is_li: bool,
    pub is_sli: bool,
    pub witness: Option<ClassWitness>,
}

/// SLI test: every block of the OD chain must be LI between its induced
/// terminals. Returns the chain alongside the verdict.
pub fn is_sli(net: &Subnetwork<'_>) -> Result<(bool, Vec<ChainLink>), TopologyError> {
    check_single_od(net)?;
    let g = net.parent;
    let d = decompose_within(g, &net.edges);
    let chain = d
        .chain_between(net.terminals.0, net.terminals.1)
        .ok_or(GraphError::NoPath(0))?;
    let ok = chain
        .iter()
        .all(|l| li::li_rec(g, &d.blocks[l.block.0].edges, l.entry, l.exit));
    Ok((ok, chain))
}

pub fn classify_single_od(
    g: &MultiGraph,
    i: usize,
    cap: PathCap,
) -> Result<SingleOdClass, TopologyError> {
    let net = od_subnetwork(g, i)?;
    let (is_sp, sp_witness) = is_series_parallel(&net)?;
    let (is_li, li_witness) = is_linearly_independent(&net, cap)?;
    let (is_sli, chain) = is_sli(&net)?;
    let witness = if let Some(w) = sp_witness {
        Some(ClassWitness::OppositeTraversal(w))
    } else if !is_sli {
        let d = decompose_blocks(g);
        chain
            .iter()
            .find(|l| !li::li_rec(g, &d.block(l.block).edges, l.entry, l.exit))
            .map(|l| {
                let block_net =
                    Subnetwork::new(g, d.block(l.block).edges.clone(), (l.entry, l.exit));
                let path = block_net
                    .paths(cap)
                    .ok()
                    .and_then(|paths| li::path_without_private_edge(&paths));
                ClassWitness::NonLiBlock {
                    block: l.block,
                    path,
                }
            })
    } else {
        li_witness.map(|path| ClassWitness::NoPrivateEdge { path })
    };
    Ok(SingleOdClass {
        is_sp,
        is_li,
        is_sli,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    Coincident,
    Cycle,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommonBlockVerdict {
    pub block: BlockId,
    pub kind: BlockKind,
    pub terminals_in_i: (VertexId, VertexId),
    pub terminals_in_j: (VertexId, VertexId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PairwiseEntry {
    Disjoint,
    Shared {
        common: Vec<CommonBlockVerdict>,
        /// The edges shared by both subnetworks are exactly the common blocks.
        induced_is_common_blocks: bool,
    },
}

impl PairwiseEntry {
    pub fn satisfies_common_block_condition(&self) -> bool {
        match self {
            PairwiseEntry::Disjoint => true,
            PairwiseEntry::Shared {
                common,
                induced_is_common_blocks,
            } => *induced_is_common_blocks && common.iter().all(|c| c.kind != BlockKind::Other),
        }
    }

    pub fn all_coincident(&self) -> bool {
        match self {
            PairwiseEntry::Disjoint => true,
            PairwiseEntry::Shared {
                common,
                induced_is_common_blocks,
            } => {
                *induced_is_common_blocks && common.iter().all(|c| c.kind == BlockKind::Coincident)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub entry: PairwiseEntry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    IbpFree,
    NotIbpFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FailureSite {
    /// OD subnetwork `od_index` is not SLI.
    SliCondition { od_index: usize },
    /// A shared block of subnetworks `i` and `j` is neither coincident nor a cycle.
    CommonBlock { i: usize, j: usize, block: BlockId },
    /// Subnetworks `i` and `j` share edges outside their common blocks.
    InducedGraph { i: usize, j: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    pub per_od: Vec<SingleOdClass>,
    pub blocks: BlockDecomposition,
    pub pairwise: Vec<PairReport>,
    pub verdict: Verdict,
    pub failure_site: Option<FailureSite>,
}

/// Pairwise entry for OD subnetworks `i` and `j`, both of which must be SLI.
pub fn classify_common_blocks(
    g: &MultiGraph,
    i: usize,
    j: usize,
) -> Result<PairwiseEntry, TopologyError> {
    for k in [i, j] {
        if !is_sli(&od_subnetwork(g, k)?)?.0 {
            return Err(TopologyError::PreconditionNotSli { od_index: k });
        }
    }
    Ok(pairwise_entry(g, &decompose_blocks(g), i, j))
}

fn pairwise_entry(g: &MultiGraph, d: &BlockDecomposition, i: usize, j: usize) -> PairwiseEntry {
    let chain_i = d.chains[i].as_deref().unwrap_or_default();
    let chain_j = d.chains[j].as_deref().unwrap_or_default();
    let edges_of = |chain: &[ChainLink]| -> EdgeSet {
        chain
            .iter()
            .flat_map(|l| d.block(l.block).edges.iter().copied())
            .collect()
    };
    let shared: EdgeSet = edges_of(chain_i)
        .intersection(&edges_of(chain_j))
        .copied()
        .collect();
    if shared.is_empty() {
        return PairwiseEntry::Disjoint;
    }
    let mut common = Vec::new();
    let mut common_edges = EdgeSet::new();
    for li in chain_i {
        let Some(lj) = chain_j.iter().find(|l| l.block == li.block) else {
            continue;
        };
        let block = d.block(li.block);
        common_edges.extend(block.edges.iter().copied());
        let kind = if li.terminal_set() == lj.terminal_set() {
            BlockKind::Coincident
        } else if is_cycle(g, &block.edges) {
            BlockKind::Cycle
        } else {
            BlockKind::Other
        };
        common.push(CommonBlockVerdict {
            block: li.block,
            kind,
            terminals_in_i: (li.entry, li.exit),
            terminals_in_j: (lj.entry, lj.exit),
        });
    }
    common.sort_by_key(|c| c.block);
    PairwiseEntry::Shared {
        induced_is_common_blocks: common_edges == shared,
        common,
    }
}

pub fn decide_ibp_free(g: &MultiGraph) -> Result<TopologyReport, TopologyError> {
    decide_ibp_free_capped(g, PathCap::default())
}

pub fn decide_ibp_free_capped(
    g: &MultiGraph,
    cap: PathCap,
) -> Result<TopologyReport, TopologyError> {
    let per_od = (0..g.od_pairs().len())
        .map(|i| classify_single_od(g, i, cap))
        .collect::<Result<Vec<_>, _>>()?;
    let blocks = decompose_blocks(g);
    if let Some(od_index) = per_od.iter().position(|c| !c.is_sli) {
        return Ok(TopologyReport {
            per_od,
            blocks,
            pairwise: Vec::new(),
            verdict: Verdict::NotIbpFree,
            failure_site: Some(FailureSite::SliCondition { od_index }),
        });
    }
    let n = g.od_pairs().len();
    let mut pairwise = Vec::new();
    let mut failure_site = None;
    for i in 0..n {
        for j in i + 1..n {
            let entry = pairwise_entry(g, &blocks, i, j);
            if failure_site.is_none() {
                if let PairwiseEntry::Shared {
                    common,
                    induced_is_common_blocks,
                } = &entry
                {
                    if !induced_is_common_blocks {
                        failure_site = Some(FailureSite::InducedGraph { i, j });
                    } else if let Some(bad) = common.iter().find(|c| c.kind == BlockKind::Other) {
                        failure_site = Some(FailureSite::CommonBlock {
                            i,
                            j,
                            block: bad.block,
                        });
                    }
                }
            }
            pairwise.push(PairReport { i, j, entry });
        }
    }
    Ok(TopologyReport {
        per_od,
        blocks,
        pairwise,
        verdict: if failure_site.is_none() {
            Verdict::IbpFree
        } else {
            Verdict::NotIbpFree
        },
        failure_site,
    })
}

/// The older sufficient condition: SLI everywhere and every common block coincident.
pub fn check_sufficient_coincident(g: &MultiGraph) -> Result<bool, TopologyError> {
    let report = decide_ibp_free(g)?;
    Ok(report.per_od.iter().all(|c| c.is_sli)
        && report.pairwise.iter().all(|p| p.entry.all_coincident()))
}
