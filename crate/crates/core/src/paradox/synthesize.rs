use super::{
    confirm, f1_instance, find_f1_embedding, lift_block_to_whole, lift_instance, IbpInstance,
    IbpVerdict, ParadoxError,
};
use crate::blocks::{BlockDecomposition, BlockId};
use crate::embedding::EmbeddingStep;
use crate::fixtures::F1Variant;
use crate::graph::{is_cycle, MultiGraph, OdPair};
use crate::topology::{decide_ibp_free, FailureSite, Verdict};

/// A synthesized IBP instance together with how it was obtained.
#[derive(Clone, Debug)]
pub struct Witness {
    pub instance: IbpInstance,
    pub verdict: IbpVerdict,
    pub block: BlockId,
    pub od_pairs: (usize, usize),
    pub variant: F1Variant,
    pub steps: Vec<EmbeddingStep>,
}

/// Builds an IBP instance on `g` from a shared block that is neither
/// coincident nor a cycle: F1 is embedded into the block, the gadget game is
/// lifted to the block and then to `g`, and the result is re-checked.
pub fn synthesize_ibp_witness(g: &MultiGraph) -> Result<Witness, ParadoxError> {
    let report = decide_ibp_free(g)?;
    if report.verdict == Verdict::IbpFree {
        return Err(ParadoxError::PreconditionViolated(
            "the network is IBP-free".into(),
        ));
    }
    let (i, j, block) = match report.failure_site {
        Some(FailureSite::CommonBlock { i, j, block }) => (i, j, block),
        Some(FailureSite::SliCondition { od_index }) => find_separating_block(g, &report.blocks).ok_or_else(|| {
            ParadoxError::UnsupportedFailureSite(format!(
                "OD pair {od_index} is not SLI and no shared block is both non-coincident and not a cycle"
            ))
        })?,
        Some(FailureSite::InducedGraph { i, j }) => {
            return Err(ParadoxError::UnsupportedFailureSite(format!(
                "OD pairs {i} and {j} share edges outside their common blocks"
            )))
        }
        None => return Err(ParadoxError::PreconditionViolated("no failure site reported".into())),
    };
    let d = &report.blocks;
    let pairs: Vec<OdPair> = [i, j]
        .iter()
        .map(|&k| {
            let l = d.link(k, block).expect("failing block lies on both chains");
            OdPair::new(l.entry, l.exit)
        })
        .collect();
    let local_graph = g.restrict(&d.block(block).edges, &pairs);
    let steps = find_f1_embedding(&local_graph)?;
    let mut last_error = ParadoxError::StepsDoNotReproduceSource;
    for variant in F1Variant::ALL {
        let local = match lift_instance(&local_graph, &steps, &f1_instance(variant)) {
            Ok(l) => l,
            Err(e) => {
                last_error = e;
                continue;
            }
        };
        let instance = lift_block_to_whole(g, block, &[i, j], &local)?;
        let verdict = confirm(&instance)?;
        if !verdict.occurs {
            return Err(ParadoxError::WitnessNotConfirmed {
                margin: verdict.margin,
            });
        }
        return Ok(Witness {
            instance,
            verdict,
            block,
            od_pairs: (i, j),
            variant,
            steps,
        });
    }
    Err(last_error)
}

/// First pair of OD chains (in index order) sharing a block on which their
/// terminal sets differ and which is not a cycle.
fn find_separating_block(
    g: &MultiGraph,
    d: &BlockDecomposition,
) -> Option<(usize, usize, BlockId)> {
    let n = g.od_pairs().len();
    for i in 0..n {
        for j in i + 1..n {
            let (Some(ci), Some(cj)) = (d.chains[i].as_deref(), d.chains[j].as_deref()) else {
                continue;
            };
            for li in ci {
                let Some(lj) = cj.iter().find(|l| l.block == li.block) else {
                    continue;
                };
                if li.terminal_set() != lj.terminal_set() && !is_cycle(g, &d.block(li.block).edges)
                {
                    return Some((i, j, li.block));
                }
            }
        }
    }
    None
}
