//! Information extensions and the informational Braess paradox (IBP).
//!
//! An [`IbpInstance`] pairs a game with an extension of type 0's information
//! set. IBP occurs when the extension strictly raises type 0's equilibrium
//! latency. Besides checking instances, this module builds witnesses: the
//! three-vertex gadget F1 is embedded into a failing block, lifted to the
//! block and then to the whole network.

mod cycle;
mod embed;
mod lift;
mod search;
mod synthesize;

use serde::Serialize;
use thiserror::Error;

pub use cycle::{cycle_diagnostics, CycleDiagnostics};
pub use embed::find_f1_embedding;
pub use lift::{lift_block_to_whole, lift_instance};
pub use search::{random_search_ibp, SearchConfig, SearchHit, SearchReport};
pub use synthesize::{synthesize_ibp_witness, Witness};

use crate::equilibrium::{
    ConditionalGradient, EquilibriumResult, EquilibriumSolver, GameError, LatencyFunction,
    RoutingGame, SolveError, SolveOptions, TravelerType, DEFAULT_TOLERANCE,
};
use crate::fixtures::{f1_graph, F1Variant};
use crate::graph::{EdgeSet, GraphError};
use crate::topology::TopologyError;

pub const DEFAULT_DECISION_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParadoxError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("invalid extension: {0}")]
    BadExtension(String),
    #[error("the embedding steps do not reduce the target to the source graph")]
    StepsDoNotReproduceSource,
    #[error("contracting `{edge}` would merge the terminals of OD pair {od_index}")]
    TerminalMergeForbidden { edge: String, od_index: usize },
    #[error("the block is a cycle")]
    IsCycle,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("unsupported failure site: {0}")]
    UnsupportedFailureSite(String),
    #[error("the network is not a cycle")]
    NotACycle,
    #[error("instance is not in cycle normal form: {0}")]
    NotNormalForm(String),
    #[error("synthesized instance has margin {margin:e}, below the decision threshold")]
    WitnessNotConfirmed { margin: f64 },
}

/// Extra edges revealed to type 0. Every other type keeps its information set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformationExtension {
    pub extended_type: usize,
    pub added_edges: EdgeSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IbpInstance {
    pub game: RoutingGame,
    pub extension: InformationExtension,
}

impl IbpInstance {
    pub fn new(game: RoutingGame, added_edges: EdgeSet) -> Result<Self, ParadoxError> {
        let Some(first) = game.types().first() else {
            return Err(ParadoxError::BadExtension(
                "the game has no traveler types".into(),
            ));
        };
        if added_edges.is_empty() {
            return Err(ParadoxError::BadExtension("no edges added".into()));
        }
        if let Some(e) = added_edges
            .iter()
            .find(|e| e.0 >= game.graph().edge_count())
        {
            return Err(ParadoxError::BadExtension(format!(
                "unknown edge id {}",
                e.0
            )));
        }
        if let Some(e) = added_edges.intersection(&first.info_set).next() {
            return Err(ParadoxError::BadExtension(format!(
                "edge `{}` is already known to type 0",
                game.graph().edge_name(*e)
            )));
        }
        Ok(Self {
            game,
            extension: InformationExtension {
                extended_type: 0,
                added_edges,
            },
        })
    }

    pub fn pre_game(&self) -> &RoutingGame {
        &self.game
    }

    pub fn post_game(&self) -> RoutingGame {
        let mut types = self.game.types().to_vec();
        types[0]
            .info_set
            .extend(self.extension.added_edges.iter().copied());
        self.game
            .with_types(types)
            .expect("extension edges were validated")
    }

    pub fn extended_info_set(&self) -> EdgeSet {
        self.post_game().types()[0].info_set.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IbpOutcome {
    Occurs,
    NotOccurs,
    /// Positive margin above solver tolerance but not above the threshold.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IbpVerdict {
    pub latency_before: f64,
    pub latency_after: f64,
    pub margin: f64,
    pub occurs: bool,
    pub outcome: IbpOutcome,
    pub before: EquilibriumResult,
    pub after: EquilibriumResult,
}

/// Solves both games with the conditional-gradient backend.
pub fn check_ibp(
    instance: &IbpInstance,
    tolerance: f64,
    decision_threshold: f64,
) -> Result<IbpVerdict, ParadoxError> {
    check_ibp_with(
        instance,
        &ConditionalGradient,
        &SolveOptions::default().with_tolerance(tolerance),
        decision_threshold,
    )
}

pub fn check_ibp_with(
    instance: &IbpInstance,
    solver: &dyn EquilibriumSolver,
    options: &SolveOptions,
    decision_threshold: f64,
) -> Result<IbpVerdict, ParadoxError> {
    let before = solver.solve(instance.pre_game(), options)?;
    let after = solver.solve(&instance.post_game(), options)?;
    let latency_before = before.type_latencies[0];
    let latency_after = after.type_latencies[0];
    let margin = latency_after - latency_before;
    let occurs = margin > decision_threshold;
    let outcome = if occurs {
        IbpOutcome::Occurs
    } else if margin > options.tolerance {
        IbpOutcome::Inconclusive
    } else {
        IbpOutcome::NotOccurs
    };
    Ok(IbpVerdict {
        latency_before,
        latency_after,
        margin,
        occurs,
        outcome,
        before,
        after,
    })
}

/// Default-tolerance check used by the witness constructions.
pub(crate) fn confirm(instance: &IbpInstance) -> Result<IbpVerdict, ParadoxError> {
    check_ibp(instance, DEFAULT_TOLERANCE, DEFAULT_DECISION_THRESHOLD)
}

/// The gadget game on F1: rates 5 and 5, latencies `0, 4x, x+22, 10+2x` on
/// `e1..e4`, information sets `{e2,e3}` for type 0 and `{e1,e2,e4}` for
/// type 1, and `e4` revealed to type 0.
pub fn f1_instance(variant: F1Variant) -> IbpInstance {
    let g = f1_graph(variant);
    let latencies = vec![
        LatencyFunction::zero(),
        LatencyFunction::affine(0.0, 4.0).expect("valid"),
        LatencyFunction::affine(22.0, 1.0).expect("valid"),
        LatencyFunction::affine(10.0, 2.0).expect("valid"),
    ];
    let names = |n: &[&str]| {
        g.edge_set_by_names(n.iter().copied())
            .expect("F1 edge names")
    };
    let types = vec![
        TravelerType::new(5.0, 0, names(&["e2", "e3"])),
        TravelerType::new(5.0, 1, names(&["e1", "e2", "e4"])),
    ];
    let added = names(&["e4"]);
    let game = RoutingGame::new(g, latencies, types).expect("valid F1 game");
    IbpInstance::new(game, added).expect("valid F1 extension")
}
