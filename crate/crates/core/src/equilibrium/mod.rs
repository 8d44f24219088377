//! Information-constrained Wardrop equilibria (ICWE).
//!
//! Every traveler type routes between the terminals of its OD pair using only
//! edges in its information set. All types share the edge latencies, so an
//! equilibrium is a minimizer of the edge-cost potential
//! `Σ_e ∫₀^{f_e} ℓ_e(t) dt` over the product of the per-type path-flow
//! simplices. Solvers are registered by name in a [`SolverRegistry`].

mod active_set;
mod frank_wolfe;
mod latency;
mod local;
mod verify;

use serde::Serialize;
use thiserror::Error;

pub use active_set::{ActiveSet, ACTIVE_SET_MAX_PATHS};
pub use frank_wolfe::ConditionalGradient;
pub use latency::LatencyFunction;
pub use local::{block_local_game, check_series_decomposition, BlockLocalGame, SeriesCheck};
pub use verify::{verify_wardrop, WardropReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::BlockId;
use crate::graph::{EdgeId, EdgeSet, GraphError, MultiGraph, Path};
use crate::paths::{enumerate_simple_paths_capped, PathCap};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const FLOW_EPSILON: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("latency coefficient {0} is negative or not finite")]
    BadLatency(f64),
    #[error("expected {expected} latency functions, got {got}")]
    LatencyCount { expected: usize, got: usize },
    #[error("type {type_index}: rate must be finite and nonnegative")]
    BadRate { type_index: usize },
    #[error("type {type_index}: OD index {od_index} out of range")]
    BadOdIndex { type_index: usize, od_index: usize },
    #[error("type {type_index}: information set names an unknown edge")]
    UnknownEdge { type_index: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("type {type_index} has positive rate but no feasible path")]
    NoFeasiblePath { type_index: usize },
    #[error("no convergence after {iterations} iterations (violation {violation:e})")]
    DidNotConverge { iterations: usize, violation: f64 },
    #[error("solver `{solver}` does not apply: {reason}")]
    NotApplicable {
        solver: &'static str,
        reason: String,
    },
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error("invalid starting point: {0}")]
    BadStart(String),
    #[error("block {0:?} lies on no OD chain")]
    BlockNotInChain(BlockId),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TravelerType {
    pub rate: f64,
    pub od_index: usize,
    pub info_set: EdgeSet,
}

impl TravelerType {
    pub fn new(rate: f64, od_index: usize, info_set: EdgeSet) -> Self {
        Self {
            rate,
            od_index,
            info_set,
        }
    }
}

/// Graph, one latency per edge, and the traveler types.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutingGame {
    graph: MultiGraph,
    latencies: Vec<LatencyFunction>,
    types: Vec<TravelerType>,
}

impl RoutingGame {
    pub fn new(
        graph: MultiGraph,
        latencies: Vec<LatencyFunction>,
        types: Vec<TravelerType>,
    ) -> Result<Self, GameError> {
        if latencies.len() != graph.edge_count() {
            return Err(GameError::LatencyCount {
                expected: graph.edge_count(),
                got: latencies.len(),
            });
        }
        for (j, t) in types.iter().enumerate() {
            if !t.rate.is_finite() || t.rate < 0.0 {
                return Err(GameError::BadRate { type_index: j });
            }
            if t.od_index >= graph.od_pairs().len() {
                return Err(GameError::BadOdIndex {
                    type_index: j,
                    od_index: t.od_index,
                });
            }
            if t.info_set.iter().any(|e| e.0 >= graph.edge_count()) {
                return Err(GameError::UnknownEdge { type_index: j });
            }
        }
        Ok(Self {
            graph,
            latencies,
            types,
        })
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn latencies(&self) -> &[LatencyFunction] {
        &self.latencies
    }

    pub fn latency(&self, e: EdgeId) -> &LatencyFunction {
        &self.latencies[e.0]
    }

    pub fn types(&self) -> &[TravelerType] {
        &self.types
    }

    pub fn with_types(&self, types: Vec<TravelerType>) -> Result<Self, GameError> {
        Self::new(self.graph.clone(), self.latencies.clone(), types)
    }

    pub fn is_affine(&self) -> bool {
        self.latencies.iter().all(LatencyFunction::is_affine)
    }

    pub fn total_rate(&self) -> f64 {
        self.types.iter().map(|t| t.rate).sum()
    }

    pub fn path_latency(&self, path: &[EdgeId], edge_flows: &[f64]) -> f64 {
        path.iter()
            .map(|&e| self.latencies[e.0].eval(edge_flows[e.0]))
            .sum()
    }
}

/// OD paths of type `j` inside its information set.
pub fn feasible_paths(game: &RoutingGame, j: usize, cap: PathCap) -> Result<Vec<Path>, SolveError> {
    let t = &game.types()[j];
    let od = game.graph().od(t.od_index)?;
    let paths =
        enumerate_simple_paths_capped(game.graph(), od.origin, od.destination, &t.info_set, cap)?;
    if paths.is_empty() && t.rate > 0.0 {
        return Err(SolveError::NoFeasiblePath { type_index: j });
    }
    Ok(paths)
}

pub(crate) fn all_feasible_paths(
    game: &RoutingGame,
    cap: PathCap,
) -> Result<Vec<Vec<Path>>, SolveError> {
    (0..game.types().len())
        .map(|j| feasible_paths(game, j, cap))
        .collect()
}

pub fn beckmann_potential(game: &RoutingGame, edge_flows: &[f64]) -> f64 {
    game.latencies()
        .iter()
        .zip(edge_flows)
        .map(|(l, &f)| l.integral(f))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum StartPoint {
    FirstPath,
    Uniform,
    /// Random split per type, reproducible from the seed.
    Random(u64),
    /// Explicit per-type path flows, indexed like the feasible path lists.
    Given(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub flow_epsilon: f64,
    pub path_cap: PathCap,
    pub start: StartPoint,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            flow_epsilon: FLOW_EPSILON,
            path_cap: PathCap::default(),
            start: StartPoint::FirstPath,
        }
    }
}

impl SolveOptions {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_start(mut self, start: StartPoint) -> Self {
        self.start = start;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub solver: String,
    /// Feasible paths per type; `path_flows[j][k]` is the flow on `paths[j][k]`.
    pub paths: Vec<Vec<Path>>,
    pub path_flows: Vec<Vec<f64>>,
    pub edge_flows: Vec<f64>,
    pub edge_latencies: Vec<f64>,
    pub type_latencies: Vec<f64>,
    pub max_wardrop_violation: f64,
    pub iterations: usize,
}

impl EquilibriumResult {
    pub(crate) fn assemble(
        game: &RoutingGame,
        solver: &str,
        paths: Vec<Vec<Path>>,
        path_flows: Vec<Vec<f64>>,
        iterations: usize,
        flow_epsilon: f64,
    ) -> Self {
        let edge_flows = edge_flows_of(game, &paths, &path_flows);
        let edge_latencies: Vec<f64> = game
            .latencies()
            .iter()
            .zip(&edge_flows)
            .map(|(l, &f)| l.eval(f))
            .collect();
        let mut type_latencies = Vec::with_capacity(paths.len());
        let mut max_violation = 0.0f64;
        for (j, t) in game.types().iter().enumerate() {
            if t.rate <= 0.0 || paths[j].is_empty() {
                type_latencies.push(0.0);
                continue;
            }
            let costs: Vec<f64> = paths[j]
                .iter()
                .map(|p| p.iter().map(|e| edge_latencies[e.0]).sum())
                .collect();
            let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
            let heaviest = (0..costs.len())
                .max_by(|&a, &b| path_flows[j][a].total_cmp(&path_flows[j][b]))
                .expect("nonempty");
            type_latencies.push(costs[heaviest]);
            for (k, &c) in costs.iter().enumerate() {
                if path_flows[j][k] > flow_epsilon {
                    max_violation = max_violation.max(c - best);
                }
            }
        }
        Self {
            solver: solver.to_string(),
            paths,
            path_flows,
            edge_flows,
            edge_latencies,
            type_latencies,
            max_wardrop_violation: max_violation,
            iterations,
        }
    }
}

pub(crate) fn edge_flows_of(
    game: &RoutingGame,
    paths: &[Vec<Path>],
    flows: &[Vec<f64>],
) -> Vec<f64> {
    let mut edge = vec![0.0; game.graph().edge_count()];
    for (ps, fs) in paths.iter().zip(flows) {
        for (p, &f) in ps.iter().zip(fs) {
            for e in p {
                edge[e.0] += f;
            }
        }
    }
    edge
}

/// Equilibrium latency of type `j`; zero for rate-0 types.
pub fn equilibrium_latency(result: &EquilibriumResult, j: usize) -> f64 {
    result.type_latencies[j]
}

pub(crate) fn initial_flows(
    game: &RoutingGame,
    paths: &[Vec<Path>],
    start: &StartPoint,
) -> Result<Vec<Vec<f64>>, SolveError> {
    let mut rng = match start {
        StartPoint::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    game.types()
        .iter()
        .zip(paths)
        .enumerate()
        .map(|(j, (t, ps))| {
            let n = ps.len();
            let mut flows = vec![0.0; n];
            if n == 0 {
                return Ok(flows);
            }
            match start {
                StartPoint::FirstPath => flows[0] = t.rate,
                StartPoint::Uniform => flows.iter_mut().for_each(|f| *f = t.rate / n as f64),
                StartPoint::Random(_) => {
                    let rng = rng.as_mut().expect("seeded");
                    let weights: Vec<f64> =
                        (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                    let total: f64 = weights.iter().sum();
                    for (f, w) in flows.iter_mut().zip(weights) {
                        *f = t.rate * w / total;
                    }
                }
                StartPoint::Given(given) => {
                    let g = given.get(j).filter(|g| g.len() == n).ok_or_else(|| {
                        SolveError::BadStart(format!("type {j}: expected {n} path flows"))
                    })?;
                    let sum: f64 = g.iter().sum();
                    if g.iter().any(|&f| f.is_nan() || f < 0.0)
                        || (sum - t.rate).abs() > 1e-9 * (1.0 + t.rate)
                    {
                        return Err(SolveError::BadStart(format!(
                            "type {j}: flows must be nonnegative and sum to the rate"
                        )));
                    }
                    flows.copy_from_slice(g);
                }
            }
            Ok(flows)
        })
        .collect()
}

/// A named equilibrium backend.
pub trait EquilibriumSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(
        &self,
        game: &RoutingGame,
        options: &SolveOptions,
    ) -> Result<EquilibriumResult, SolveError>;
}

pub const DEFAULT_SOLVER: &str = "conditional-gradient";

/// Solvers selectable by name.
pub struct SolverRegistry {
    solvers: Vec<Box<dyn EquilibriumSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: Vec::new(),
        }
    }

    pub fn register(&mut self, solver: Box<dyn EquilibriumSolver>) {
        self.solvers.retain(|s| s.name() != solver.name());
        self.solvers.push(solver);
    }

    pub fn get(&self, name: &str) -> Option<&dyn EquilibriumSolver> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }

    pub fn solve(
        &self,
        name: &str,
        game: &RoutingGame,
        options: &SolveOptions,
    ) -> Result<EquilibriumResult, SolveError> {
        self.get(name)
            .ok_or_else(|| SolveError::UnknownSolver(name.to_string()))?
            .solve(game, options)
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ConditionalGradient));
        r.register(Box::new(ActiveSet));
        r
    }
}

/// Conditional-gradient solve with the given tolerance and iteration budget.
pub fn solve_icwe(
    game: &RoutingGame,
    tolerance: f64,
    max_iterations: usize,
) -> Result<EquilibriumResult, SolveError> {
    ConditionalGradient.solve(
        game,
        &SolveOptions::default()
            .with_tolerance(tolerance)
            .with_max_iterations(max_iterations),
    )
}
