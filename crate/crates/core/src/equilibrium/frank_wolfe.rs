use super::{
    all_feasible_paths, edge_flows_of, initial_flows, EquilibriumResult, EquilibriumSolver,
    RoutingGame, SolveError, SolveOptions,
};
use crate::graph::{EdgeId, Path};

/// Pairwise conditional-gradient method over path flows.
///
/// Types are swept in order. For each type the flow on its costliest used path
/// moves toward its cheapest path, with the step length chosen by an exact line
/// search along that direction. Works for any nondecreasing latencies.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConditionalGradient;

impl EquilibriumSolver for ConditionalGradient {
    fn name(&self) -> &'static str {
        "conditional-gradient"
    }

    fn solve(
        &self,
        game: &RoutingGame,
        options: &SolveOptions,
    ) -> Result<EquilibriumResult, SolveError> {
        let paths = all_feasible_paths(game, options.path_cap)?;
        let mut flows = initial_flows(game, &paths, &options.start)?;
        let mut iterations = 0;
        loop {
            let mut edge_flows = edge_flows_of(game, &paths, &flows);
            let violation = max_violation(game, &paths, &flows, &edge_flows, options.flow_epsilon);
            if violation <= options.tolerance {
                break;
            }
            if iterations >= options.max_iterations {
                return Err(SolveError::DidNotConverge {
                    iterations,
                    violation,
                });
            }
            iterations += 1;
            for (j, t) in game.types().iter().enumerate() {
                if t.rate <= 0.0 || paths[j].len() < 2 {
                    continue;
                }
                for _ in 0..paths[j].len() {
                    if !pair_move(game, &paths[j], &mut flows[j], &mut edge_flows) {
                        break;
                    }
                }
            }
        }
        Ok(EquilibriumResult::assemble(
            game,
            self.name(),
            paths,
            flows,
            iterations,
            options.flow_epsilon,
        ))
    }
}

fn max_violation(
    game: &RoutingGame,
    paths: &[Vec<Path>],
    flows: &[Vec<f64>],
    edge_flows: &[f64],
    eps: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for (ps, fs) in paths.iter().zip(flows) {
        let costs: Vec<f64> = ps
            .iter()
            .map(|p| game.path_latency(p, edge_flows))
            .collect();
        let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
        for (c, &f) in costs.iter().zip(fs) {
            if f > eps {
                worst = worst.max(c - best);
            }
        }
    }
    worst
}

/// Moves flow from the costliest used path to the cheapest one. Returns
/// `false` when no improving move exists.
fn pair_move(
    game: &RoutingGame,
    paths: &[Path],
    flows: &mut [f64],
    edge_flows: &mut [f64],
) -> bool {
    let costs: Vec<f64> = paths
        .iter()
        .map(|p| game.path_latency(p, edge_flows))
        .collect();
    let cheap = (0..paths.len())
        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]))
        .expect("nonempty");
    let Some(dear) = (0..paths.len())
        .filter(|&k| flows[k] > 0.0)
        .max_by(|&a, &b| costs[a].total_cmp(&costs[b]))
    else {
        return false;
    };
    if dear == cheap || costs[dear] - costs[cheap] <= 1e-15 * (1.0 + costs[dear].abs()) {
        return false;
    }
    let gain: Vec<EdgeId> = paths[cheap]
        .iter()
        .filter(|e| !paths[dear].contains(e))
        .copied()
        .collect();
    let loss: Vec<EdgeId> = paths[dear]
        .iter()
        .filter(|e| !paths[cheap].contains(e))
        .copied()
        .collect();
    let delta = line_search(game, &gain, &loss, edge_flows, flows[dear]);
    if delta <= 0.0 {
        return false;
    }
    flows[dear] -= delta;
    flows[cheap] += delta;
    if flows[dear] < 0.0 {
        flows[dear] = 0.0;
    }
    for e in &gain {
        edge_flows[e.0] += delta;
    }
    for e in &loss {
        edge_flows[e.0] = (edge_flows[e.0] - delta).max(0.0);
    }
    true
}

/// Root in `[0, cap]` of the nondecreasing cost gap
/// `h(δ) = Σ_gain ℓ(f + δ) − Σ_loss ℓ(f − δ)`, or `cap` when `h(cap) ≤ 0`.
fn line_search(
    game: &RoutingGame,
    gain: &[EdgeId],
    loss: &[EdgeId],
    edge_flows: &[f64],
    cap: f64,
) -> f64 {
    let h = |d: f64| {
        let up: f64 = gain
            .iter()
            .map(|e| game.latency(*e).eval(edge_flows[e.0] + d))
            .sum();
        let down: f64 = loss
            .iter()
            .map(|e| game.latency(*e).eval(edge_flows[e.0] - d))
            .sum();
        up - down
    };
    let dh = |d: f64| {
        let up: f64 = gain
            .iter()
            .map(|e| game.latency(*e).derivative(edge_flows[e.0] + d))
            .sum();
        let down: f64 = loss
            .iter()
            .map(|e| game.latency(*e).derivative(edge_flows[e.0] - d))
            .sum();
        up + down
    };
    if h(cap) <= 0.0 {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    let mut x = 0.0;
    for _ in 0..200 {
        let hx = h(x);
        if hx == 0.0 {
            return x;
        }
        if hx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= f64::EPSILON * cap.max(1.0) {
            break;
        }
        let slope = dh(x);
        let newton = x - hx / slope;
        x = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    lo
}
