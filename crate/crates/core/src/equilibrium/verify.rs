use serde::Serialize;

use super::{EquilibriumResult, RoutingGame, FLOW_EPSILON};
use crate::paths::{enumerate_simple_paths, path_vertices};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WardropReport {
    /// Largest cost gap between a used path and the cheapest feasible path.
    pub per_type: Vec<f64>,
    pub max_violation: f64,
    /// Largest `|Σ path flows − rate|`.
    pub max_rate_error: f64,
    pub infeasible_paths: usize,
    pub passed: bool,
}

/// Checks a result from its path flows alone: edge flows and latencies are
/// recomputed, and the cheapest path of each type comes from a fresh
/// enumeration of its information set.
pub fn verify_wardrop(
    game: &RoutingGame,
    result: &EquilibriumResult,
    epsilon: f64,
) -> WardropReport {
    let g = game.graph();
    let mut edge_flows = vec![0.0; g.edge_count()];
    let mut infeasible = 0;
    let mut max_rate_error = 0.0f64;
    let mut negative = false;
    for (j, t) in game.types().iter().enumerate() {
        let od = g.od_pairs()[t.od_index];
        let (paths, flows) = match (result.paths.get(j), result.path_flows.get(j)) {
            (Some(p), Some(f)) if p.len() == f.len() => (p, f),
            _ => {
                infeasible += 1;
                continue;
            }
        };
        let mut total = 0.0;
        for (p, &f) in paths.iter().zip(flows) {
            negative |= f < -epsilon;
            total += f;
            let in_set = p.iter().all(|e| t.info_set.contains(e));
            let verts = path_vertices(g, od.origin, p);
            let simple = {
                let mut sorted = verts.clone();
                sorted.sort();
                sorted.dedup();
                sorted.len() == verts.len()
            };
            if f > FLOW_EPSILON && !(in_set && simple && verts.last() == Some(&od.destination)) {
                infeasible += 1;
            }
            for e in p {
                edge_flows[e.0] += f;
            }
        }
        max_rate_error = max_rate_error.max((total - t.rate).abs());
    }
    let mut per_type = Vec::with_capacity(game.types().len());
    for (j, t) in game.types().iter().enumerate() {
        let od = g.od_pairs()[t.od_index];
        let best = enumerate_simple_paths(g, od.origin, od.destination, &t.info_set)
            .unwrap_or_default()
            .iter()
            .map(|p| game.path_latency(p, &edge_flows))
            .fold(f64::INFINITY, f64::min);
        let mut gap = 0.0f64;
        if let (Some(paths), Some(flows)) = (result.paths.get(j), result.path_flows.get(j)) {
            for (p, &f) in paths.iter().zip(flows) {
                if f > FLOW_EPSILON {
                    gap = gap.max(game.path_latency(p, &edge_flows) - best);
                }
            }
        }
        per_type.push(gap);
    }
    let max_violation = per_type.iter().copied().fold(0.0, f64::max);
    let rate_scale = 1.0 + game.total_rate();
    WardropReport {
        passed: max_violation <= epsilon
            && max_rate_error <= 1e-9 * rate_scale
            && infeasible == 0
            && !negative,
        per_type,
        max_violation,
        max_rate_error,
        infeasible_paths: infeasible,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{solve_icwe, LatencyFunction, RoutingGame, TravelerType, DEFAULT_TOLERANCE};
    use super::*;
    use crate::fixtures;

    fn pigou() -> RoutingGame {
        let g = fixtures::pigou();
        RoutingGame::new(
            g.clone(),
            vec![
                LatencyFunction::affine(0.0, 1.0).unwrap(),
                LatencyFunction::affine(1.0, 0.0).unwrap(),
            ],
            vec![TravelerType::new(1.0, 0, g.all_edges())],
        )
        .unwrap()
    }

    #[test]
    fn accepts_solver_output() {
        let game = pigou();
        let r = solve_icwe(&game, DEFAULT_TOLERANCE, 10_000).unwrap();
        assert!(verify_wardrop(&game, &r, 1e-8).passed);
    }

    #[test]
    fn rejects_tampered_flows() {
        let game = pigou();
        let mut r = solve_icwe(&game, DEFAULT_TOLERANCE, 10_000).unwrap();
        r.path_flows[0] = vec![0.2, 0.8];
        let report = verify_wardrop(&game, &r, 1e-8);
        assert!(!report.passed);
        assert!((report.max_violation - 0.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_omitted_cheaper_path() {
        let game = pigou();
        let mut r = solve_icwe(&game, DEFAULT_TOLERANCE, 10_000).unwrap();
        r.paths[0] = vec![r.paths[0][1].clone()];
        r.path_flows[0] = vec![1.0];
        assert!(!verify_wardrop(&game, &r, 1e-8).passed);
    }

    #[test]
    fn rejects_rate_mismatch() {
        let game = pigou();
        let mut r = solve_icwe(&game, DEFAULT_TOLERANCE, 10_000).unwrap();
        r.path_flows[0][0] = 0.5;
        assert!(verify_wardrop(&game, &r, 1e-8).max_rate_error > 0.4);
    }
}
