use nalgebra::{DMatrix, DVector};

use super::{
    all_feasible_paths, edge_flows_of, EquilibriumResult, EquilibriumSolver, RoutingGame,
    SolveError, SolveOptions,
};

/// Largest number of feasible paths, summed over positive-rate types, the
/// exact solver accepts.
pub const ACTIVE_SET_MAX_PATHS: usize = 12;

/// Exact solver for affine latencies by support enumeration.
///
/// For a candidate support it solves the linear system "every used path of a
/// type has that type's common latency, flows sum to the rate" and accepts the
/// first support whose solution is nonnegative with no cheaper unused path.
/// Supports are tried by size, then by bitmask.
#[derive(Clone, Copy, Debug, Default)]
pub struct ActiveSet;

impl EquilibriumSolver for ActiveSet {
    fn name(&self) -> &'static str {
        "active-set"
    }

    fn solve(
        &self,
        game: &RoutingGame,
        options: &SolveOptions,
    ) -> Result<EquilibriumResult, SolveError> {
        if !game.is_affine() {
            return Err(SolveError::NotApplicable {
                solver: self.name(),
                reason: "latencies must be affine".into(),
            });
        }
        let paths = all_feasible_paths(game, options.path_cap)?;
        let active: Vec<usize> = (0..game.types().len())
            .filter(|&j| game.types()[j].rate > 0.0)
            .collect();
        let columns: Vec<(usize, usize)> = active
            .iter()
            .flat_map(|&j| (0..paths[j].len()).map(move |k| (j, k)))
            .collect();
        if columns.len() > ACTIVE_SET_MAX_PATHS {
            return Err(SolveError::NotApplicable {
                solver: self.name(),
                reason: format!(
                    "{} feasible paths exceed the limit of {ACTIVE_SET_MAX_PATHS}",
                    columns.len()
                ),
            });
        }
        let parts: Vec<(f64, f64)> = game
            .latencies()
            .iter()
            .map(|l| l.affine_parts().expect("affine"))
            .collect();
        let shared_slope = |a: &[crate::graph::EdgeId], b: &[crate::graph::EdgeId]| -> f64 {
            a.iter()
                .filter(|e| b.contains(e))
                .map(|e| parts[e.0].1)
                .sum()
        };

        let type_mask: Vec<u32> = active
            .iter()
            .map(|&j| {
                columns
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.0 == j)
                    .fold(0u32, |m, (i, _)| m | (1 << i))
            })
            .collect();
        let mut supports: Vec<u32> = (1u32..(1u32 << columns.len()))
            .filter(|m| type_mask.iter().all(|t| m & t != 0))
            .collect();
        supports.sort_by_key(|m| (m.count_ones(), *m));

        let mut tried = 0;
        for mask in supports {
            tried += 1;
            let used: Vec<usize> = (0..columns.len())
                .filter(|i| mask & (1 << i) != 0)
                .collect();
            let n = used.len() + active.len();
            let mut a = DMatrix::<f64>::zeros(n, n);
            let mut b = DVector::<f64>::zeros(n);
            for (row, &ci) in used.iter().enumerate() {
                let (j, k) = columns[ci];
                let p = &paths[j][k];
                for (col, &cj) in used.iter().enumerate() {
                    let (j2, k2) = columns[cj];
                    a[(row, col)] = shared_slope(p, &paths[j2][k2]);
                }
                let t = active.iter().position(|&x| x == j).expect("active type");
                a[(row, used.len() + t)] = -1.0;
                b[row] = -p.iter().map(|e| parts[e.0].0).sum::<f64>();
            }
            for (t, &j) in active.iter().enumerate() {
                let row = used.len() + t;
                for (col, &ci) in used.iter().enumerate() {
                    if columns[ci].0 == j {
                        a[(row, col)] = 1.0;
                    }
                }
                b[row] = game.types()[j].rate;
            }
            let scale = a.amax().max(1.0);
            if a.clone().svd(false, false).rank(1e-10 * scale) < n {
                continue;
            }
            let Some(x) = a.lu().solve(&b) else {
                continue;
            };
            let eps = 1e-9 * (1.0 + b.amax());
            if used.iter().enumerate().any(|(i, _)| x[i] < -eps) {
                continue;
            }
            let mut flows: Vec<Vec<f64>> = paths.iter().map(|ps| vec![0.0; ps.len()]).collect();
            for (i, &ci) in used.iter().enumerate() {
                let (j, k) = columns[ci];
                flows[j][k] = x[i].max(0.0);
            }
            let edge_flows = edge_flows_of(game, &paths, &flows);
            let consistent = active.iter().enumerate().all(|(t, &j)| {
                let level = x[used.len() + t];
                let tol = 1e-9 * (1.0 + level.abs());
                paths[j].iter().enumerate().all(|(k, p)| {
                    let cost = game.path_latency(p, &edge_flows);
                    let is_used = used.iter().any(|&ci| columns[ci] == (j, k));
                    if is_used {
                        (cost - level).abs() <= tol
                    } else {
                        cost >= level - tol
                    }
                })
            });
            if consistent {
                return Ok(EquilibriumResult::assemble(
                    game,
                    self.name(),
                    paths,
                    flows,
                    tried,
                    options.flow_epsilon,
                ));
            }
        }
        if active.is_empty() {
            let flows = paths.iter().map(|ps| vec![0.0; ps.len()]).collect();
            return Ok(EquilibriumResult::assemble(
                game,
                self.name(),
                paths,
                flows,
                0,
                options.flow_epsilon,
            ));
        }
        Err(SolveError::DidNotConverge {
            iterations: tried,
            violation: f64::INFINITY,
        })
    }
}
