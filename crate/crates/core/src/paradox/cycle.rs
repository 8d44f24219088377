use serde::Serialize;

use super::{IbpInstance, ParadoxError};
use crate::equilibrium::{EquilibriumResult, FLOW_EPSILON};
use crate::graph::{is_cycle_graph, Path};

const SLACK: f64 = 1e-9;

/// Two necessary conditions for IBP on a cycle, evaluated on a pair of
/// equilibria.
///
/// Every OD pair of a cycle has two paths. For type 0, `α` is the path it
/// uses before the extension; for the other types `α` is the path whose flow
/// does not grow. The switched rate of a type is the flow that leaves `α`.
/// Types that know only one path, or switch no flow, are fixed loads and are
/// left out. If IBP occurs then for every remaining type `i`:
///
/// * `ℓ_α(f) < ℓ_α(f̃)`: its `α` path gets strictly slower, and
/// * its switched rate is below the sum of the others' switched rates.
///
/// A failed condition refutes a claimed witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleDiagnostics {
    /// Whether the extension gives type 0 a second path at all.
    pub extension_changes_paths: bool,
    pub types: Vec<usize>,
    pub alpha: Vec<Path>,
    pub switched_rates: Vec<f64>,
    pub alpha_latency_before: Vec<f64>,
    pub alpha_latency_after: Vec<f64>,
    pub slower_alpha: Vec<bool>,
    pub rate_condition: Vec<bool>,
    pub refuted: bool,
}

pub fn cycle_diagnostics(
    instance: &IbpInstance,
    before: &EquilibriumResult,
    after: &EquilibriumResult,
) -> Result<CycleDiagnostics, ParadoxError> {
    let game = &instance.game;
    let g = game.graph();
    if !is_cycle_graph(g) {
        return Err(ParadoxError::NotACycle);
    }
    let n = game.types().len();
    let mut seen = vec![false; g.od_pairs().len()];
    for t in game.types() {
        if std::mem::replace(&mut seen[t.od_index], true) {
            return Err(ParadoxError::NotNormalForm(
                "two types share an OD pair".into(),
            ));
        }
    }
    if before.paths.len() != n || after.paths.len() != n {
        return Err(ParadoxError::NotNormalForm(
            "results do not match the type list".into(),
        ));
    }
    let flow = |r: &EquilibriumResult, j: usize, p: &Path| -> f64 {
        r.paths[j]
            .iter()
            .position(|q| q == p)
            .map_or(0.0, |k| r.path_flows[j][k])
    };
    let cost =
        |r: &EquilibriumResult, p: &Path| -> f64 { p.iter().map(|e| r.edge_latencies[e.0]).sum() };

    let mut report = CycleDiagnostics {
        extension_changes_paths: before.paths[0] != after.paths[0],
        types: Vec::new(),
        alpha: Vec::new(),
        switched_rates: Vec::new(),
        alpha_latency_before: Vec::new(),
        alpha_latency_after: Vec::new(),
        slower_alpha: Vec::new(),
        rate_condition: Vec::new(),
        refuted: false,
    };
    if !report.extension_changes_paths {
        report.refuted = true;
        return Ok(report);
    }
    if before.paths[0].len() != 1 || after.paths[0].len() != 2 {
        return Err(ParadoxError::NotNormalForm(
            "type 0 must gain its second path through the extension".into(),
        ));
    }
    for j in 0..n {
        if j > 0 && before.paths[j] != after.paths[j] {
            return Err(ParadoxError::NotNormalForm(format!(
                "type {j} has different path sets"
            )));
        }
        let alpha = if j == 0 {
            before.paths[0][0].clone()
        } else {
            match before.paths[j].as_slice() {
                [p, q] => {
                    if flow(before, j, p) >= flow(after, j, p) {
                        p.clone()
                    } else {
                        q.clone()
                    }
                }
                _ => continue,
            }
        };
        let switched = flow(before, j, &alpha) - flow(after, j, &alpha);
        if j > 0 && switched <= FLOW_EPSILON {
            continue;
        }
        report.types.push(j);
        report.alpha_latency_before.push(cost(before, &alpha));
        report.alpha_latency_after.push(cost(after, &alpha));
        report.alpha.push(alpha);
        report.switched_rates.push(switched);
    }
    let total: f64 = report.switched_rates.iter().sum();
    for k in 0..report.types.len() {
        let (l, lt) = (
            report.alpha_latency_before[k],
            report.alpha_latency_after[k],
        );
        report.slower_alpha.push(lt - l > SLACK * (1.0 + l.abs()));
        let r = report.switched_rates[k];
        report
            .rate_condition
            .push(total - r - r > SLACK * (1.0 + total));
    }
    report.refuted = report
        .slower_alpha
        .iter()
        .chain(&report.rate_condition)
        .any(|ok| !ok);
    Ok(report)
}
