use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_ibp_with, IbpInstance, IbpVerdict, ParadoxError, DEFAULT_DECISION_THRESHOLD};
use crate::equilibrium::{
    ConditionalGradient, LatencyFunction, RoutingGame, SolveOptions, TravelerType,
    DEFAULT_TOLERANCE,
};
use crate::graph::{EdgeSet, MultiGraph, Path};
use crate::paths::enumerate_simple_paths;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub trials: usize,
    pub seed: u64,
    pub rate_range: RangeInclusive<u32>,
    pub constant_range: RangeInclusive<u32>,
    pub slope_range: RangeInclusive<u32>,
    pub tolerance: f64,
    pub decision_threshold: f64,
    pub max_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            rate_range: 1..=10,
            constant_range: 0..=25,
            slope_range: 0..=4,
            tolerance: DEFAULT_TOLERANCE,
            decision_threshold: DEFAULT_DECISION_THRESHOLD,
            max_iterations: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    pub trial: usize,
    pub instance: IbpInstance,
    pub verdict: IbpVerdict,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub trials_run: usize,
    /// One line per trial, identical for identical seeds.
    pub transcript: Vec<String>,
    pub witness: Option<SearchHit>,
}

/// Samples games on `g` and stops at the first one where IBP occurs.
///
/// Each trial draws integer affine latencies and one type per OD pair with an
/// integer rate. Type 0 knows exactly one random OD path, and the extension
/// reveals the missing edges of a second random OD path. Every other type
/// knows one random OD path plus each remaining edge with probability 3/4.
/// Trial `t` uses stream `t` of a ChaCha8 generator seeded with `seed`, so
/// any trial can be replayed on its own.
pub fn random_search_ibp(
    g: &MultiGraph,
    config: &SearchConfig,
) -> Result<SearchReport, ParadoxError> {
    let report = g.validate();
    if !report.is_valid() {
        return Err(ParadoxError::PreconditionViolated(
            report.describe(g).join("; "),
        ));
    }
    let od_paths: Vec<Vec<Path>> = (0..g.od_pairs().len())
        .map(|k| {
            let od = g.od_pairs()[k];
            enumerate_simple_paths(g, od.origin, od.destination, &g.all_edges())
        })
        .collect::<Result<_, _>>()?;
    let options = SolveOptions::default()
        .with_tolerance(config.tolerance)
        .with_max_iterations(config.max_iterations);
    let mut transcript = Vec::new();
    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial as u64);
        let Some(instance) = sample(g, &od_paths, config, &mut rng) else {
            transcript.push(format!(
                "trial {trial}: skipped, OD pair 0 has a single path"
            ));
            continue;
        };
        match check_ibp_with(
            &instance,
            &ConditionalGradient,
            &options,
            config.decision_threshold,
        ) {
            Ok(verdict) => {
                transcript.push(format!(
                    "trial {trial}: before {:.9e} after {:.9e} margin {:.9e} {:?}",
                    verdict.latency_before, verdict.latency_after, verdict.margin, verdict.outcome
                ));
                if verdict.occurs {
                    return Ok(SearchReport {
                        trials_run: trial + 1,
                        transcript,
                        witness: Some(SearchHit {
                            trial,
                            instance,
                            verdict,
                        }),
                    });
                }
            }
            Err(e) => transcript.push(format!("trial {trial}: solver error: {e}")),
        }
    }
    Ok(SearchReport {
        trials_run: config.trials,
        transcript,
        witness: None,
    })
}

fn sample(
    g: &MultiGraph,
    od_paths: &[Vec<Path>],
    config: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Option<IbpInstance> {
    let latencies: Vec<LatencyFunction> = g
        .edge_ids()
        .map(|_| {
            let c = rng.gen_range(config.constant_range.clone());
            let s = rng.gen_range(config.slope_range.clone());
            LatencyFunction::affine(c as f64, s as f64).expect("nonnegative grid values")
        })
        .collect();
    let mut known_path = 0;
    let types: Vec<TravelerType> = od_paths
        .iter()
        .enumerate()
        .map(|(k, paths)| {
            let rate = rng.gen_range(config.rate_range.clone()) as f64;
            let pick = rng.gen_range(0..paths.len());
            let mut info: EdgeSet = paths[pick].iter().copied().collect();
            if k == 0 {
                known_path = pick;
            } else {
                for e in g.edge_ids() {
                    if rng.gen_bool(0.75) {
                        info.insert(e);
                    }
                }
            }
            TravelerType::new(rate, k, info)
        })
        .collect();
    let alternatives = od_paths[0].len() - 1;
    if alternatives == 0 {
        return None;
    }
    let mut other = rng.gen_range(0..alternatives);
    if other >= known_path {
        other += 1;
    }
    let added: EdgeSet = od_paths[0][other]
        .iter()
        .copied()
        .filter(|e| !types[0].info_set.contains(e))
        .collect();
    let game = RoutingGame::new(g.clone(), latencies, types).expect("sampled game is well-formed");
    IbpInstance::new(game, added).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, F1Variant};

    #[test]
    fn zero_trials_finds_nothing() {
        let cfg = SearchConfig {
            trials: 0,
            ..SearchConfig::default()
        };
        let r = random_search_ibp(&fixtures::f1_graph(F1Variant::Origin2AtOrigin1), &cfg).unwrap();
        assert!(r.witness.is_none());
        assert!(r.transcript.is_empty());
    }

    #[test]
    fn transcripts_are_reproducible() {
        let cfg = SearchConfig {
            trials: 25,
            seed: 11,
            ..SearchConfig::default()
        };
        let g = fixtures::cycle(4, &[(0, 2), (1, 3)]);
        let a = random_search_ibp(&g, &cfg).unwrap();
        let b = random_search_ibp(&g, &cfg).unwrap();
        assert_eq!(a.transcript, b.transcript);
        let other = random_search_ibp(&g, &SearchConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.transcript, other.transcript);
    }

    #[test]
    fn finds_witness_on_f1() {
        let g = fixtures::f1_graph(F1Variant::Origin2AtOrigin1);
        let r = random_search_ibp(&g, &SearchConfig::default()).unwrap();
        let hit = r.witness.expect("witness within the default budget");
        assert!(hit.verdict.margin > DEFAULT_DECISION_THRESHOLD);
    }
}
