//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails or exceeds its time budget.

use std::time::{Duration, Instant};

use ibp_cli::commands::demo_report;
use ibp_cli::{exit, invoke};
use ibp_core::equilibrium::{
    check_series_decomposition, feasible_paths, verify_wardrop, ActiveSet, ConditionalGradient,
    EquilibriumSolver, RoutingGame, SolveOptions, StartPoint,
};
use ibp_core::fixtures::{self, F1Variant};
use ibp_core::generators::{random_affine_game, random_sli_chain_game, random_two_connected};
use ibp_core::graph::is_cycle_graph;
use ibp_core::paradox::{
    check_ibp, check_ibp_with, cycle_diagnostics, f1_instance, find_f1_embedding, lift_instance,
    random_search_ibp, synthesize_ibp_witness, SearchConfig, DEFAULT_DECISION_THRESHOLD,
};
use ibp_core::paths::PathCap;
use ibp_core::topology::{classify_single_od, decide_ibp_free, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn flow_of(table: &[(String, f64)], path: &str) -> f64 {
    table
        .iter()
        .find(|(p, _)| p == path)
        .map_or(f64::NAN, |(_, f)| *f)
}

fn gadget_reproduction() -> Outcome {
    let report = demo_report().map_err(|e| e.to_string())?;
    for v in &report.variants {
        let name = format!("{:?}", v.variant);
        ensure(close(v.verdict.latency_before, 47.0, 1e-6), || {
            format!("{name}: latency before {}", v.verdict.latency_before)
        })?;
        ensure(close(v.verdict.latency_after, 48.0, 1e-6), || {
            format!("{name}: latency after {}", v.verdict.latency_after)
        })?;
        let own = &v.flows_after[0];
        ensure(
            close(flow_of(own, "e2 e4"), 3.0, 1e-6) && close(flow_of(own, "e2 e3"), 2.0, 1e-6),
            || format!("{name}: type 0 flows {own:?}"),
        )?;
        let (stay, switch) = match v.variant {
            F1Variant::Origin2AtOrigin1 => ("e1 e4", "e2"),
            F1Variant::Origin2AtDestination1 => ("e4", "e1 e2"),
        };
        let other = &v.flows_after[1];
        ensure(
            close(flow_of(other, stay), 4.0, 1e-6) && close(flow_of(other, switch), 1.0, 1e-6),
            || format!("{name}: type 1 flows {other:?}"),
        )?;
    }
    let run = invoke(["ibp", "demo"]);
    ensure(run.code == exit::OK, || {
        format!("demo exited with {}", run.code)
    })?;
    ensure(run.stdout.matches("48.0000000").count() == 2, || {
        "demo text lacks 48".into()
    })?;
    Ok("47 -> 48 for both placements; flows (3, 2) and (4, 1)".into())
}

fn classification_ground_truth() -> Outcome {
    let budget = Duration::from_secs(1);
    let timed = |f: &dyn Fn() -> Result<(), String>| -> Result<(), String> {
        let t = Instant::now();
        f()?;
        ensure(t.elapsed() < budget, || {
            format!("one classification took {:?}", t.elapsed())
        })
    };
    for variant in F1Variant::ALL {
        timed(&|| {
            let r = decide_ibp_free(&fixtures::f1_graph(variant)).map_err(|e| e.to_string())?;
            ensure(r.verdict == Verdict::NotIbpFree, || {
                format!("F1 {variant:?} classified IBP-free")
            })
        })?;
    }
    timed(&|| {
        let r = decide_ibp_free(&fixtures::triangle_two_od()).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::IbpFree, || {
            "triangle not IBP-free".into()
        })
    })?;
    timed(&|| {
        let c = classify_single_od(&fixtures::series_of_parallel_pairs(), 0, PathCap::default())
            .map_err(|e| e.to_string())?;
        ensure(c.is_sli && !c.is_li, || {
            format!("series of parallel pairs: {c:?}")
        })
    })?;
    timed(&|| {
        let c = classify_single_od(&fixtures::parallel_doubling(), 0, PathCap::default())
            .map_err(|e| e.to_string())?;
        ensure(c.is_sp && !c.is_sli, || format!("parallel doubling: {c:?}"))
    })?;
    Ok("F1 not immune, triangle immune, SLI-not-LI and SP-not-SLI fixtures".into())
}

fn constructive_necessity() -> Outcome {
    let mut margins = Vec::new();
    for (name, g) in [
        ("F1", fixtures::f1_graph(F1Variant::Origin2AtOrigin1)),
        ("K4", fixtures::k4_three_terminals()),
        ("chain", fixtures::chain_with_f1_middle()),
    ] {
        let w = synthesize_ibp_witness(&g).map_err(|e| format!("{name}: {e}"))?;
        // re-check with the exact backend, independent of the synthesis check
        let exact = check_ibp_with(
            &w.instance,
            &ActiveSet,
            &SolveOptions::default(),
            DEFAULT_DECISION_THRESHOLD,
        )
        .map_err(|e| format!("{name}: {e}"))?;
        ensure(w.verdict.margin > 1e-4 && exact.margin > 1e-4, || {
            format!("{name}: margins {} / {}", w.verdict.margin, exact.margin)
        })?;
        margins.push(format!("{name} {:.6}", exact.margin));
    }
    Ok(format!("margins: {}", margins.join(", ")))
}

fn cycle_immunity() -> Outcome {
    let pairs = [(0, 3), (1, 4), (2, 5), (4, 1), (5, 3)];
    let mut refuted = 0;
    for k in 2..=5 {
        let g = fixtures::cycle(6, &pairs[..k]);
        let cfg = SearchConfig {
            trials: 1000,
            seed: 2024 + k as u64,
            ..SearchConfig::default()
        };
        let report = random_search_ibp(&g, &cfg).map_err(|e| e.to_string())?;
        ensure(
            report.trials_run == 1000 || report.witness.is_some(),
            || "search stopped early".into(),
        )?;
        if let Some(hit) = report.witness {
            let d = cycle_diagnostics(&hit.instance, &hit.verdict.before, &hit.verdict.after)
                .map_err(|e| e.to_string())?;
            ensure(d.refuted, || {
                format!("{k} OD pairs: unrefuted witness at trial {}", hit.trial)
            })?;
            refuted += 1;
        }
    }
    Ok(format!(
        "4 x 1000 trials, {refuted} candidates (all refuted)"
    ))
}

fn random_corpus(seed_base: u64, wanted: usize, max_paths: usize) -> Vec<RoutingGame> {
    let mut out = Vec::new();
    for seed in seed_base.. {
        if out.len() == wanted || seed > seed_base + 10_000 {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = random_affine_game(&random_two_connected(&mut rng, 2), &mut rng);
        let paths: usize = (0..game.types().len())
            .map(|j| feasible_paths(&game, j, PathCap::default()).map_or(usize::MAX, |p| p.len()))
            .sum();
        if paths <= max_paths {
            out.push(game);
        }
    }
    out
}

fn solver_soundness() -> Outcome {
    let games = random_corpus(0, 60, 12);
    ensure(games.len() >= 50, || format!("only {} games", games.len()))?;
    let opts = SolveOptions::default().with_tolerance(1e-11);
    let mut worst = 0.0f64;
    for (i, game) in games.iter().enumerate() {
        let cg = ConditionalGradient
            .solve(game, &opts)
            .map_err(|e| format!("game {i}: {e}"))?;
        let exact = ActiveSet
            .solve(game, &opts)
            .map_err(|e| format!("game {i}: {e}"))?;
        for (a, b) in cg.edge_latencies.iter().zip(&exact.edge_latencies) {
            worst = worst.max((a - b).abs());
        }
        ensure(worst <= 1e-6, || {
            format!("game {i}: edge latency gap {worst:e}")
        })?;
        for r in [&cg, &exact] {
            let w = verify_wardrop(game, r, 1e-8);
            ensure(w.passed, || format!("game {i} ({}): {w:?}", r.solver))?;
        }
    }
    Ok(format!(
        "{} games, max edge latency gap {worst:.2e}",
        games.len()
    ))
}

fn essential_uniqueness() -> Outcome {
    let games = random_corpus(50_000, 20, usize::MAX);
    ensure(games.len() == 20, || "corpus too small".into())?;
    let mut worst = 0.0f64;
    for (i, game) in games.iter().enumerate() {
        let runs: Vec<Vec<f64>> = (0..5u64)
            .map(|s| {
                let opts = SolveOptions::default()
                    .with_tolerance(1e-11)
                    .with_start(StartPoint::Random(1000 * i as u64 + s));
                ConditionalGradient
                    .solve(game, &opts)
                    .map(|r| r.edge_latencies)
                    .map_err(|e| format!("game {i}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        for e in 0..runs[0].len() {
            let (lo, hi) = runs
                .iter()
                .map(|r| r[e])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x), hi.max(x))
                });
            worst = worst.max(hi - lo);
        }
    }
    ensure(worst <= 1e-5, || format!("spread {worst:e}"))?;
    Ok(format!("20 games x 5 starts, max spread {worst:.2e}"))
}

fn series_decomposition() -> Outcome {
    let opts = SolveOptions::default().with_tolerance(1e-11);
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let game = random_sli_chain_game(&mut ChaCha8Rng::seed_from_u64(seed));
        let check = check_series_decomposition(&game, &ConditionalGradient, &opts, 1e-6)
            .map_err(|e| format!("chain {seed}: {e}"))?;
        worst = worst.max(check.max_gap);
        ensure(check.holds, || format!("chain {seed}: {check:?}"))?;
    }
    Ok(format!("10 chains, max gap {worst:.2e}"))
}

fn lift_soundness() -> Outcome {
    let mut pairs = 0;
    let mut nontrivial = 0;
    let mut worst = 0.0f64;
    for seed in 0.. {
        if pairs == 10 {
            break;
        }
        ensure(seed < 1000, || format!("only {pairs} corpus pairs"))?;
        let g = random_two_connected(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        if is_cycle_graph(&g) {
            continue;
        }
        let steps = find_f1_embedding(&g).map_err(|e| format!("seed {seed}: {e}"))?;
        for variant in F1Variant::ALL {
            let source = f1_instance(variant);
            let Ok(lifted) = lift_instance(&g, &steps, &source) else {
                continue;
            };
            let before =
                check_ibp(&source, 1e-11, DEFAULT_DECISION_THRESHOLD).map_err(|e| e.to_string())?;
            let after =
                check_ibp(&lifted, 1e-11, DEFAULT_DECISION_THRESHOLD).map_err(|e| e.to_string())?;
            ensure(before.occurs == after.occurs, || {
                format!("seed {seed}: occurrence changed")
            })?;
            worst = worst.max((before.margin - after.margin).abs());
            ensure(worst <= 1e-6, || {
                format!("seed {seed}: margin gap {worst:e}")
            })?;
            pairs += 1;
            nontrivial += usize::from(!steps.is_empty());
            break;
        }
    }
    Ok(format!(
        "{pairs} pairs ({nontrivial} with embedding steps), max margin gap {worst:.2e}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "gadget reproduction",
            Duration::from_secs(1),
            gadget_reproduction,
        ),
        (
            "classification ground truth",
            Duration::from_secs(5),
            classification_ground_truth,
        ),
        (
            "constructive necessity",
            Duration::from_secs(5),
            constructive_necessity,
        ),
        ("cycle immunity", Duration::from_secs(60), cycle_immunity),
        (
            "solver soundness",
            Duration::from_secs(60),
            solver_soundness,
        ),
        (
            "essential uniqueness",
            Duration::from_secs(60),
            essential_uniqueness,
        ),
        (
            "series decomposition",
            Duration::from_secs(30),
            series_decomposition,
        ),
        ("lift soundness", Duration::from_secs(10), lift_soundness),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > *budget {
                Err(format!("{detail}; exceeded {budget:?}"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!(
                "PASS {} {name}: {detail} [{:.3}s]",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL {} {name}: {why} [{:.3}s]",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
