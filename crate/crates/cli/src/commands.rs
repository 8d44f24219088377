use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use ibp_core::equilibrium::{
    ActiveSet, EquilibriumResult, SolveError, SolveOptions, SolverRegistry,
};
use ibp_core::fixtures::F1Variant;
use ibp_core::graph::MultiGraph;
use ibp_core::paradox::{
    check_ibp_with, f1_instance, random_search_ibp, synthesize_ibp_witness, IbpOutcome, IbpVerdict,
    ParadoxError, SearchConfig,
};
use ibp_core::topology::{
    decide_ibp_free, BlockKind, ClassWitness, FailureSite, PairwiseEntry, TopologyError,
    TopologyReport, Verdict,
};
use serde::Serialize;
use thiserror::Error;

use crate::format::{edge_list, equilibrium, num, table, vertex};
use crate::instance::{load_model, InstanceError, InstanceFile, Model};

pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const UNSUPPORTED: i32 = 4;
    pub const NOT_IBP_FREE: i32 = 10;
    pub const IBP_OCCURS: i32 = 20;
    pub const IBP_INCONCLUSIVE: i32 = 21;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Instance {
        path: PathBuf,
        source: InstanceError,
    },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Paradox(#[from] ParadoxError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Instance { .. } | CliError::Topology(_) => exit::INPUT,
            CliError::Solve(SolveError::UnknownSolver(_)) => exit::INPUT,
            CliError::Solve(_) | CliError::Paradox(ParadoxError::Solve(_)) => exit::SOLVER,
            CliError::Paradox(
                ParadoxError::Topology(_) | ParadoxError::Graph(_) | ParadoxError::Game(_),
            ) => exit::INPUT,
            CliError::Paradox(_) => exit::UNSUPPORTED,
        }
    }
}

/// Exit code plus the text destined for standard output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub text: String,
}

impl Report {
    fn new(code: i32, text: String) -> Self {
        Self { code, text }
    }
}

pub fn read_model(path: &Path) -> Result<Model, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    load_model(&text).map_err(|source| CliError::Instance {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// `<dir>/<stem><suffix>` next to `input`.
pub fn sibling_path(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    input.with_file_name(format!("{stem}{suffix}"))
}

pub struct SolverChoice<'a> {
    pub name: &'a str,
    pub options: SolveOptions,
}

pub fn classify(path: &Path, as_json: bool) -> Result<Report, CliError> {
    let model = read_model(path)?;
    let g = model.game.graph();
    let report = decide_ibp_free(g)?;
    let code = match report.verdict {
        Verdict::IbpFree => exit::OK,
        Verdict::NotIbpFree => exit::NOT_IBP_FREE,
    };
    let text = if as_json {
        json(&report)
    } else {
        render_topology(g, &report)
    };
    Ok(Report::new(code, text))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_topology(g: &MultiGraph, report: &TopologyReport) -> String {
    let mut out = format!(
        "network: {} vertices, {} edges, {} OD pairs\n",
        g.vertex_count(),
        g.edge_count(),
        g.od_pairs().len()
    );
    out.push_str("OD subnetworks:\n");
    let rows: Vec<Vec<String>> = report
        .per_od
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let od = g.od_pairs()[i];
            let witness = match &c.witness {
                None => "-".to_string(),
                Some(ClassWitness::OppositeTraversal(w)) => format!(
                    "edge {} crossed both ways by [{}] and [{}]",
                    g.edge_name(w.edge),
                    edge_list(g, w.first.iter().copied()),
                    edge_list(g, w.second.iter().copied())
                ),
                Some(ClassWitness::NonLiBlock { block, path }) => match path {
                    Some(p) => format!(
                        "block B{} path [{}] has no private edge",
                        block.0,
                        edge_list(g, p.iter().copied())
                    ),
                    None => format!("block B{} is not LI", block.0),
                },
                Some(ClassWitness::NoPrivateEdge { path }) => {
                    format!(
                        "path [{}] has no private edge",
                        edge_list(g, path.iter().copied())
                    )
                }
            };
            vec![
                i.to_string(),
                format!("{} -> {}", vertex(g, od.origin), vertex(g, od.destination)),
                yes_no(c.is_sp).into(),
                yes_no(c.is_li).into(),
                yes_no(c.is_sli).into(),
                witness,
            ]
        })
        .collect();
    out.push_str(&table(&["od", "pair", "SP", "LI", "SLI", "witness"], &rows));
    out.push_str("blocks:\n");
    let rows: Vec<Vec<String>> = report
        .blocks
        .blocks
        .iter()
        .map(|b| {
            let vs: Vec<&str> = b.vertices.iter().map(|&v| vertex(g, v)).collect();
            vec![
                format!("B{}", b.id.0),
                edge_list(g, b.edges.iter().copied()),
                vs.join(" "),
            ]
        })
        .collect();
    out.push_str(&table(&["block", "edges", "vertices"], &rows));
    let cuts: Vec<&str> = report
        .blocks
        .cut_vertices
        .iter()
        .map(|&v| vertex(g, v))
        .collect();
    let _ = writeln!(
        out,
        "cut vertices: {}",
        if cuts.is_empty() {
            "(none)".into()
        } else {
            cuts.join(" ")
        }
    );
    out.push_str("chains:\n");
    for (i, chain) in report.blocks.chains.iter().enumerate() {
        let text = match chain {
            Some(links) => links
                .iter()
                .map(|l| {
                    format!(
                        "B{}[{}->{}]",
                        l.block.0,
                        vertex(g, l.entry),
                        vertex(g, l.exit)
                    )
                })
                .collect::<Vec<_>>()
                .join(" "),
            None => "(disconnected)".into(),
        };
        let _ = writeln!(out, "  {i}: {text}");
    }
    out.push_str("pairwise:\n");
    if report.pairwise.is_empty() {
        out.push_str("  (not evaluated)\n");
    }
    for p in &report.pairwise {
        match &p.entry {
            PairwiseEntry::Disjoint => {
                let _ = writeln!(out, "  {}-{}: disjoint", p.i, p.j);
            }
            PairwiseEntry::Shared {
                common,
                induced_is_common_blocks,
            } => {
                let blocks: Vec<String> = common
                    .iter()
                    .map(|c| {
                        let kind = match c.kind {
                            BlockKind::Coincident => "coincident",
                            BlockKind::Cycle => "cycle",
                            BlockKind::Other => "other",
                        };
                        format!(
                            "B{} {kind} ({},{} | {},{})",
                            c.block.0,
                            vertex(g, c.terminals_in_i.0),
                            vertex(g, c.terminals_in_i.1),
                            vertex(g, c.terminals_in_j.0),
                            vertex(g, c.terminals_in_j.1)
                        )
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "  {}-{}: shared {}; overlap within common blocks: {}",
                    p.i,
                    p.j,
                    blocks.join(", "),
                    yes_no(*induced_is_common_blocks)
                );
            }
        }
    }
    let _ = writeln!(out, "verdict: {:?}", report.verdict);
    let site = match report.failure_site {
        None => "(none)".to_string(),
        Some(FailureSite::SliCondition { od_index }) => {
            format!("OD subnetwork {od_index} is not SLI")
        }
        Some(FailureSite::CommonBlock { i, j, block }) => {
            format!(
                "block B{} shared by OD pairs {i} and {j} is neither coincident nor a cycle",
                block.0
            )
        }
        Some(FailureSite::InducedGraph { i, j }) => {
            format!("OD pairs {i} and {j} share edges outside their common blocks")
        }
    };
    let _ = writeln!(out, "failure site: {site}");
    out
}

pub fn solve(path: &Path, solver: &SolverChoice<'_>, as_json: bool) -> Result<Report, CliError> {
    let model = read_model(path)?;
    let registry = SolverRegistry::default();
    let result = registry.solve(solver.name, &model.game, &solver.options)?;
    let text = if as_json {
        json(&result)
    } else {
        let rates: Vec<f64> = model.game.types().iter().map(|t| t.rate).collect();
        equilibrium(model.game.graph(), &rates, &result)
    };
    Ok(Report::new(exit::OK, text))
}

fn outcome_code(outcome: IbpOutcome) -> i32 {
    match outcome {
        IbpOutcome::NotOccurs => exit::OK,
        IbpOutcome::Occurs => exit::IBP_OCCURS,
        IbpOutcome::Inconclusive => exit::IBP_INCONCLUSIVE,
    }
}

fn render_verdict(v: &IbpVerdict) -> String {
    format!(
        "type 0 latency before: {}\ntype 0 latency after:  {}\nmargin: {}\nverdict: {:?}\n",
        num(v.latency_before),
        num(v.latency_after),
        num(v.margin),
        v.outcome
    )
}

pub fn check_ibp(
    path: &Path,
    solver: &SolverChoice<'_>,
    threshold: f64,
    as_json: bool,
) -> Result<Report, CliError> {
    let model = read_model(path)?;
    let instance = model.ibp_instance().map_err(|source| CliError::Instance {
        path: path.to_path_buf(),
        source,
    })?;
    let registry = SolverRegistry::default();
    let backend = registry
        .get(solver.name)
        .ok_or_else(|| SolveError::UnknownSolver(solver.name.to_string()))?;
    let verdict = check_ibp_with(&instance, backend, &solver.options, threshold)?;
    let text = if as_json {
        json(&verdict)
    } else {
        let g = instance.game.graph();
        format!(
            "extension: type 0 learns {}\n{}",
            edge_list(g, instance.extension.added_edges.iter().copied()),
            render_verdict(&verdict)
        )
    };
    Ok(Report::new(outcome_code(verdict.outcome), text))
}

#[derive(Serialize)]
struct SynthesisSummary<'a> {
    output: String,
    block: usize,
    od_pairs: (usize, usize),
    variant: F1Variant,
    steps: &'a [ibp_core::embedding::EmbeddingStep],
    latency_before: f64,
    latency_after: f64,
    margin: f64,
}

pub fn synthesize(path: &Path, out: Option<&Path>, as_json: bool) -> Result<Report, CliError> {
    let model = read_model(path)?;
    let witness = synthesize_ibp_witness(model.game.graph())?;
    let target = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| sibling_path(path, ".witness.json"));
    write_file(
        &target,
        &InstanceFile::from_ibp_instance(&witness.instance).to_json(),
    )?;
    let summary = SynthesisSummary {
        output: target.display().to_string(),
        block: witness.block.0,
        od_pairs: witness.od_pairs,
        variant: witness.variant,
        steps: &witness.steps,
        latency_before: witness.verdict.latency_before,
        latency_after: witness.verdict.latency_after,
        margin: witness.verdict.margin,
    };
    let text = if as_json {
        json(&summary)
    } else {
        let steps: Vec<String> = witness.steps.iter().map(|s| format!("{s}")).collect();
        format!(
            "failing block: B{} shared by OD pairs {} and {}\ngadget variant: {:?}\nembedding steps: {}\nwitness written to {}\n{}",
            summary.block,
            summary.od_pairs.0,
            summary.od_pairs.1,
            summary.variant,
            if steps.is_empty() { "(none)".to_string() } else { steps.join(", ") },
            summary.output,
            render_verdict(&witness.verdict)
        )
    };
    Ok(Report::new(exit::OK, text))
}

pub struct SearchArgs {
    pub trials: usize,
    pub seed: u64,
    pub rates: RangeInclusive<u32>,
    pub constants: RangeInclusive<u32>,
    pub slopes: RangeInclusive<u32>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub threshold: f64,
    pub out: Option<PathBuf>,
    pub transcript: bool,
}

#[derive(Serialize)]
struct SearchSummary {
    seed: u64,
    trials_run: usize,
    witness: Option<SearchWitness>,
    transcript: Vec<String>,
}

#[derive(Serialize)]
struct SearchWitness {
    trial: usize,
    output: String,
    latency_before: f64,
    latency_after: f64,
    margin: f64,
}

pub fn search(path: &Path, args: &SearchArgs, as_json: bool) -> Result<Report, CliError> {
    let model = read_model(path)?;
    let config = SearchConfig {
        trials: args.trials,
        seed: args.seed,
        rate_range: args.rates.clone(),
        constant_range: args.constants.clone(),
        slope_range: args.slopes.clone(),
        tolerance: args.tolerance,
        decision_threshold: args.threshold,
        max_iterations: args.max_iterations,
    };
    let report = random_search_ibp(model.game.graph(), &config)?;
    let witness = match &report.witness {
        Some(hit) => {
            let target = args
                .out
                .clone()
                .unwrap_or_else(|| sibling_path(path, ".search-witness.json"));
            write_file(
                &target,
                &InstanceFile::from_ibp_instance(&hit.instance).to_json(),
            )?;
            Some(SearchWitness {
                trial: hit.trial,
                output: target.display().to_string(),
                latency_before: hit.verdict.latency_before,
                latency_after: hit.verdict.latency_after,
                margin: hit.verdict.margin,
            })
        }
        None => None,
    };
    let code = if witness.is_some() {
        exit::IBP_OCCURS
    } else {
        exit::OK
    };
    let summary = SearchSummary {
        seed: args.seed,
        trials_run: report.trials_run,
        witness,
        transcript: report.transcript,
    };
    if as_json {
        return Ok(Report::new(code, json(&summary)));
    }
    let mut text = String::new();
    if args.transcript {
        for line in &summary.transcript {
            let _ = writeln!(text, "{line}");
        }
    }
    let _ = writeln!(
        text,
        "seed: {}\ntrials run: {}",
        summary.seed, summary.trials_run
    );
    match &summary.witness {
        Some(w) => {
            let _ = writeln!(
                text,
                "witness found at trial {}: before {} after {} margin {}\nwitness written to {}",
                w.trial,
                num(w.latency_before),
                num(w.latency_after),
                num(w.margin),
                w.output
            );
        }
        None => text.push_str("no witness found\n"),
    }
    Ok(Report::new(code, text))
}

/// One gadget variant solved before and after the extension.
#[derive(Clone, Debug, Serialize)]
pub struct DemoVariant {
    pub variant: F1Variant,
    pub verdict: IbpVerdict,
    /// Per type, `(path edge names, flow)` after the extension.
    pub flows_after: Vec<Vec<(String, f64)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub variants: Vec<DemoVariant>,
}

pub const DEMO_TOLERANCE: f64 = 1e-12;

/// Solves both gadget variants with the exact backend.
pub fn demo_report() -> Result<DemoReport, CliError> {
    let options = SolveOptions::default().with_tolerance(DEMO_TOLERANCE);
    let variants = F1Variant::ALL
        .into_iter()
        .map(|variant| {
            let instance = f1_instance(variant);
            let verdict = check_ibp_with(
                &instance,
                &ActiveSet,
                &options,
                ibp_core::paradox::DEFAULT_DECISION_THRESHOLD,
            )?;
            let flows_after = path_flow_table(instance.game.graph(), &verdict.after);
            Ok(DemoVariant {
                variant,
                verdict,
                flows_after,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(DemoReport { variants })
}

fn path_flow_table(g: &MultiGraph, r: &EquilibriumResult) -> Vec<Vec<(String, f64)>> {
    r.paths
        .iter()
        .zip(&r.path_flows)
        .map(|(paths, flows)| {
            paths
                .iter()
                .zip(flows)
                .map(|(p, &f)| (edge_list(g, p.iter().copied()), f))
                .collect()
        })
        .collect()
}

pub fn demo(as_json: bool) -> Result<Report, CliError> {
    let report = demo_report()?;
    if as_json {
        return Ok(Report::new(exit::OK, json(&report)));
    }
    let mut text = String::from(
        "gadget F1: e1 = uv (0), e2 = uw (4x), e3 = wv (x + 22), e4 = wv (10 + 2x); rates 5 and 5\n\
         type 0 routes u -> v knowing e2 e3, then learns e4; type 1 knows e1 e2 e4\n",
    );
    for v in &report.variants {
        let placement = match v.variant {
            F1Variant::Origin2AtOrigin1 => "second origin at u",
            F1Variant::Origin2AtDestination1 => "second origin at v",
        };
        let _ = writeln!(text, "\n{placement} ({:?})", v.variant);
        text.push_str(&render_verdict(&v.verdict));
        let gadget = f1_instance(v.variant);
        for (label, r) in [("before", &v.verdict.before), ("after", &v.verdict.after)] {
            let _ = writeln!(text, "path flows {label}:");
            let rows: Vec<Vec<String>> = path_flow_table(gadget.game.graph(), r)
                .into_iter()
                .enumerate()
                .flat_map(|(j, paths)| {
                    paths
                        .into_iter()
                        .map(move |(p, f)| vec![j.to_string(), p, num(f)])
                })
                .collect();
            text.push_str(&table(&["type", "path", "flow"], &rows));
        }
    }
    Ok(Report::new(exit::OK, text))
}
