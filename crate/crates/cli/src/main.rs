//! Command-line driver: instance generation, the three decoration
//! pipelines, plan execution and artifact verification. Exit code 0 only
//! when every pass/fail check of the invoked command passes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use schreier_cli::artifact::{
    DecorateArtifact, KoenigArtifact, LabelActionRow, OrientArtifact, StageRow,
};
use schreier_cli::plan::{convergence_summary, from_csv, run_plan, to_csv, ExperimentPlan};
use schreier_core::generate::GeneratorSpec;
use schreier_core::graph::{Graph, Orientation, PartialEdgeColoring};
use schreier_core::io::{load_graph, save_graph, GraphFile};
use schreier_core::koenig::approximate_koenig;
use schreier_core::measure::{MeasurePreset, VertexMeasure};
use schreier_core::orient::{approximate_balanced_orientation, OrientOptions};
use schreier_core::schreier::{decorate, verify_free_action};
use schreier_core::{corr_of_coloring, corr_of_decoration, corr_of_orientation};

#[derive(Parser)]
#[command(name = "schreier", about = "Approximate edge colorings, balanced orientations and Schreier decorations on finite graphs", version)]
struct Cli {
    /// Default rng seed for subcommands that take one.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for plan execution.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Format of the summary printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph instance and write it to a file.
    Gen(GenArgs),
    /// Approximate edge coloring of an odd-cycle-free graph.
    Koenig(KoenigArgs),
    /// Approximate balanced orientation of an even-degree graph.
    Orient(OrientArgs),
    /// Approximate Schreier decoration of a 2k-regular graph.
    Decorate(DecorateArgs),
    /// Run an experiment plan and write CSV + JSON results.
    Bench(BenchArgs),
    /// Recount the masses recorded in an artifact against its graph.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family: random-regular, torus, bipartite-regular, truncated-tree, rotation.
    #[arg(long)]
    family: String,
    /// Comma-separated key=value pairs, lists x-separated (dims=5x5).
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; .json gets the JSON variant (with dims), else text.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KoenigArgs {
    #[arg(long)]
    graph: PathBuf,
    /// uniform | point:<v> | exp:<axis>,<rate> | random:<seed> | file
    /// (weights embedded in a JSON graph)
    #[arg(long, default_value = "uniform")]
    measure: String,
    #[arg(long)]
    epsilon: f64,
    /// Force weighted chain caps (automatic when the edge measure is skewed).
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OrientArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "uniform")]
    measure: String,
    #[arg(long)]
    epsilon: f64,
    /// Accept odd-degree boundary vertices (finite truncations).
    #[arg(long)]
    truncation: bool,
    #[arg(long, default_value_t = 24)]
    stages: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecorateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "uniform")]
    measure: String,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Plan file (JSON).
    #[arg(long)]
    plan: PathBuf,
    /// Override the plan's output prefix.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    artifact: PathBuf,
    #[arg(long, value_enum)]
    kind: ArtifactKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArtifactKind {
    Koenig,
    Orient,
    Decorate,
}

fn load(path: &Path) -> Result<(Graph, GraphFile)> {
    let file = load_graph(path).with_context(|| format!("loading {}", path.display()))?;
    let g = file.to_graph()?;
    Ok((g, file))
}

fn resolve_measure(name: &str, g: &Graph, file: &GraphFile) -> Result<VertexMeasure> {
    if name == "file" {
        let weights = file
            .weights
            .clone()
            .context("measure 'file' needs a JSON graph with vertex weights")?;
        return Ok(VertexMeasure::from_weights(weights)?);
    }
    let preset = MeasurePreset::parse(name)?;
    Ok(preset.resolve(g.n_vertices(), file.dims.as_deref())?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value)?;
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_gen(args: &GenArgs, default_seed: u64) -> Result<bool> {
    let params = args
        .params
        .split(',')
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k, v.to_string()))
                .with_context(|| format!("bad parameter '{}'", kv))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GeneratorSpec::new(&args.family, &params, args.seed.unwrap_or(default_seed));
    let inst = spec.build()?;
    let mut file = GraphFile::from_graph(&inst.graph);
    file.dims = inst.dims;
    save_graph(&args.out, &file)?;
    println!(
        "wrote {}: n={} m={} max_degree={}",
        args.out.display(),
        file.n,
        file.edges.len(),
        file.max_degree
    );
    Ok(true)
}

fn cmd_koenig(args: &KoenigArgs, default_seed: u64) -> Result<bool> {
    let (g, file) = load(&args.graph)?;
    let mu = resolve_measure(&args.measure, &g, &file)?;
    let seed = args.seed.unwrap_or(default_seed);
    let start = Instant::now();
    let out = approximate_koenig(&g, &mu, args.epsilon, args.weighted, seed)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let artifact = KoenigArtifact {
        version: 1,
        measure: args.measure.clone(),
        epsilon: args.epsilon,
        seed,
        weighted: out.config.weighted,
        palette: out.coloring.palette(),
        corr_mass: out.report.corr_mass,
        deep_corr_mass: out.report.deep_corr_mass,
        eta_a_mass: out.eta_a_mass,
        l_scale: out.config.l_scale,
        a_trajectory: out.elimination.a_trajectory.clone(),
        rounds: out.elimination.sweeps,
        coloring: out.coloring.colors().to_vec(),
        runtime_ms,
    };
    write_json(&args.out, &artifact)?;
    let passed = artifact.corr_mass > 1.0 - args.epsilon
        && artifact.eta_a_mass <= 1.0 / artifact.l_scale as f64;
    println!(
        "koenig: palette={} corr_mass={:.6} eta_a_mass={:.3e} (bound 1/{}) rounds={} {}",
        artifact.palette,
        artifact.corr_mass,
        artifact.eta_a_mass,
        artifact.l_scale,
        artifact.rounds,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(passed)
}

fn cmd_orient(args: &OrientArgs) -> Result<bool> {
    let (g, file) = load(&args.graph)?;
    let mu = resolve_measure(&args.measure, &g, &file)?;
    let opts = OrientOptions {
        truncation: args.truncation,
        max_stages: args.stages,
    };
    let start = Instant::now();
    let out = approximate_balanced_orientation(&g, &mu, args.epsilon, opts)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let artifact = OrientArtifact {
        version: 1,
        measure: args.measure.clone(),
        epsilon: args.epsilon,
        truncation: args.truncation,
        corr_mass: out.report.corr_mass,
        deep_corr_mass: out.report.deep_corr_mass,
        best_stage: out.best_stage,
        n_cycles: out.n_cycles,
        n_residual_edges: out.n_residual_edges,
        stages: out
            .stage_reports
            .iter()
            .map(|r| StageRow {
                stage: r.stage,
                n_paths: r.n_paths,
                endpoint_vertices: r.endpoint_vertices,
                interior_endpoint_vertices: r.interior_endpoint_vertices,
                corr_mass: r.corr_mass,
                deep_corr_mass: r.deep_corr_mass,
            })
            .collect(),
        orientation: out.orientation.forward_bits().to_vec(),
        runtime_ms,
    };
    write_json(&args.out, &artifact)?;
    let passed = artifact.deep_corr_mass > 1.0 - args.epsilon || args.epsilon >= 1.0;
    println!(
        "orient: corr_mass={:.6} deep={:.6} best_stage={} cycles={} residual_edges={} {}",
        artifact.corr_mass,
        artifact.deep_corr_mass,
        artifact.best_stage,
        artifact.n_cycles,
        artifact.n_residual_edges,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(passed)
}

fn cmd_decorate(args: &DecorateArgs, default_seed: u64) -> Result<bool> {
    let (g, file) = load(&args.graph)?;
    let mu = resolve_measure(&args.measure, &g, &file)?;
    let seed = args.seed.unwrap_or(default_seed);
    let start = Instant::now();
    let dec = decorate(&g, &mu, args.epsilon, seed)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let actions = verify_free_action(&g, &dec.orientation, &dec.labels, &dec.report);
    let artifact = DecorateArtifact {
        version: 1,
        measure: args.measure.clone(),
        epsilon: args.epsilon,
        seed,
        corr_mass: dec.report.corr_mass,
        x_mass: dec.budget.x_mass,
        y0_mass: dec.budget.y0_mass,
        y1_mass: dec.budget.y1_mass,
        corr_s_mass: dec.budget.corr_s_mass,
        cover_corr_mass: dec.budget.cover_corr_mass,
        total_deficiency: dec.budget.total_deficiency,
        x_budget_met: dec.budget.x_budget_met,
        y_budget_met: dec.budget.y_budget_met,
        orientation: dec.orientation.forward_bits().to_vec(),
        labels: dec.labels.colors().to_vec(),
        label_actions: actions
            .iter()
            .map(|a| LabelActionRow {
                label: a.label,
                defined: a.defined,
                collisions: a.collisions,
                injective_on_corr: a.injective_on_corr,
                permutation: a.permutation,
            })
            .collect(),
        runtime_ms,
    };
    write_json(&args.out, &artifact)?;
    let passed = artifact.corr_mass > 1.0 - args.epsilon
        && artifact.total_deficiency < args.epsilon
        && artifact.label_actions.iter().all(|a| a.injective_on_corr);
    println!(
        "decorate: corr_mass={:.6} deficiency={:.6} X={:.6} Y0={:.6} Y1={:.6} {}",
        artifact.corr_mass,
        artifact.total_deficiency,
        artifact.x_mass,
        artifact.y0_mass,
        artifact.y1_mass,
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(passed)
}

fn cmd_bench(args: &BenchArgs, threads: usize, format: Format) -> Result<bool> {
    let body = std::fs::read_to_string(&args.plan)
        .with_context(|| format!("reading {}", args.plan.display()))?;
    let mut plan: ExperimentPlan = serde_json::from_str(&body)?;
    if let Some(out) = &args.out {
        plan.output = out.clone();
    }
    let records = run_plan(&plan, threads.max(1));
    let csv = to_csv(&records);
    let csv_path = PathBuf::from(format!("{}.csv", plan.output));
    let json_path = PathBuf::from(format!("{}.json", plan.output));
    if let Some(parent) = csv_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&csv_path, &csv)?;
    write_json(&json_path, &records)?;
    // Emitted files parse back to the same records.
    let reparsed = from_csv(&csv).map_err(|e| anyhow::anyhow!(e))?;
    if reparsed.len() != records.len() {
        bail!("csv round trip lost rows");
    }
    let (summary, all_passed) = convergence_summary(&records);
    match format {
        Format::Csv => {
            println!("cell,rep,algorithm,achieved_mass,target_mass,passed,eta_bound_ok");
            for row in &summary {
                println!(
                    "{},{},{},{},{},{},{}",
                    row.cell,
                    row.rep,
                    row.algorithm,
                    row.achieved_mass.map(|m| m.to_string()).unwrap_or_default(),
                    row.target_mass,
                    row.passed,
                    row.eta_bound_ok.map(|b| b.to_string()).unwrap_or_default(),
                );
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
    }
    eprintln!(
        "bench: {} runs -> {} and {} ({})",
        records.len(),
        csv_path.display(),
        json_path.display(),
        if all_passed { "all passed" } else { "FAILURES" }
    );
    Ok(all_passed)
}

const MASS_TOL: f64 = 1e-12;

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let (g, file) = load(&args.graph)?;
    let body = std::fs::read_to_string(&args.artifact)
        .with_context(|| format!("reading {}", args.artifact.display()))?;
    let mut failures: Vec<String> = Vec::new();
    let check = |failures: &mut Vec<String>, name: &str, recorded: f64, recomputed: f64| {
        if (recorded - recomputed).abs() > MASS_TOL {
            failures.push(format!(
                "{} recorded {} but recomputed {}",
                name, recorded, recomputed
            ));
        }
    };
    match args.kind {
        ArtifactKind::Koenig => {
            let a: KoenigArtifact = serde_json::from_str(&body)?;
            let mu = resolve_measure(&a.measure, &g, &file)?;
            let mut coloring = PartialEdgeColoring::new(g.n_edges(), a.palette);
            for (e, &c) in a.coloring.iter().enumerate() {
                if let Some(c) = c {
                    coloring.set(e, c);
                }
            }
            if !coloring.is_proper(&g) {
                failures.push("coloring is not proper".into());
            }
            let rep = corr_of_coloring(&g, &coloring, &mu);
            check(&mut failures, "corr_mass", a.corr_mass, rep.corr_mass);
            check(&mut failures, "deep_corr_mass", a.deep_corr_mass, rep.deep_corr_mass);
        }
        ArtifactKind::Orient => {
            let a: OrientArtifact = serde_json::from_str(&body)?;
            let mu = resolve_measure(&a.measure, &g, &file)?;
            if a.orientation.len() != g.n_edges() {
                bail!("orientation covers {} edges, graph has {}", a.orientation.len(), g.n_edges());
            }
            let s = Orientation::from_forward(a.orientation.clone());
            let rep = corr_of_orientation(&g, &s, &mu);
            check(&mut failures, "corr_mass", a.corr_mass, rep.corr_mass);
            check(&mut failures, "deep_corr_mass", a.deep_corr_mass, rep.deep_corr_mass);
        }
        ArtifactKind::Decorate => {
            let a: DecorateArtifact = serde_json::from_str(&body)?;
            let mu = resolve_measure(&a.measure, &g, &file)?;
            let s = Orientation::from_forward(a.orientation.clone());
            let palette = g.max_degree() / 2;
            let mut labels = PartialEdgeColoring::new(g.n_edges(), palette.max(1));
            for (e, &c) in a.labels.iter().enumerate() {
                if let Some(c) = c {
                    labels.set(e, c);
                }
            }
            let rep = corr_of_decoration(&g, &s, &labels, &mu)?;
            check(&mut failures, "corr_mass", a.corr_mass, rep.corr_mass);
            let identity = (1.0 - a.y0_mass) + (1.0 - a.y1_mass);
            let projected =
                2.0 * (1.0 - a.corr_s_mass) + 2.0 * a.corr_s_mass * (1.0 - a.cover_corr_mass);
            check(&mut failures, "bookkeeping identity", identity, projected);
        }
    }
    for f in &failures {
        eprintln!("verify: {}", f);
    }
    let ok = failures.is_empty();
    println!("verify: {}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen(args) => cmd_gen(args, cli.seed),
        Command::Koenig(args) => cmd_koenig(args, cli.seed),
        Command::Orient(args) => cmd_orient(args),
        Command::Decorate(args) => cmd_decorate(args, cli.seed),
        Command::Bench(args) => cmd_bench(args, cli.threads, cli.format),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(err) => {
            eprintln!("error: {:#}", err);
            std::process::exit(2);
        }
    }
}
