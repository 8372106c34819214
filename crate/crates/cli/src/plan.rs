//! Experiment plans and run records.
//!
//! A plan is the product of generator specs, measure presets, an epsilon
//! grid and an algorithm selection, repeated `repetitions` times. Runs are
//! deterministic under a fixed seed; the CSV output holds the deterministic
//! projection of each record (wall time lives only in the JSON), so a rerun
//! of the same plan is byte-identical.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use schreier_core::generate::GeneratorSpec;
use schreier_core::koenig::approximate_koenig;
use schreier_core::measure::MeasurePreset;
use schreier_core::orient::{approximate_balanced_orientation, OrientOptions};
use schreier_core::schreier::decorate;

pub const CSV_SCHEMA: &str = "schreier-bench csv v1";
pub const CSV_HEADER: &str = "cell,rep,algorithm,family,params,gen_seed,measure,epsilon,n_vertices,n_edges,max_degree,corr_c_mass,corr_s_mass,deep_corr_mass,corr_sc_mass,eta_a_mass,l_scale,rounds,a_trajectory,target_met,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Koenig,
    Orient,
    Decorate,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Koenig => write!(f, "koenig"),
            Algorithm::Orient => write!(f, "orient"),
            Algorithm::Decorate => write!(f, "decorate"),
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "koenig" => Ok(Algorithm::Koenig),
            "orient" => Ok(Algorithm::Orient),
            "decorate" => Ok(Algorithm::Decorate),
            other => Err(format!("unknown algorithm '{}'", other)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    #[serde(default)]
    pub seed: u64,
    pub generators: Vec<GeneratorSpec>,
    pub measures: Vec<String>,
    pub epsilons: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Output path prefix; the runner writes `<output>.csv` and
    /// `<output>.json`.
    pub output: String,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: usize,
    pub rep: usize,
    pub algorithm: Algorithm,
    pub family: String,
    pub params: String,
    pub gen_seed: u64,
    pub measure: String,
    pub epsilon: f64,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub max_degree: usize,
    pub corr_c_mass: Option<f64>,
    pub corr_s_mass: Option<f64>,
    pub deep_corr_mass: Option<f64>,
    pub corr_sc_mass: Option<f64>,
    pub eta_a_mass: Option<f64>,
    pub l_scale: Option<usize>,
    pub rounds: usize,
    /// Distinguished-class sizes per round (koenig/decorate); non-increasing.
    pub a_trajectory: Vec<usize>,
    pub target_met: bool,
    pub error: Option<String>,
    /// Non-deterministic; excluded from the CSV projection.
    #[serde(default)]
    pub wall_ms: u64,
}

fn run_cell(
    cell: usize,
    rep: usize,
    spec: &GeneratorSpec,
    measure: &str,
    epsilon: f64,
    algorithm: Algorithm,
    plan_seed: u64,
) -> RunRecord {
    let gen_seed = spec.seed.wrapping_add(rep as u64);
    let mut record = RunRecord {
        cell,
        rep,
        algorithm,
        family: spec.family.clone(),
        params: spec.params_string(),
        gen_seed,
        measure: measure.to_string(),
        epsilon,
        n_vertices: 0,
        n_edges: 0,
        max_degree: 0,
        corr_c_mass: None,
        corr_s_mass: None,
        deep_corr_mass: None,
        corr_sc_mass: None,
        eta_a_mass: None,
        l_scale: None,
        rounds: 0,
        a_trajectory: Vec::new(),
        target_met: false,
        error: None,
        wall_ms: 0,
    };
    let started = std::time::Instant::now();
    let outcome = (|| -> Result<(), String> {
        let mut spec = spec.clone();
        spec.seed = gen_seed;
        let inst = spec.build().map_err(|e| e.to_string())?;
        let g = inst.graph;
        record.n_vertices = g.n_vertices();
        record.n_edges = g.n_edges();
        record.max_degree = g.max_degree();
        let preset = MeasurePreset::parse(measure).map_err(|e| e.to_string())?;
        let mu = preset
            .resolve(g.n_vertices(), inst.dims.as_deref())
            .map_err(|e| e.to_string())?;
        match algorithm {
            Algorithm::Koenig => {
                let out = approximate_koenig(&g, &mu, epsilon, false, plan_seed)
                    .map_err(|e| e.to_string())?;
                record.corr_c_mass = Some(out.report.corr_mass);
                record.deep_corr_mass = Some(out.report.deep_corr_mass);
                record.eta_a_mass = Some(out.eta_a_mass);
                record.l_scale = Some(out.config.l_scale);
                record.rounds = out.elimination.sweeps;
                record.a_trajectory = out.elimination.a_trajectory;
                record.target_met = out.report.corr_mass > 1.0 - epsilon;
            }
            Algorithm::Orient => {
                let truncation = (0..g.n_vertices()).any(|v| g.degree(v) % 2 != 0);
                let opts = OrientOptions {
                    truncation,
                    ..OrientOptions::default()
                };
                let out = approximate_balanced_orientation(&g, &mu, epsilon, opts)
                    .map_err(|e| e.to_string())?;
                record.corr_s_mass = Some(out.report.corr_mass);
                record.deep_corr_mass = Some(out.report.deep_corr_mass);
                record.rounds = out.stage_reports.len();
                record.target_met = out.report.deep_corr_mass > 1.0 - epsilon
                    || out.report.corr_mass > 1.0 - epsilon;
            }
            Algorithm::Decorate => {
                let out = decorate(&g, &mu, epsilon, plan_seed).map_err(|e| e.to_string())?;
                record.corr_sc_mass = Some(out.report.corr_mass);
                record.corr_s_mass = Some(out.budget.corr_s_mass);
                record.deep_corr_mass = Some(out.budget.x_mass);
                record.eta_a_mass = None;
                record.rounds = out.elimination.sweeps;
                record.a_trajectory = out.elimination.a_trajectory;
                record.target_met = out.report.corr_mass > 1.0 - epsilon;
            }
        }
        Ok(())
    })();
    if let Err(message) = outcome {
        record.error = Some(message);
        record.target_met = false;
    }
    debug_assert!(
        record.a_trajectory.windows(2).all(|w| w[1] <= w[0]),
        "distinguished-class trajectory must be non-increasing"
    );
    record.wall_ms = started.elapsed().as_millis() as u64;
    record
}

/// Executes every cell of the plan. Cells run in parallel when `threads > 1`
/// but the record order is by cell index regardless of completion order.
pub fn run_plan(plan: &ExperimentPlan, threads: usize) -> Vec<RunRecord> {
    let mut cells = Vec::new();
    let mut cell_index = 0;
    for spec in &plan.generators {
        for measure in &plan.measures {
            for &epsilon in &plan.epsilons {
                for &algorithm in &plan.algorithms {
                    for rep in 0..plan.repetitions {
                        cells.push((cell_index, rep, spec.clone(), measure.clone(), epsilon, algorithm));
                    }
                    cell_index += 1;
                }
            }
        }
    }
    let run = |(cell, rep, spec, measure, epsilon, algorithm): &(
        usize,
        usize,
        GeneratorSpec,
        String,
        f64,
        Algorithm,
    )| run_cell(*cell, *rep, spec, measure, *epsilon, *algorithm, plan.seed);
    if threads > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| cells.par_iter().map(run).collect())
    } else {
        cells.iter().map(run).collect()
    }
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{}", x)).unwrap_or_default()
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Deterministic CSV projection: one row per run, trajectories joined with
/// ';', wall time omitted.
pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", CSV_SCHEMA);
    let _ = writeln!(out, "{}", CSV_HEADER);
    for r in records {
        let trajectory = r
            .a_trajectory
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.cell,
            r.rep,
            r.algorithm,
            r.family,
            r.params,
            r.gen_seed,
            r.measure,
            r.epsilon,
            r.n_vertices,
            r.n_edges,
            r.max_degree,
            fmt_opt_f64(r.corr_c_mass),
            fmt_opt_f64(r.corr_s_mass),
            fmt_opt_f64(r.deep_corr_mass),
            fmt_opt_f64(r.corr_sc_mass),
            fmt_opt_f64(r.eta_a_mass),
            fmt_opt_usize(r.l_scale),
            r.rounds,
            trajectory,
            r.target_met,
            r.error.clone().unwrap_or_default(),
        );
    }
    out
}

/// Parses the CSV projection back into records (wall time restored as 0).
pub fn from_csv(text: &str) -> Result<Vec<RunRecord>, String> {
    let mut records = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.is_empty() || line == CSV_HEADER {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 21 {
            return Err(format!("expected 21 columns, got {}", cols.len()));
        }
        let parse_opt_f64 = |s: &str| -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| format!("{}: {}", s, e))
            }
        };
        let trajectory = if cols[18].is_empty() {
            Vec::new()
        } else {
            cols[18]
                .split(';')
                .map(|t| t.parse().map_err(|e| format!("{}: {}", t, e)))
                .collect::<Result<Vec<usize>, String>>()?
        };
        records.push(RunRecord {
            cell: cols[0].parse().map_err(|e| format!("{}", e))?,
            rep: cols[1].parse().map_err(|e| format!("{}", e))?,
            algorithm: cols[2].parse()?,
            family: cols[3].to_string(),
            params: cols[4].to_string(),
            gen_seed: cols[5].parse().map_err(|e| format!("{}", e))?,
            measure: cols[6].to_string(),
            epsilon: cols[7].parse().map_err(|e| format!("{}", e))?,
            n_vertices: cols[8].parse().map_err(|e| format!("{}", e))?,
            n_edges: cols[9].parse().map_err(|e| format!("{}", e))?,
            max_degree: cols[10].parse().map_err(|e| format!("{}", e))?,
            corr_c_mass: parse_opt_f64(cols[11])?,
            corr_s_mass: parse_opt_f64(cols[12])?,
            deep_corr_mass: parse_opt_f64(cols[13])?,
            corr_sc_mass: parse_opt_f64(cols[14])?,
            eta_a_mass: parse_opt_f64(cols[15])?,
            l_scale: if cols[16].is_empty() {
                None
            } else {
                Some(cols[16].parse().map_err(|e| format!("{}", e))?)
            },
            rounds: cols[17].parse().map_err(|e| format!("{}", e))?,
            a_trajectory: trajectory,
            target_met: cols[19].parse().map_err(|e| format!("{}", e))?,
            error: if cols[20].is_empty() {
                None
            } else {
                Some(cols[20].to_string())
            },
            wall_ms: 0,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub cell: usize,
    pub rep: usize,
    pub algorithm: Algorithm,
    pub achieved_mass: Option<f64>,
    pub target_mass: f64,
    pub passed: bool,
    /// For coloring runs: surviving eta-mass within 1/L.
    pub eta_bound_ok: Option<bool>,
}

/// Per-run attainment of the `1 - epsilon` target plus the elimination bound
/// check.
pub fn convergence_summary(records: &[RunRecord]) -> (Vec<SummaryRow>, bool) {
    let mut rows = Vec::with_capacity(records.len());
    let mut all_passed = true;
    for r in records {
        let achieved = match r.algorithm {
            Algorithm::Koenig => r.corr_c_mass,
            Algorithm::Orient => r.deep_corr_mass.or(r.corr_s_mass),
            Algorithm::Decorate => r.corr_sc_mass,
        };
        let eta_bound_ok = match (r.eta_a_mass, r.l_scale) {
            (Some(mass), Some(l)) => Some(mass <= 1.0 / l as f64),
            _ => None,
        };
        let passed = r.error.is_none() && r.target_met && eta_bound_ok != Some(false);
        all_passed &= passed;
        rows.push(SummaryRow {
            cell: r.cell,
            rep: r.rep,
            algorithm: r.algorithm,
            achieved_mass: achieved,
            target_mass: 1.0 - r.epsilon,
            passed,
            eta_bound_ok,
        });
    }
    (rows, all_passed)
}
