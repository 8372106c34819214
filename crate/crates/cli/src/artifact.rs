//! JSON artifacts written by the `koenig`, `orient` and `decorate`
//! subcommands. Each carries the structure it computed (coloring bits,
//! orientation bits, labels) so `verify` can recount every reported mass.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KoenigArtifact {
    pub version: u32,
    pub measure: String,
    pub epsilon: f64,
    pub seed: u64,
    pub weighted: bool,
    pub palette: usize,
    pub corr_mass: f64,
    pub deep_corr_mass: f64,
    pub eta_a_mass: f64,
    pub l_scale: usize,
    /// Distinguished-class size before the loop and after each sweep.
    pub a_trajectory: Vec<usize>,
    pub rounds: usize,
    pub coloring: Vec<Option<usize>>,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StageRow {
    pub stage: usize,
    pub n_paths: usize,
    pub endpoint_vertices: usize,
    pub interior_endpoint_vertices: usize,
    pub corr_mass: f64,
    pub deep_corr_mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrientArtifact {
    pub version: u32,
    pub measure: String,
    pub epsilon: f64,
    pub truncation: bool,
    pub corr_mass: f64,
    pub deep_corr_mass: f64,
    pub best_stage: usize,
    pub n_cycles: usize,
    pub n_residual_edges: usize,
    pub stages: Vec<StageRow>,
    pub orientation: Vec<bool>,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LabelActionRow {
    pub label: usize,
    pub defined: usize,
    pub collisions: usize,
    pub injective_on_corr: bool,
    pub permutation: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DecorateArtifact {
    pub version: u32,
    pub measure: String,
    pub epsilon: f64,
    pub seed: u64,
    pub corr_mass: f64,
    pub x_mass: f64,
    pub y0_mass: f64,
    pub y1_mass: f64,
    pub corr_s_mass: f64,
    pub cover_corr_mass: f64,
    pub total_deficiency: f64,
    pub x_budget_met: bool,
    pub y_budget_met: bool,
    pub orientation: Vec<bool>,
    pub labels: Vec<Option<usize>>,
    pub label_actions: Vec<LabelActionRow>,
    pub runtime_ms: u64,
}
