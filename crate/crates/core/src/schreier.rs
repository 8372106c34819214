//! Approximate Schreier decoration of 2k-regular graphs: balance-orient,
//! lift to the bipartite double cover of the balanced set, color the cover,
//! pull the coloring back as edge labels.

use thiserror::Error;

use crate::graph::{
    corr_of_decoration, CorrReport, EdgeId, Graph, GraphError, Orientation,
    PartialEdgeColoring, VertexId,
};
use crate::koenig::{approximate_koenig, EliminationStats, KoenigError};
use crate::measure::{MeasureError, VertexMeasure};
use crate::orient::{approximate_balanced_orientation, OrientError, OrientOptions};

#[derive(Debug, Error)]
pub enum SchreierError {
    #[error("graph is not regular of even degree (max degree {max_degree})")]
    NotEvenRegular { max_degree: usize },
    #[error("balanced set has measure zero; the double cover is empty")]
    EmptyCorr,
    #[error(transparent)]
    Orient(#[from] OrientError),
    #[error(transparent)]
    Koenig(#[from] KoenigError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Bipartite double cover of the balanced set: two copies of Corr(S) with a
/// cover edge (v0, w1) for every oriented edge (v, w) inside Corr(S).
#[derive(Debug, Clone)]
pub struct DoubleCover {
    pub graph: Graph,
    /// Balanced base vertices, ascending; cover vertex `i` is copy 0 of
    /// `base_corr[i]` and `i + base_corr.len()` its copy 1.
    pub base_corr: Vec<VertexId>,
    /// Base edge behind each cover edge.
    pub edge_map: Vec<EdgeId>,
    /// nu(A0 + B1) = (mu(A) + mu(B)) / (2 mu(Corr(S))).
    pub nu: VertexMeasure,
    pub corr_mass: f64,
}

impl DoubleCover {
    pub fn n_base_corr(&self) -> usize {
        self.base_corr.len()
    }

    pub fn copy0(&self, idx: usize) -> VertexId {
        self.base_corr[idx]
    }
}

pub fn build_double_cover(
    g: &Graph,
    s: &Orientation,
    mu: &VertexMeasure,
) -> Result<DoubleCover, SchreierError> {
    if g.max_degree() % 2 != 0 {
        return Err(SchreierError::NotEvenRegular {
            max_degree: g.max_degree(),
        });
    }
    let flags: Vec<bool> = (0..g.n_vertices())
        .map(|v| s.is_balanced_at(g, v))
        .collect();
    let corr: Vec<VertexId> = (0..g.n_vertices()).filter(|&v| flags[v]).collect();
    let corr_mass = mu.mass_of_flags(&flags);
    if corr_mass <= 0.0 {
        return Err(SchreierError::EmptyCorr);
    }
    let mut cover_index = vec![usize::MAX; g.n_vertices()];
    for (i, &v) in corr.iter().enumerate() {
        cover_index[v] = i;
    }
    let nc = corr.len();
    let mut edges = Vec::new();
    let mut edge_map = Vec::new();
    for e in 0..g.n_edges() {
        let (tail, head) = (s.tail(g, e), s.head(g, e));
        if cover_index[tail] != usize::MAX && cover_index[head] != usize::MAX {
            edges.push((cover_index[tail], nc + cover_index[head]));
            edge_map.push(e);
        }
    }
    let graph = Graph::from_edges(2 * nc, &edges)?;
    let weights: Vec<f64> = corr
        .iter()
        .map(|&v| mu.weight(v) / (2.0 * corr_mass))
        .collect();
    let nu = VertexMeasure::normalized(weights.iter().chain(weights.iter()).copied().collect())?;
    Ok(DoubleCover {
        graph,
        base_corr: corr,
        edge_map,
        nu,
        corr_mass,
    })
}

/// Error-budget bookkeeping of a decoration run. X is the deep balanced set;
/// Y0 and Y1 are the base vertices whose cover copies are correctly colored.
#[derive(Debug, Clone, PartialEq)]
pub struct DecorationReport {
    pub x_mass: f64,
    pub y0_mass: f64,
    pub y1_mass: f64,
    pub corr_s_mass: f64,
    /// nu-mass of the correctly colored cover vertices.
    pub cover_corr_mass: f64,
    pub x_budget_met: bool,
    pub y_budget_met: bool,
    /// mu(V\X) + mu(V\Y0) + mu(V\Y1); an upper bound for the failure mass.
    pub total_deficiency: f64,
}

#[derive(Debug, Clone)]
pub struct Decoration {
    pub orientation: Orientation,
    /// Partial labels with palette `max_degree / 2`; base edges whose cover
    /// copy was uncolored (or absent) stay unlabeled.
    pub labels: PartialEdgeColoring,
    /// Corr(S, c) under mu.
    pub report: CorrReport,
    pub budget: DecorationReport,
    pub elimination: EliminationStats,
}

/// Full decoration pipeline on a 2k-regular graph: orientation with deep
/// budget epsilon/2, double cover, cover coloring with budget
/// epsilon / (4 mu(Corr(S))), pullback. A missed stage budget is reported in
/// the flags, not raised.
pub fn decorate(
    g: &Graph,
    mu: &VertexMeasure,
    epsilon: f64,
    rng_seed: u64,
) -> Result<Decoration, SchreierError> {
    let two_delta = g
        .regular_degree()
        .filter(|d| d % 2 == 0 && *d > 0)
        .ok_or(SchreierError::NotEvenRegular {
            max_degree: g.max_degree(),
        })?;
    let delta = two_delta / 2;

    let orient_out =
        approximate_balanced_orientation(g, mu, epsilon / 2.0, OrientOptions::default())?;
    let s = orient_out.orientation;
    let x_mass = orient_out.report.deep_corr_mass;

    let cover = build_double_cover(g, &s, mu)?;
    let eps_cover = epsilon / (4.0 * cover.corr_mass);
    let koenig_out = approximate_koenig(&cover.graph, &cover.nu, eps_cover, false, rng_seed)?;

    let mut labels = PartialEdgeColoring::new(g.n_edges(), delta);
    for (cov_e, &base_e) in cover.edge_map.iter().enumerate() {
        if let Some(col) = koenig_out.coloring.get(cov_e) {
            labels.set(base_e, col);
        }
    }

    let nc = cover.n_base_corr();
    let mut y0 = vec![false; g.n_vertices()];
    let mut y1 = vec![false; g.n_vertices()];
    for &cv in &koenig_out.report.corr_vertices {
        if cv < nc {
            y0[cover.base_corr[cv]] = true;
        } else {
            y1[cover.base_corr[cv - nc]] = true;
        }
    }
    let y0_mass = mu.mass_of_flags(&y0);
    let y1_mass = mu.mass_of_flags(&y1);

    let report = corr_of_decoration(g, &s, &labels, mu)?;
    let budget = DecorationReport {
        x_mass,
        y0_mass,
        y1_mass,
        corr_s_mass: cover.corr_mass,
        cover_corr_mass: koenig_out.report.corr_mass,
        x_budget_met: x_mass > 1.0 - epsilon / 2.0,
        y_budget_met: koenig_out.report.corr_mass > 1.0 - eps_cover,
        total_deficiency: (1.0 - x_mass) + (1.0 - y0_mass) + (1.0 - y1_mass),
    };
    Ok(Decoration {
        orientation: s,
        labels,
        report,
        budget,
        elimination: koenig_out.elimination,
    })
}

/// Behavior of one label's partial shift map sigma (follow the unique
/// out-edge with that label).
#[derive(Debug, Clone, PartialEq)]
pub struct LabelActionReport {
    pub label: usize,
    /// Vertices with exactly one out-edge of this label.
    pub defined: usize,
    /// Targets hit by more than one defined vertex.
    pub collisions: usize,
    /// sigma restricted to Corr(S, c) hits no target twice.
    pub injective_on_corr: bool,
    /// Defined everywhere and bijective.
    pub permutation: bool,
}

/// Per-label bijectivity check of the free-group action encoded by a
/// decoration.
pub fn verify_free_action(
    g: &Graph,
    orientation: &Orientation,
    labels: &PartialEdgeColoring,
    corr: &CorrReport,
) -> Vec<LabelActionReport> {
    let n = g.n_vertices();
    let mut in_corr = vec![false; n];
    for &v in &corr.corr_vertices {
        in_corr[v] = true;
    }
    let mut reports = Vec::with_capacity(labels.palette());
    for label in 0..labels.palette() {
        let mut image: Vec<Option<VertexId>> = vec![None; n];
        for v in 0..n {
            let mut targets = g
                .incident_darts(v)
                .iter()
                .filter(|&&d| orientation.is_out_dart(d) && labels.get(g.dart_edge(d)) == Some(label))
                .map(|&d| g.dart_target(d));
            match (targets.next(), targets.next()) {
                (Some(w), None) => image[v] = Some(w),
                _ => image[v] = None,
            }
        }
        let defined = image.iter().filter(|t| t.is_some()).count();
        let mut preimages = vec![0usize; n];
        let mut corr_preimages = vec![0usize; n];
        for v in 0..n {
            if let Some(w) = image[v] {
                preimages[w] += 1;
                if in_corr[v] {
                    corr_preimages[w] += 1;
                }
            }
        }
        let collisions = preimages.iter().filter(|&&c| c > 1).count();
        let injective_on_corr = corr_preimages.iter().all(|&c| c <= 1);
        let permutation = defined == n && collisions == 0;
        reports.push(LabelActionReport {
            label,
            defined,
            collisions,
            injective_on_corr,
            permutation,
        });
    }
    reports
}
