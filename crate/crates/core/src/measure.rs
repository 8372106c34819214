//! Vertex and edge probability measures on finite graphs.
//!
//! `make_quasi_invariant` mixes a measure half-and-half with uniform, which
//! gives full support and the two-sided comparison `mu(A) <= 2 nu(A)` for
//! every vertex set. `edge_measure_from` derives an edge measure satisfying
//! `mu(touched vertices) <= max_degree * eta(A)` for every edge set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("weights sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),
    #[error("negative weight {weight} at index {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("weight count {0} does not match size {1}")]
    SizeMismatch(usize, usize),
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("edge measure degenerate: total incident vertex mass is zero")]
    ZeroTotalEdgeMass,
    #[error("edge {0} received non-positive mass; apply make_quasi_invariant first")]
    ZeroMassEdge(EdgeId),
    #[error("unknown measure preset '{0}'")]
    UnknownPreset(String),
    #[error("preset '{0}' needs torus dimensions, none available")]
    MissingDims(String),
}

/// Probability measure on vertices; weights are nonnegative and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMeasure {
    weights: Vec<f64>,
}

impl VertexMeasure {
    pub fn uniform(n: usize) -> Self {
        VertexMeasure {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn point(n: usize, v: VertexId) -> Result<Self, MeasureError> {
        if v >= n {
            return Err(MeasureError::VertexOutOfRange(v, n));
        }
        let mut weights = vec![0.0; n];
        weights[v] = 1.0;
        Ok(VertexMeasure { weights })
    }

    /// Validates nonnegativity and normalization within 1e-12.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, MeasureError> {
        for (i, &w) in weights.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(MeasureError::NegativeWeight { index: i, weight: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(MeasureError::NotNormalized(total));
        }
        Ok(VertexMeasure { weights })
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn normalized(weights: Vec<f64>) -> Result<Self, MeasureError> {
        for (i, &w) in weights.iter().enumerate() {
            if w < 0.0 || !w.is_finite() {
                return Err(MeasureError::NegativeWeight { index: i, weight: w });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(MeasureError::NotNormalized(total));
        }
        Ok(VertexMeasure {
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// Seed-deterministic weights drawn from [0.5, 1.5), normalized.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..n).map(|_| 0.5 + rng.gen::<f64>()).collect();
        VertexMeasure::normalized(weights).expect("positive weights")
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, v: VertexId) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self, vertices: impl Iterator<Item = VertexId>) -> f64 {
        // + 0.0 turns the empty sum's -0.0 into +0.0.
        vertices.map(|v| self.weights[v]).sum::<f64>() + 0.0
    }

    /// Mass of the flagged vertices, computed through the complement when the
    /// set covers more than half: a full set then has mass exactly 1 rather
    /// than a rounded float sum.
    pub fn mass_of_flags(&self, flags: &[bool]) -> f64 {
        debug_assert_eq!(flags.len(), self.weights.len());
        let count = flags.iter().filter(|&&b| b).count();
        if 2 * count > flags.len() {
            1.0 - self.mass(flags.iter().enumerate().filter_map(|(v, &b)| (!b).then_some(v)))
        } else {
            self.mass(flags.iter().enumerate().filter_map(|(v, &b)| b.then_some(v)))
        }
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.weights.len() as f64;
        self.weights.iter().all(|&w| (w - u).abs() <= 1e-12 * u.max(1.0))
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }
}

/// nu = (mu + uniform) / 2. Every vertex set A satisfies mu(A) <= 2 nu(A),
/// and nu has full support.
pub fn make_quasi_invariant(mu: &VertexMeasure) -> VertexMeasure {
    let n = mu.n() as f64;
    VertexMeasure {
        weights: mu.weights.iter().map(|&w| 0.5 * w + 0.5 / n).collect(),
    }
}

/// Probability measure on edges with full support.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMeasure {
    weights: Vec<f64>,
}

impl EdgeMeasure {
    pub fn uniform(m: usize) -> Self {
        EdgeMeasure {
            weights: vec![1.0 / m as f64; m],
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self, MeasureError> {
        for (e, &w) in weights.iter().enumerate() {
            if w <= 0.0 || !w.is_finite() {
                return Err(MeasureError::ZeroMassEdge(e));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(MeasureError::NotNormalized(total));
        }
        Ok(EdgeMeasure { weights })
    }

    pub fn n_edges(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, e: EdgeId) -> f64 {
        self.weights[e]
    }

    pub fn mass(&self, edges: impl Iterator<Item = EdgeId>) -> f64 {
        edges.map(|e| self.weights[e]).sum::<f64>() + 0.0
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.weights.len() as f64;
        self.weights.iter().all(|&w| (w - u).abs() <= 1e-12 * u.max(1.0))
    }
}

/// eta(e) = (mu(u) + mu(v)) / Z for e = {u, v}, normalized by
/// Z = sum over edges of endpoint masses. Since Z <= max_degree, every edge
/// set A satisfies mu({v : v in some e in A}) <= max_degree * eta(A).
pub fn edge_measure_from(g: &Graph, mu: &VertexMeasure) -> Result<EdgeMeasure, MeasureError> {
    let raw: Vec<f64> = g
        .edge_list()
        .iter()
        .map(|&(u, v)| mu.weight(u) + mu.weight(v))
        .collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(MeasureError::ZeroTotalEdgeMass);
    }
    let weights: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
    for (e, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            return Err(MeasureError::ZeroMassEdge(e));
        }
    }
    Ok(EdgeMeasure { weights })
}

/// Cocycle ratio rho(f, e) = eta(f) / eta(e); multiplicative along chains.
pub fn cocycle_ratio(eta: &EdgeMeasure, f: EdgeId, e: EdgeId) -> f64 {
    eta.weight(f) / eta.weight(e)
}

/// Builtin measure presets, parsed from strings like `uniform`, `point:3`,
/// `exp:0,0.25` or `random:42`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurePreset {
    Uniform,
    Point(VertexId),
    Exp { axis: usize, rate: f64 },
    Random(u64),
}

impl MeasurePreset {
    pub fn parse(s: &str) -> Result<Self, MeasureError> {
        let bad = || MeasureError::UnknownPreset(s.to_string());
        if s == "uniform" {
            return Ok(MeasurePreset::Uniform);
        }
        if let Some(rest) = s.strip_prefix("point:") {
            return rest.parse().map(MeasurePreset::Point).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix("exp:") {
            let (axis, rate) = rest.split_once(',').ok_or_else(bad)?;
            return Ok(MeasurePreset::Exp {
                axis: axis.parse().map_err(|_| bad())?,
                rate: rate.parse().map_err(|_| bad())?,
            });
        }
        if let Some(rest) = s.strip_prefix("random:") {
            return rest.parse().map(MeasurePreset::Random).map_err(|_| bad());
        }
        Err(bad())
    }

    /// Resolve against a graph. `dims` supplies torus coordinates for the
    /// exponential preset; without them the decay runs along raw vertex ids.
    pub fn resolve(&self, n: usize, dims: Option<&[usize]>) -> Result<VertexMeasure, MeasureError> {
        match *self {
            MeasurePreset::Uniform => Ok(VertexMeasure::uniform(n)),
            MeasurePreset::Point(v) => VertexMeasure::point(n, v),
            MeasurePreset::Random(seed) => Ok(VertexMeasure::random(n, seed)),
            MeasurePreset::Exp { axis, rate } => {
                let coord: Box<dyn Fn(usize) -> usize> = match dims {
                    Some(dims) if axis < dims.len() => {
                        let stride: usize = dims[axis + 1..].iter().product();
                        let side = dims[axis];
                        Box::new(move |v| (v / stride) % side)
                    }
                    Some(dims) => {
                        return Err(MeasureError::MissingDims(format!(
                            "exp axis {} out of range for {} dims",
                            axis,
                            dims.len()
                        )))
                    }
                    None => Box::new(|v| v),
                };
                let weights: Vec<f64> = (0..n).map(|v| (-rate * coord(v) as f64).exp()).collect();
                VertexMeasure::normalized(weights)
            }
        }
    }
}

impl std::fmt::Display for MeasurePreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasurePreset::Uniform => write!(f, "uniform"),
            MeasurePreset::Point(v) => write!(f, "point:{}", v),
            MeasurePreset::Exp { axis, rate } => write!(f, "exp:{},{}", axis, rate),
            MeasurePreset::Random(seed) => write!(f, "random:{}", seed),
        }
    }
}

/// Exact-rational mirror of the two measure constructions, for oracle
/// comparisons on small graphs.
pub mod exact {
    use num::rational::BigRational;
    use num::{BigInt, FromPrimitive, Zero};

    use crate::graph::Graph;

    pub fn to_rationals(weights: &[f64]) -> Vec<BigRational> {
        weights
            .iter()
            .map(|&w| BigRational::from_float(w).expect("finite weight"))
            .collect()
    }

    /// Rescales to total mass exactly 1. Float weights summing to 1 within
    /// rounding are off by an exact rational sliver that matters for tight
    /// bounds.
    pub fn normalized(weights: &[BigRational]) -> Vec<BigRational> {
        let total: BigRational = weights.iter().sum();
        assert!(!total.is_zero());
        weights.iter().map(|w| w / &total).collect()
    }

    pub fn quasi_invariant(mu: &[BigRational]) -> Vec<BigRational> {
        let n = BigRational::from_integer(BigInt::from_usize(mu.len()).unwrap());
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        mu.iter()
            .map(|w| &half * w + &half / &n)
            .collect()
    }

    pub fn edge_measure(g: &Graph, mu: &[BigRational]) -> Vec<BigRational> {
        let raw: Vec<BigRational> = g
            .edge_list()
            .iter()
            .map(|&(u, v)| &mu[u] + &mu[v])
            .collect();
        let total: BigRational = raw.iter().sum();
        assert!(!total.is_zero(), "degenerate edge measure");
        raw.into_iter().map(|w| w / &total).collect()
    }

    /// mu(A) <= 2 nu(A) for every subset A, checked exhaustively (use only
    /// for small n).
    pub fn check_domination_exhaustive(mu: &[BigRational], nu: &[BigRational]) -> bool {
        let n = mu.len();
        assert!(n <= 20, "exhaustive check limited to 20 vertices");
        let two = BigRational::from_integer(BigInt::from(2));
        for mask in 0..(1usize << n) {
            let mut lhs = BigRational::zero();
            let mut rhs = BigRational::zero();
            for v in 0..n {
                if mask & (1 << v) != 0 {
                    lhs += &mu[v];
                    rhs += &nu[v];
                }
            }
            if lhs > &two * &rhs {
                return false;
            }
        }
        true
    }

    /// mu(vertices touched by A) <= max_degree * eta(A) for every edge subset
    /// A, checked exhaustively (small graphs only).
    pub fn check_edge_domination_exhaustive(
        g: &Graph,
        mu: &[BigRational],
        eta: &[BigRational],
    ) -> bool {
        let m = g.n_edges();
        assert!(m <= 20, "exhaustive check limited to 20 edges");
        let delta = BigRational::from_integer(BigInt::from_usize(g.max_degree()).unwrap());
        for mask in 0..(1usize << m) {
            let mut touched = vec![false; g.n_vertices()];
            let mut eta_mass = BigRational::zero();
            for e in 0..m {
                if mask & (1 << e) != 0 {
                    let (u, v) = g.endpoints(e);
                    touched[u] = true;
                    touched[v] = true;
                    eta_mass += &eta[e];
                }
            }
            let mut mu_mass = BigRational::zero();
            for v in 0..g.n_vertices() {
                if touched[v] {
                    mu_mass += &mu[v];
                }
            }
            if mu_mass > &delta * &eta_mass {
                return false;
            }
        }
        true
    }
}
