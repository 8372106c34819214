//! Seed-deterministic graph instance generators.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Orientation, PartialEdgeColoring, VertexId};

const RETRY_BUDGET: usize = 1_000;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no simple pairing found within {0} retries")]
    RetriesExhausted(usize),
    #[error("unknown generator family '{0}'")]
    UnknownFamily(String),
    #[error("parameter '{0}' missing or malformed")]
    BadParam(String),
}

/// Simple d-regular graph on n vertices via the configuration model: stubs
/// are shuffled and paired, rejecting loops and repeated pairs; a full
/// reshuffle happens when the scan gets stuck.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if n * d % 2 != 0 {
        return Err(GenError::Infeasible(format!(
            "n*d must be even, got n={}, d={}",
            n, d
        )));
    }
    if d >= n {
        return Err(GenError::Infeasible(format!("need d < n, got d={}, n={}", d, n)));
    }
    if d == 0 {
        return Graph::from_edges(n, &[]).map_err(|e| GenError::Infeasible(e.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<VertexId> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    'attempt: for _ in 0..RETRY_BUDGET {
        stubs.shuffle(&mut rng);
        let mut used = vec![false; stubs.len()];
        let mut present: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut cursor = 0;
        for i in 0..stubs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let u = stubs[i];
            cursor = cursor.max(i + 1);
            let mut partner = None;
            for j in i + 1..stubs.len() {
                if used[j] {
                    continue;
                }
                let v = stubs[j];
                let key = (u.min(v), u.max(v));
                if u != v && !present.contains(&key) {
                    partner = Some((j, key));
                    break;
                }
            }
            match partner {
                Some((j, key)) => {
                    used[j] = true;
                    present.insert(key);
                    edges.push((u, stubs[j]));
                }
                None => continue 'attempt,
            }
        }
        return Graph::from_edges(n, &edges).map_err(|e| GenError::Infeasible(e.to_string()));
    }
    Err(GenError::RetriesExhausted(RETRY_BUDGET))
}

/// Torus grid with its canonical shift decoration.
#[derive(Debug, Clone)]
pub struct TorusInstance {
    pub graph: Graph,
    pub dims: Vec<usize>,
    /// Canonical orientation: every edge points along its shift.
    pub orientation: Orientation,
    /// Canonical labels: the axis of each edge; palette = number of axes.
    pub labels: PartialEdgeColoring,
}

/// Cayley-style torus over the given side lengths: one 2-regular layer per
/// axis, `2 * dims.len()`-regular in total. Each side must be at least 3.
pub fn gen_torus(dims: &[usize]) -> Result<TorusInstance, GenError> {
    if dims.is_empty() {
        return Err(GenError::Infeasible("torus needs at least one dimension".into()));
    }
    if let Some(&side) = dims.iter().find(|&&s| s < 3) {
        return Err(GenError::Infeasible(format!(
            "torus sides must be at least 3, got {}",
            side
        )));
    }
    let n: usize = dims.iter().product();
    let mut strides = vec![1usize; dims.len()];
    for axis in (0..dims.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * dims[axis + 1];
    }
    let shift = |v: usize, axis: usize| -> usize {
        let side = dims[axis];
        let stride = strides[axis];
        let coord = (v / stride) % side;
        v - coord * stride + ((coord + 1) % side) * stride
    };
    let mut edges = Vec::with_capacity(n * dims.len());
    let mut label_of = Vec::with_capacity(n * dims.len());
    for (axis, _) in dims.iter().enumerate() {
        for v in 0..n {
            edges.push((v, shift(v, axis)));
            label_of.push(axis);
        }
    }
    let graph = Graph::from_edges(n, &edges).map_err(|e| GenError::Infeasible(e.to_string()))?;
    let orientation = Orientation::from_forward(vec![true; edges.len()]);
    let mut labels = PartialEdgeColoring::new(edges.len(), dims.len());
    for (e, &axis) in label_of.iter().enumerate() {
        labels.set(e, axis);
    }
    Ok(TorusInstance {
        graph,
        dims: dims.to_vec(),
        orientation,
        labels,
    })
}

/// Simple bipartite d-regular graph as a union of d random perfect matchings.
/// Each matching is drawn by giving every left vertex a random still-free
/// partner that repeats no earlier edge, restarting the matching when a row
/// gets stuck.
pub fn gen_bipartite_regular(n_side: usize, d: usize, seed: u64) -> Result<Graph, GenError> {
    if d > n_side {
        return Err(GenError::Infeasible(format!(
            "need d <= n_side, got d={}, n_side={}",
            d, n_side
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(n_side * d);
    let mut present: std::collections::HashSet<(VertexId, VertexId)> =
        std::collections::HashSet::with_capacity(n_side * d);
    for _ in 0..d {
        let mut matching: Option<Vec<usize>> = None;
        for _ in 0..RETRY_BUDGET {
            let mut avail: Vec<usize> = (0..n_side).collect();
            let mut perm = Vec::with_capacity(n_side);
            let mut stuck = false;
            for i in 0..n_side {
                let k = avail.len();
                let start = rng.gen_range(0..k);
                let pick = (0..k)
                    .map(|t| (start + t) % k)
                    .find(|&idx| !present.contains(&(i, avail[idx])));
                match pick {
                    Some(idx) => {
                        perm.push(avail.swap_remove(idx));
                    }
                    None => {
                        stuck = true;
                        break;
                    }
                }
            }
            if !stuck {
                matching = Some(perm);
                break;
            }
        }
        let perm = matching.ok_or(GenError::RetriesExhausted(RETRY_BUDGET))?;
        for (i, &j) in perm.iter().enumerate() {
            present.insert((i, j));
            edges.push((i, n_side + j));
        }
    }
    Graph::from_edges(2 * n_side, &edges).map_err(|e| GenError::Infeasible(e.to_string()))
}

/// Depth-truncated even tree: the root has `branching` children, interior
/// vertices have total degree `branching`, leaves sit at the given depth.
/// Vertices are labeled in BFS order.
pub fn gen_truncated_even_tree(branching: usize, depth: usize) -> Result<Graph, GenError> {
    if branching % 2 != 0 || branching < 2 {
        return Err(GenError::Infeasible(format!(
            "branching must be even and at least 2, got {}",
            branching
        )));
    }
    let mut edges = Vec::new();
    let mut next_id = 1usize;
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let children = if level == 0 { branching } else { branching - 1 };
        let mut next_frontier = Vec::with_capacity(frontier.len() * children);
        for &v in &frontier {
            for _ in 0..children {
                edges.push((v, next_id));
                next_frontier.push(next_id);
                next_id += 1;
            }
        }
        frontier = next_frontier;
    }
    Graph::from_edges(next_id, &edges).map_err(|e| GenError::Infeasible(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct RotationInstance {
    pub graph: Graph,
    /// gcd(step, n) per rotation layer; a layer splits into that many cycles.
    pub gcds: Vec<usize>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Union of rotation layers on Z/n: layer k has the edges {i, i+k mod n}.
/// Each layer is 2-regular, the union `2 * steps.len()`-regular. Steps that
/// would produce loops, parallel pairs or coinciding layers are rejected.
pub fn gen_rotation_graph(n: usize, steps: &[usize]) -> Result<RotationInstance, GenError> {
    if n < 3 {
        return Err(GenError::Infeasible(format!("need n >= 3, got {}", n)));
    }
    if steps.is_empty() {
        return Err(GenError::Infeasible("need at least one rotation step".into()));
    }
    let mut normalized = BTreeSet::new();
    for &k in steps {
        let k = k % n;
        if k == 0 {
            return Err(GenError::Infeasible("step 0 mod n gives self-loops".into()));
        }
        if 2 * k == n {
            return Err(GenError::Infeasible(format!(
                "step {} = n/2 gives parallel edges",
                k
            )));
        }
        if !normalized.insert(k.min(n - k)) {
            return Err(GenError::Infeasible(format!(
                "steps {} and {} generate the same layer",
                k,
                n - k
            )));
        }
    }
    let mut edges = Vec::with_capacity(n * steps.len());
    let mut gcds = Vec::with_capacity(steps.len());
    for &k in steps {
        let k = k % n;
        gcds.push(gcd(k, n));
        for i in 0..n {
            edges.push((i, (i + k) % n));
        }
    }
    let graph = Graph::from_edges(n, &edges).map_err(|e| GenError::Infeasible(e.to_string()))?;
    Ok(RotationInstance { graph, gcds })
}

/// A named generator family with parameters, for plans and the CLI.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorSpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub graph: Graph,
    pub dims: Option<Vec<usize>>,
    pub canonical: Option<(Orientation, PartialEdgeColoring)>,
}

impl GeneratorSpec {
    pub fn new(family: &str, params: &[(&str, String)], seed: u64) -> Self {
        GeneratorSpec {
            family: family.to_string(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            seed,
        }
    }

    fn usize_param(&self, key: &str) -> Result<usize, GenError> {
        self.params
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| GenError::BadParam(key.to_string()))
    }

    /// Parses an `x`-separated list, e.g. `dims=5x5` or `steps=1x34`.
    fn list_param(&self, key: &str) -> Result<Vec<usize>, GenError> {
        let raw = self
            .params
            .get(key)
            .ok_or_else(|| GenError::BadParam(key.to_string()))?;
        raw.split('x')
            .map(|t| t.parse().map_err(|_| GenError::BadParam(key.to_string())))
            .collect()
    }

    pub fn build(&self) -> Result<GeneratedInstance, GenError> {
        match self.family.as_str() {
            "random-regular" => {
                let g = gen_random_regular(self.usize_param("n")?, self.usize_param("d")?, self.seed)?;
                Ok(GeneratedInstance {
                    graph: g,
                    dims: None,
                    canonical: None,
                })
            }
            "torus" => {
                let t = gen_torus(&self.list_param("dims")?)?;
                Ok(GeneratedInstance {
                    graph: t.graph,
                    dims: Some(t.dims),
                    canonical: Some((t.orientation, t.labels)),
                })
            }
            "bipartite-regular" => {
                let g = gen_bipartite_regular(
                    self.usize_param("n_side")?,
                    self.usize_param("d")?,
                    self.seed,
                )?;
                Ok(GeneratedInstance {
                    graph: g,
                    dims: None,
                    canonical: None,
                })
            }
            "truncated-tree" => {
                let g = gen_truncated_even_tree(
                    self.usize_param("branching")?,
                    self.usize_param("depth")?,
                )?;
                Ok(GeneratedInstance {
                    graph: g,
                    dims: None,
                    canonical: None,
                })
            }
            "rotation" => {
                let r = gen_rotation_graph(self.usize_param("n")?, &self.list_param("steps")?)?;
                Ok(GeneratedInstance {
                    graph: r.graph,
                    dims: None,
                    canonical: None,
                })
            }
            other => Err(GenError::UnknownFamily(other.to_string())),
        }
    }

    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_regular_k4() {
        let g = gen_random_regular(4, 3, 1).unwrap();
        assert_eq!(g.n_edges(), 6);
        for v in 0..4 {
            assert_eq!(g.degree(v), 3);
        }
    }

    #[test]
    fn random_regular_rejects_odd_product() {
        assert!(matches!(
            gen_random_regular(5, 3, 0),
            Err(GenError::Infeasible(_))
        ));
    }

    #[test]
    fn random_regular_is_seed_deterministic() {
        let a = gen_random_regular(60, 4, 9).unwrap();
        let b = gen_random_regular(60, 4, 9).unwrap();
        assert_eq!(a.edge_list(), b.edge_list());
        let c = gen_random_regular(60, 4, 10).unwrap();
        assert_ne!(a.edge_list(), c.edge_list());
    }

    #[test]
    fn torus_5x5_counts() {
        let t = gen_torus(&[5, 5]).unwrap();
        assert_eq!(t.graph.n_vertices(), 25);
        assert_eq!(t.graph.n_edges(), 50);
        assert_eq!(t.graph.regular_degree(), Some(4));
    }

    #[test]
    fn torus_1d_is_cycle() {
        let t = gen_torus(&[3]).unwrap();
        assert_eq!(t.graph.regular_degree(), Some(2));
        assert_eq!(t.graph.n_edges(), 3);
    }

    #[test]
    fn torus_rejects_small_sides() {
        assert!(gen_torus(&[2, 5]).is_err());
    }

    #[test]
    fn bipartite_regular_k33() {
        let g = gen_bipartite_regular(3, 3, 0).unwrap();
        assert_eq!(g.n_edges(), 9);
        assert!(g.is_bipartite());
        for v in 0..6 {
            assert_eq!(g.degree(v), 3);
        }
    }

    #[test]
    fn bipartite_regular_is_odd_cycle_free() {
        for seed in 0..5 {
            let g = gen_bipartite_regular(30, 4, seed).unwrap();
            assert!(g.is_bipartite());
            assert!(!g.has_parallel_edges());
        }
    }

    #[test]
    fn truncated_tree_branching_2_is_path() {
        let g = gen_truncated_even_tree(2, 5).unwrap();
        assert_eq!(g.n_edges(), 10);
        assert_eq!(g.n_vertices(), 11);
        let leaves = (0..11).filter(|&v| g.degree(v) == 1).count();
        assert_eq!(leaves, 2);
    }

    #[test]
    fn truncated_tree_degree_contract() {
        let g = gen_truncated_even_tree(4, 3).unwrap();
        // 4 * 3^(depth-1) leaves, 2 * 3^depth - 1 vertices.
        assert_eq!(g.n_vertices(), 2 * 27 - 1);
        let leaves = (0..g.n_vertices()).filter(|&v| g.degree(v) == 1).count();
        assert_eq!(leaves, 4 * 9);
        for v in 0..g.n_vertices() {
            assert!(g.degree(v) == 4 || g.degree(v) == 1);
        }
        let single = gen_truncated_even_tree(4, 0).unwrap();
        assert_eq!(single.n_vertices(), 1);
        assert_eq!(single.n_edges(), 0);
    }

    #[test]
    fn rotation_graph_shapes() {
        let r = gen_rotation_graph(10, &[1]).unwrap();
        assert_eq!(r.graph.regular_degree(), Some(2));
        assert_eq!(r.gcds, vec![1]);

        let r = gen_rotation_graph(89, &[1, 34]).unwrap();
        assert_eq!(r.graph.regular_degree(), Some(4));

        // gcd(g, n) = g: the layer splits into g cycles.
        let r = gen_rotation_graph(12, &[3]).unwrap();
        assert_eq!(r.gcds, vec![3]);
        let (comp, count) = r.graph.components();
        assert_eq!(count, 3);
        assert_eq!(comp.len(), 12);
    }

    #[test]
    fn rotation_graph_rejects_degenerate_steps() {
        assert!(gen_rotation_graph(10, &[5]).is_err());
        assert!(gen_rotation_graph(10, &[0]).is_err());
        assert!(gen_rotation_graph(10, &[3, 7]).is_err());
    }

    #[test]
    fn spec_round_trip_builds() {
        let spec = GeneratorSpec::new("torus", &[("dims", "4x4".into())], 0);
        let inst = spec.build().unwrap();
        assert_eq!(inst.graph.n_vertices(), 16);
        assert!(inst.canonical.is_some());
        assert_eq!(inst.dims, Some(vec![4, 4]));
    }
}
