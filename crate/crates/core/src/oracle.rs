//! Independent brute-force references: exact chromatic index by
//! backtracking, Euler-circuit balanced orientations, exact decorations of
//! small graphs, and naive recounts of the Corr sets.

use thiserror::Error;

use crate::graph::{
    Color, EdgeId, Graph, GraphError, Orientation, PartialEdgeColoring, VertexId,
};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {edges} edges, oracle cap is {cap}")]
    CapExceeded { edges: usize, cap: usize },
    #[error("vertex {0} has odd degree")]
    OddDegreeVertex(VertexId),
    #[error("graph is not regular of even degree")]
    NotEvenRegular,
    #[error("no proper edge coloring found within the palette bound")]
    SearchExhausted,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_explored: u64,
}

#[derive(Debug, Clone)]
pub struct ChromaticIndexOracle {
    pub chromatic_index: usize,
    pub coloring: PartialEdgeColoring,
    pub stats: SearchStats,
}

fn try_color_edges(
    g: &Graph,
    order: &[EdgeId],
    k: usize,
    stats: &mut SearchStats,
) -> Option<Vec<Color>> {
    let mut assigned: Vec<Option<Color>> = vec![None; g.n_edges()];
    let mut used: Vec<u64> = vec![0; g.n_vertices()];
    fn rec(
        g: &Graph,
        order: &[EdgeId],
        depth: usize,
        k: usize,
        assigned: &mut [Option<Color>],
        used: &mut [u64],
        stats: &mut SearchStats,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let e = order[depth];
        let (u, v) = g.endpoints(e);
        for c in 0..k {
            let bit = 1u64 << c;
            if used[u] & bit != 0 || used[v] & bit != 0 {
                continue;
            }
            stats.nodes_explored += 1;
            assigned[e] = Some(c);
            used[u] |= bit;
            used[v] |= bit;
            if rec(g, order, depth + 1, k, assigned, used, stats) {
                return true;
            }
            assigned[e] = None;
            used[u] &= !bit;
            used[v] &= !bit;
        }
        false
    }
    if rec(g, order, 0, k, &mut assigned, &mut used, stats) {
        Some(assigned.into_iter().map(|c| c.unwrap()).collect())
    } else {
        None
    }
}

/// Exact chromatic index by backtracking, edges ordered by descending
/// endpoint degree sum. For bipartite inputs the result equals the maximum
/// degree.
pub fn exact_chromatic_index(g: &Graph, cap: usize) -> Result<ChromaticIndexOracle, OracleError> {
    if g.n_edges() > cap {
        return Err(OracleError::CapExceeded {
            edges: g.n_edges(),
            cap,
        });
    }
    let mut order: Vec<EdgeId> = (0..g.n_edges()).collect();
    order.sort_by_key(|&e| {
        let (u, v) = g.endpoints(e);
        (std::cmp::Reverse(g.degree(u) + g.degree(v)), e)
    });
    let mut stats = SearchStats::default();
    // Multiplicity raises the bound above Vizing's Delta+1 on multigraphs.
    let mut multiplicity = 1;
    {
        let mut pairs: Vec<(usize, usize)> = g
            .edge_list()
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        pairs.sort_unstable();
        let mut run = 1;
        for w in pairs.windows(2) {
            if w[0] == w[1] {
                run += 1;
                multiplicity = multiplicity.max(run);
            } else {
                run = 1;
            }
        }
    }
    for k in g.max_degree().max(if g.n_edges() > 0 { 1 } else { 0 })..=g.max_degree() + multiplicity
    {
        if k > 64 {
            break;
        }
        if let Some(colors) = try_color_edges(g, &order, k, &mut stats) {
            let mut coloring = PartialEdgeColoring::new(g.n_edges(), k.max(1));
            for (e, &c) in colors.iter().enumerate() {
                coloring.set(e, c);
            }
            debug_assert!(coloring.is_proper(g));
            debug_assert!(!g.is_bipartite() || k == g.max_degree());
            return Ok(ChromaticIndexOracle {
                chromatic_index: k,
                coloring,
                stats,
            });
        }
    }
    if g.n_edges() == 0 {
        return Ok(ChromaticIndexOracle {
            chromatic_index: 0,
            coloring: PartialEdgeColoring::new(0, 1),
            stats,
        });
    }
    Err(OracleError::SearchExhausted)
}

/// Balanced orientation along an Euler circuit of each component; exact on
/// every even-degree graph.
pub fn euler_balanced_orientation(g: &Graph) -> Result<Orientation, OracleError> {
    if let Some(v) = (0..g.n_vertices()).find(|&v| g.degree(v) % 2 != 0) {
        return Err(OracleError::OddDegreeVertex(v));
    }
    let mut forward = vec![false; g.n_edges()];
    let mut used = vec![false; g.n_edges()];
    let mut next_ptr = vec![0usize; g.n_vertices()];
    for start in 0..g.n_vertices() {
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            let darts = g.incident_darts(v);
            let mut stepped = false;
            while next_ptr[v] < darts.len() {
                let d = darts[next_ptr[v]];
                next_ptr[v] += 1;
                let e = g.dart_edge(d);
                if used[e] {
                    continue;
                }
                used[e] = true;
                // Traversed v -> target: the out-dart is d.
                forward[e] = d % 2 == 0;
                stack.push(g.dart_target(d));
                stepped = true;
                break;
            }
            if !stepped {
                stack.pop();
            }
        }
    }
    Ok(Orientation::from_forward(forward))
}

#[derive(Debug, Clone)]
pub struct SchreierOracle {
    pub orientation: Orientation,
    pub labels: PartialEdgeColoring,
    pub stats: SearchStats,
}

/// Exact Schreier decoration of a small 2k-regular graph: Euler orientation,
/// then an exact edge coloring of the (k-regular bipartite) double cover,
/// pulled back as labels. The result is correct at every vertex.
pub fn exact_schreier_decoration(g: &Graph, cap: usize) -> Result<SchreierOracle, OracleError> {
    let two_delta = g
        .regular_degree()
        .filter(|d| d % 2 == 0 && *d > 0)
        .ok_or(OracleError::NotEvenRegular)?;
    if g.n_edges() > cap {
        return Err(OracleError::CapExceeded {
            edges: g.n_edges(),
            cap,
        });
    }
    let delta = two_delta / 2;
    let s = euler_balanced_orientation(g)?;
    // Balanced everywhere, so the cover keeps every vertex and edge.
    let n = g.n_vertices();
    let mut edges = Vec::with_capacity(g.n_edges());
    for e in 0..g.n_edges() {
        edges.push((s.tail(g, e), n + s.head(g, e)));
    }
    let cover = Graph::from_edges(2 * n, &edges)?;
    let oracle = exact_chromatic_index(&cover, cap)?;
    debug_assert_eq!(oracle.chromatic_index, delta);
    let mut labels = PartialEdgeColoring::new(g.n_edges(), delta);
    for e in 0..g.n_edges() {
        labels.set(e, oracle.coloring.get(e).unwrap());
    }
    Ok(SchreierOracle {
        orientation: s,
        labels,
        stats: oracle.stats,
    })
}

/// Naive per-vertex recounts, written against the edge list rather than the
/// dart structure; the second implementation behind the Corr computations.
pub mod recount {
    use super::*;

    pub fn corr_orientation_flags(g: &Graph, s: &Orientation) -> Vec<bool> {
        let n = g.n_vertices();
        let mut inn = vec![0usize; n];
        let mut out = vec![0usize; n];
        for e in 0..g.n_edges() {
            out[s.tail(g, e)] += 1;
            inn[s.head(g, e)] += 1;
        }
        (0..n).map(|v| inn[v] == out[v]).collect()
    }

    pub fn corr_coloring_flags(g: &Graph, c: &PartialEdgeColoring) -> Vec<bool> {
        let n = g.n_vertices();
        let mut colors_at: Vec<Vec<Option<Color>>> = vec![Vec::new(); n];
        for (e, &(u, v)) in g.edge_list().iter().enumerate() {
            colors_at[u].push(c.get(e));
            colors_at[v].push(c.get(e));
        }
        colors_at
            .into_iter()
            .map(|mut cols| {
                if cols.iter().any(|c| c.is_none()) {
                    return false;
                }
                cols.sort_unstable();
                cols.windows(2).all(|w| w[0] != w[1])
            })
            .collect()
    }

    pub fn corr_decoration_flags(
        g: &Graph,
        s: &Orientation,
        c: &PartialEdgeColoring,
    ) -> Vec<bool> {
        let n = g.n_vertices();
        let mut in_cols: Vec<Vec<Option<Color>>> = vec![Vec::new(); n];
        let mut out_cols: Vec<Vec<Option<Color>>> = vec![Vec::new(); n];
        for e in 0..g.n_edges() {
            out_cols[s.tail(g, e)].push(c.get(e));
            in_cols[s.head(g, e)].push(c.get(e));
        }
        (0..n)
            .map(|v| {
                if in_cols[v].len() != out_cols[v].len() {
                    return false;
                }
                for side in [&mut in_cols[v], &mut out_cols[v]] {
                    if side.iter().any(|c| c.is_none()) {
                        return false;
                    }
                    side.sort_unstable();
                    if side.windows(2).any(|w| w[0] == w[1]) {
                        return false;
                    }
                }
                true
            })
            .collect()
    }
}
