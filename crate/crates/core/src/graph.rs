//! Bounded-degree multigraph with dart (half-edge) indexing, plus the
//! correctness ("Corr") sets of orientations, partial edge colorings and
//! decorations, line-graph distances and sparse edge classes.
//!
//! Vertices and edges are dense ids from 0. Every edge `e` owns two darts:
//! dart `2e` runs from `endpoints(e).0` to `endpoints(e).1` and dart `2e+1`
//! is its reverse. All tie-breaking in this crate is "lowest id wins".

use std::collections::VecDeque;

use thiserror::Error;

use crate::measure::VertexMeasure;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type DartId = usize;
pub type Color = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(VertexId, VertexId),
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(VertexId, usize),
    #[error("orientation covers {0} edges, graph has {1}")]
    OrientationSizeMismatch(usize, usize),
    #[error("decoration correctness requires even max degree, got {0}")]
    OddMaxDegree(usize),
    #[error("coloring covers {0} edges, graph has {1}")]
    ColoringSizeMismatch(usize, usize),
}

/// Immutable bounded-degree multigraph. Parallel edges are representable,
/// self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    endpoints: Vec<(VertexId, VertexId)>,
    /// Per vertex, the darts whose source is that vertex, ascending.
    adjacency: Vec<Vec<DartId>>,
    max_degree: usize,
}

impl Graph {
    pub fn from_edges(
        n_vertices: usize,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n_vertices];
        let mut endpoints = Vec::with_capacity(edges.len());
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n_vertices {
                return Err(GraphError::VertexOutOfRange(u, n_vertices));
            }
            if v >= n_vertices {
                return Err(GraphError::VertexOutOfRange(v, n_vertices));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u, v));
            }
            endpoints.push((u, v));
            adjacency[u].push(2 * e);
            adjacency[v].push(2 * e + 1);
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            n_vertices,
            endpoints,
            adjacency,
            max_degree,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.endpoints.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e]
    }

    pub fn edge_list(&self) -> &[(VertexId, VertexId)] {
        &self.endpoints
    }

    pub fn dart_edge(&self, d: DartId) -> EdgeId {
        d / 2
    }

    pub fn dart_reverse(&self, d: DartId) -> DartId {
        d ^ 1
    }

    pub fn dart_source(&self, d: DartId) -> VertexId {
        let (u, v) = self.endpoints[d / 2];
        if d % 2 == 0 {
            u
        } else {
            v
        }
    }

    pub fn dart_target(&self, d: DartId) -> VertexId {
        self.dart_source(d ^ 1)
    }

    /// Darts leaving `v`, ascending by id.
    pub fn incident_darts(&self, v: VertexId) -> &[DartId] {
        &self.adjacency[v]
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.adjacency[v].iter().map(|&d| d / 2)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency[v].iter().map(move |&d| self.dart_target(d))
    }

    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (u, w) = self.endpoints[e];
        if v == u {
            w
        } else {
            u
        }
    }

    /// Some(d) if every vertex has degree exactly d.
    pub fn regular_degree(&self) -> Option<usize> {
        if (0..self.n_vertices).all(|v| self.degree(v) == self.max_degree) {
            Some(self.max_degree)
        } else {
            None
        }
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut pairs: Vec<(VertexId, VertexId)> = self
            .endpoints
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        pairs.sort_unstable();
        pairs.windows(2).any(|w| w[0] == w[1])
    }

    /// Component id per vertex (ids are dense, assigned in BFS order from the
    /// lowest unvisited vertex) and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n_vertices];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n_vertices {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &d in &self.adjacency[v] {
                    let w = self.dart_target(d);
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Two-colors the vertices if possible; `None` when an odd cycle exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side = vec![None; self.n_vertices];
        let mut queue = VecDeque::new();
        for start in 0..self.n_vertices {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                let sv = side[v].unwrap();
                for &d in &self.adjacency[v] {
                    let w = self.dart_target(d);
                    match side[w] {
                        None => {
                            side[w] = Some(!sv);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == sv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Eccentricity of `v` within its component (max BFS distance).
    pub fn vertex_eccentricity(&self, v: VertexId) -> usize {
        let mut dist = vec![usize::MAX; self.n_vertices];
        let mut queue = VecDeque::new();
        dist[v] = 0;
        queue.push_back(v);
        let mut ecc = 0;
        while let Some(x) = queue.pop_front() {
            for &d in &self.adjacency[x] {
                let w = self.dart_target(d);
                if dist[w] == usize::MAX {
                    dist[w] = dist[x] + 1;
                    ecc = ecc.max(dist[w]);
                    queue.push_back(w);
                }
            }
        }
        ecc
    }

    /// Edges sharing an endpoint with `e` (line-graph neighbors). May repeat
    /// an edge when two edges are parallel.
    pub fn line_neighbors(&self, e: EdgeId) -> impl Iterator<Item = EdgeId> + '_ {
        let (u, v) = self.endpoints[e];
        self.adjacency[u]
            .iter()
            .chain(self.adjacency[v].iter())
            .map(|&d| d / 2)
            .filter(move |&f| f != e)
    }

    /// Line-graph distance between edges: identical edges are at 0, adjacent
    /// edges at 1. `None` when the edges lie in different components.
    pub fn edge_distance(&self, e: EdgeId, f: EdgeId) -> Option<usize> {
        if e == f {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; self.n_edges()];
        let mut queue = VecDeque::new();
        dist[e] = 0;
        queue.push_back(e);
        while let Some(x) = queue.pop_front() {
            for y in self.line_neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    if y == f {
                        return Some(dist[y]);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// All edges within line-graph distance `radius` of `e`, including `e`.
    pub fn edge_ball(&self, e: EdgeId, radius: usize) -> Vec<EdgeId> {
        let mut dist = vec![usize::MAX; self.n_edges()];
        let mut queue = VecDeque::new();
        let mut ball = vec![e];
        dist[e] = 0;
        queue.push_back(e);
        while let Some(x) = queue.pop_front() {
            if dist[x] == radius {
                continue;
            }
            for y in self.line_neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    ball.push(y);
                    queue.push_back(y);
                }
            }
        }
        ball
    }

    /// Partition of the edge set into classes that are pairwise `k`-separated
    /// in line-graph distance. Greedy over ascending edge ids: an edge takes
    /// the lowest class not used within distance `k - 1`.
    ///
    /// When `k` exceeds the (line-graph) diameter of a component, every pair
    /// of its edges conflicts, so each edge of the component gets its own
    /// class; components share class indices since they are infinitely far
    /// apart.
    pub fn sparse_edge_classes(&self, k: usize) -> Vec<Vec<EdgeId>> {
        assert!(k >= 1, "separation must be at least 1");
        let m = self.n_edges();
        if k == 1 || m == 0 {
            return if m == 0 {
                Vec::new()
            } else {
                vec![(0..m).collect()]
            };
        }
        let (vcomp, ncomp) = self.components();
        // Upper bound 2*ecc(v0)+1 on the line-graph diameter of each component.
        let mut line_diam_bound = vec![0usize; ncomp];
        let mut seen = vec![false; ncomp];
        for v in 0..self.n_vertices {
            let c = vcomp[v];
            if !seen[c] && !self.adjacency[v].is_empty() {
                seen[c] = true;
                line_diam_bound[c] = 2 * self.vertex_eccentricity(v) + 1;
            }
        }
        let mut class_of = vec![usize::MAX; m];
        let mut next_in_comp = vec![0usize; ncomp];
        let mut used = Vec::new();
        for e in 0..m {
            let c = vcomp[self.endpoints[e].0];
            if line_diam_bound[c] < k {
                // Everything in the component conflicts with everything else.
                class_of[e] = next_in_comp[c];
                next_in_comp[c] += 1;
                continue;
            }
            used.clear();
            for f in self.edge_ball(e, k - 1) {
                if class_of[f] != usize::MAX {
                    used.push(class_of[f]);
                }
            }
            used.sort_unstable();
            used.dedup();
            let mut pick = 0;
            for &u in &used {
                if u == pick {
                    pick += 1;
                } else if u > pick {
                    break;
                }
            }
            class_of[e] = pick;
        }
        let n_classes = class_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); n_classes];
        for e in 0..m {
            classes[class_of[e]].push(e);
        }
        classes
    }

    /// Subgraph on the same vertices keeping the marked edges. Returns the
    /// map from new edge ids to the original ones.
    pub fn edge_subgraph(&self, keep: &[bool]) -> (Graph, Vec<EdgeId>) {
        let mut edges = Vec::new();
        let mut map = Vec::new();
        for e in 0..self.n_edges() {
            if keep[e] {
                edges.push(self.endpoints[e]);
                map.push(e);
            }
        }
        let g = Graph::from_edges(self.n_vertices, &edges).expect("subgraph of a valid graph");
        (g, map)
    }

    /// Does the subgraph on the marked edges contain a cycle?
    pub fn has_cycle_within(&self, keep: &[bool]) -> bool {
        let mut visited = vec![false; self.n_vertices];
        let mut stack: Vec<(VertexId, Option<EdgeId>)> = Vec::new();
        for start in 0..self.n_vertices {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            stack.push((start, None));
            while let Some((v, via)) = stack.pop() {
                for &d in &self.adjacency[v] {
                    let e = d / 2;
                    if !keep[e] || Some(e) == via {
                        continue;
                    }
                    let w = self.dart_target(d);
                    if visited[w] {
                        return true;
                    }
                    visited[w] = true;
                    stack.push((w, Some(e)));
                }
            }
        }
        false
    }
}

/// Per-edge direction assignment: for every edge exactly one of its two darts
/// is the out-dart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    forward: Vec<bool>,
}

impl Orientation {
    /// `forward[e] == true` selects dart `2e` (first endpoint -> second).
    pub fn from_forward(forward: Vec<bool>) -> Self {
        Orientation { forward }
    }

    pub fn n_edges(&self) -> usize {
        self.forward.len()
    }

    pub fn is_forward(&self, e: EdgeId) -> bool {
        self.forward[e]
    }

    pub fn forward_bits(&self) -> &[bool] {
        &self.forward
    }

    pub fn tail(&self, g: &Graph, e: EdgeId) -> VertexId {
        let (u, v) = g.endpoints(e);
        if self.forward[e] {
            u
        } else {
            v
        }
    }

    pub fn head(&self, g: &Graph, e: EdgeId) -> VertexId {
        let (u, v) = g.endpoints(e);
        if self.forward[e] {
            v
        } else {
            u
        }
    }

    /// Is dart `d` the out-dart of its edge?
    pub fn is_out_dart(&self, d: DartId) -> bool {
        self.forward[d / 2] == (d % 2 == 0)
    }

    pub fn out_degree(&self, g: &Graph, v: VertexId) -> usize {
        g.incident_darts(v)
            .iter()
            .filter(|&&d| self.is_out_dart(d))
            .count()
    }

    pub fn in_degree(&self, g: &Graph, v: VertexId) -> usize {
        g.degree(v) - self.out_degree(g, v)
    }

    pub fn is_balanced_at(&self, g: &Graph, v: VertexId) -> bool {
        2 * self.out_degree(g, v) == g.degree(v)
    }
}

/// Partial proper edge coloring with palette `{0 .. palette-1}`. The
/// distinguished color is the highest palette index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEdgeColoring {
    colors: Vec<Option<Color>>,
    palette: usize,
}

impl PartialEdgeColoring {
    pub fn new(n_edges: usize, palette: usize) -> Self {
        PartialEdgeColoring {
            colors: vec![None; n_edges],
            palette,
        }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    /// The reserved color **a**: the highest palette index.
    pub fn distinguished(&self) -> Color {
        self.palette - 1
    }

    pub fn n_edges(&self) -> usize {
        self.colors.len()
    }

    pub fn get(&self, e: EdgeId) -> Option<Color> {
        self.colors[e]
    }

    pub fn set(&mut self, e: EdgeId, c: Color) {
        debug_assert!(c < self.palette, "color {} outside palette {}", c, self.palette);
        self.colors[e] = Some(c);
    }

    pub fn unset(&mut self, e: EdgeId) {
        self.colors[e] = None;
    }

    pub fn colors(&self) -> &[Option<Color>] {
        &self.colors
    }

    pub fn domain_size(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(|c| c.is_some())
    }

    /// Edges carrying color `c`, ascending.
    pub fn class_edges(&self, c: Color) -> Vec<EdgeId> {
        self.colors
            .iter()
            .enumerate()
            .filter_map(|(e, &col)| (col == Some(c)).then_some(e))
            .collect()
    }

    /// First properness violation `(vertex, e1, e2)` on the domain, if any.
    pub fn proper_violation(&self, g: &Graph) -> Option<(VertexId, EdgeId, EdgeId)> {
        let mut seen: Vec<Option<EdgeId>> = vec![None; self.palette];
        for v in 0..g.n_vertices() {
            for s in seen.iter_mut() {
                *s = None;
            }
            for &d in g.incident_darts(v) {
                let e = d / 2;
                if let Some(c) = self.colors[e] {
                    if let Some(prev) = seen[c] {
                        return Some((v, prev, e));
                    }
                    seen[c] = Some(e);
                }
            }
        }
        None
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.proper_violation(g).is_none()
    }

    /// Colors of the palette not present among the domain edges at `v`.
    pub fn missing_at(&self, g: &Graph, v: VertexId) -> Vec<Color> {
        let mut present = vec![false; self.palette];
        for e in g.incident_edges(v) {
            if let Some(c) = self.colors[e] {
                present[c] = true;
            }
        }
        (0..self.palette).filter(|&c| !present[c]).collect()
    }
}

/// Where a structure is locally correct, and how much measure that carries.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrReport {
    /// Vertices at which the structure is correct, ascending.
    pub corr_vertices: Vec<VertexId>,
    /// mu-mass of the correct set.
    pub corr_mass: f64,
    /// mu-mass of the correct vertices whose whole neighborhood is correct.
    pub deep_corr_mass: f64,
}

impl CorrReport {
    fn from_flags(g: &Graph, corr: &[bool], mu: &VertexMeasure) -> Self {
        let n = g.n_vertices();
        let corr_vertices: Vec<VertexId> = (0..n).filter(|&v| corr[v]).collect();
        let deep: Vec<bool> = (0..n)
            .map(|v| corr[v] && g.neighbors(v).all(|w| corr[w]))
            .collect();
        let corr_mass = mu.mass_of_flags(corr);
        // The deep set is contained in the correct set; keep the float masses
        // ordered the same way.
        let deep_corr_mass = mu.mass_of_flags(&deep).min(corr_mass);
        CorrReport {
            corr_vertices,
            corr_mass,
            deep_corr_mass,
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.corr_vertices.binary_search(&v).is_ok()
    }
}

/// Corr(S): vertices with equal in- and out-degree.
pub fn corr_of_orientation(g: &Graph, s: &Orientation, mu: &VertexMeasure) -> CorrReport {
    let corr: Vec<bool> = (0..g.n_vertices())
        .map(|v| s.is_balanced_at(g, v))
        .collect();
    CorrReport::from_flags(g, &corr, mu)
}

/// Corr(c): vertices whose incident edges are all colored, with distinct colors.
pub fn corr_of_coloring(g: &Graph, c: &PartialEdgeColoring, mu: &VertexMeasure) -> CorrReport {
    let mut corr = vec![false; g.n_vertices()];
    let mut seen = vec![false; c.palette().max(1)];
    for v in 0..g.n_vertices() {
        for s in seen.iter_mut() {
            *s = false;
        }
        let mut ok = true;
        for e in g.incident_edges(v) {
            match c.get(e) {
                None => {
                    ok = false;
                    break;
                }
                Some(col) => {
                    if seen[col] {
                        ok = false;
                        break;
                    }
                    seen[col] = true;
                }
            }
        }
        corr[v] = ok;
    }
    CorrReport::from_flags(g, &corr, mu)
}

/// Corr(S, c): balanced vertices whose in- and out-edges are colored and
/// carry distinct colors on each side.
pub fn corr_of_decoration(
    g: &Graph,
    s: &Orientation,
    c: &PartialEdgeColoring,
    mu: &VertexMeasure,
) -> Result<CorrReport, GraphError> {
    if g.max_degree() % 2 != 0 {
        return Err(GraphError::OddMaxDegree(g.max_degree()));
    }
    let mut corr = vec![false; g.n_vertices()];
    let palette = c.palette().max(1);
    let mut seen_in = vec![false; palette];
    let mut seen_out = vec![false; palette];
    for v in 0..g.n_vertices() {
        if !s.is_balanced_at(g, v) {
            continue;
        }
        for x in seen_in.iter_mut() {
            *x = false;
        }
        for x in seen_out.iter_mut() {
            *x = false;
        }
        let mut ok = true;
        for &d in g.incident_darts(v) {
            let e = d / 2;
            let Some(col) = c.get(e) else {
                ok = false;
                break;
            };
            let side = if s.is_out_dart(d) {
                &mut seen_out
            } else {
                &mut seen_in
            };
            if side[col] {
                ok = false;
                break;
            }
            side[col] = true;
        }
        corr[v] = ok;
    }
    Ok(CorrReport::from_flags(g, &corr, mu))
}
