//! Approximate balanced orientation: a maximal edge-disjoint cycle packing,
//! a stage-indexed system of growing disjoint paths on the acyclic residual,
//! and the induced orientations whose failure set shrinks to the odd-degree
//! boundary.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{
    corr_of_orientation, CorrReport, EdgeId, Graph, Orientation, VertexId,
};
use crate::measure::VertexMeasure;

#[derive(Debug, Error, PartialEq)]
pub enum OrientError {
    #[error("vertex {0} has odd degree")]
    OddDegreeVertex(VertexId),
    #[error("path systems require an acyclic graph")]
    CyclicInput,
    #[error("edge {0} is covered by neither a cycle nor a path")]
    UncoveredEdge(EdgeId),
    #[error("edge {0} is covered twice")]
    DoublyCoveredEdge(EdgeId),
    #[error("path endpoint graph is not two-colorable; input paths overlap or cycle")]
    EndpointGraphOddCycle,
}

// ---------------------------------------------------------------------------
// Cycle packing
// ---------------------------------------------------------------------------

/// A maximal family of pairwise edge-disjoint cycles and the acyclic rest.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclePacking {
    /// Each cycle lists its edges in traversal order.
    pub cycles: Vec<Vec<EdgeId>>,
    /// Edges on no cycle of the family, ascending.
    pub residual: Vec<EdgeId>,
}

impl CyclePacking {
    pub fn residual_mask(&self, n_edges: usize) -> Vec<bool> {
        let mut mask = vec![false; n_edges];
        for &e in &self.residual {
            mask[e] = true;
        }
        mask
    }
}

/// Greedy maximal edge-disjoint cycle packing by depth-first search: when the
/// walk revisits a vertex of the current trail the enclosed cycle is removed,
/// and a fully backtracked edge can never lie on a residual cycle again, so
/// the residual is a forest. Runs in linear time.
pub fn pack_cycles(g: &Graph) -> CyclePacking {
    const NO_EDGE: EdgeId = usize::MAX;
    let m = g.n_edges();
    let mut consumed = vec![false; m];
    let mut in_cycle = vec![false; m];
    let mut cycles: Vec<Vec<EdgeId>> = Vec::new();
    let mut next_ptr = vec![0usize; g.n_vertices()];
    let mut pos = vec![usize::MAX; g.n_vertices()];
    let mut trail: Vec<(VertexId, EdgeId)> = Vec::new();

    for start in 0..g.n_vertices() {
        trail.push((start, NO_EDGE));
        pos[start] = 0;
        while let Some(&(v, incoming)) = trail.last() {
            let darts = g.incident_darts(v);
            let mut step = None;
            while next_ptr[v] < darts.len() {
                let d = darts[next_ptr[v]];
                let e = g.dart_edge(d);
                if consumed[e] || e == incoming {
                    next_ptr[v] += 1;
                    continue;
                }
                step = Some(d);
                break;
            }
            match step {
                Some(d) => {
                    let e = g.dart_edge(d);
                    let w = g.dart_target(d);
                    if pos[w] != usize::MAX {
                        let p = pos[w];
                        let mut cycle = Vec::with_capacity(trail.len() - p);
                        for &(x, inc) in &trail[p + 1..] {
                            cycle.push(inc);
                            pos[x] = usize::MAX;
                        }
                        cycle.push(e);
                        for &ce in &cycle {
                            consumed[ce] = true;
                            in_cycle[ce] = true;
                        }
                        trail.truncate(p + 1);
                        cycles.push(cycle);
                    } else {
                        pos[w] = trail.len();
                        trail.push((w, e));
                    }
                }
                None => {
                    trail.pop();
                    pos[v] = usize::MAX;
                    if incoming != NO_EDGE {
                        consumed[incoming] = true;
                    }
                }
            }
        }
    }
    let residual: Vec<EdgeId> = (0..m).filter(|&e| !in_cycle[e]).collect();
    CyclePacking { cycles, residual }
}

// ---------------------------------------------------------------------------
// Path systems
// ---------------------------------------------------------------------------

/// Stage-n family of pairwise disjoint paths covering the residual edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSystem {
    pub stage: usize,
    /// Edge sequences, each ordered from one path end to the other.
    pub paths: Vec<Vec<EdgeId>>,
    /// Cumulative merge record: at `vertex`, the path ending with `attach_a`
    /// was joined to the path ending with `attach_b`. Involutive per vertex:
    /// each (edge, vertex) slot is paired at most once.
    pub pairing: Vec<(VertexId, EdgeId, EdgeId)>,
    /// Vertices that are an endpoint of some path, ascending.
    pub endpoint_vertices: Vec<VertexId>,
}

impl PathSystem {
    pub fn empty(stage: usize) -> Self {
        PathSystem {
            stage,
            paths: Vec::new(),
            pairing: Vec::new(),
            endpoint_vertices: Vec::new(),
        }
    }

    /// Translates edge ids, e.g. from a residual subgraph back to its parent.
    pub fn map_edge_ids(&self, map: &[EdgeId]) -> PathSystem {
        PathSystem {
            stage: self.stage,
            paths: self
                .paths
                .iter()
                .map(|p| p.iter().map(|&e| map[e]).collect())
                .collect(),
            pairing: self
                .pairing
                .iter()
                .map(|&(v, a, b)| (v, map[a], map[b]))
                .collect(),
            endpoint_vertices: self.endpoint_vertices.clone(),
        }
    }
}

/// Seed scales for path growth: stage n uses separation `base * growth^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSchedule {
    pub base: usize,
    pub growth: usize,
}

impl Default for SeedSchedule {
    fn default() -> Self {
        SeedSchedule { base: 3, growth: 2 }
    }
}

impl SeedSchedule {
    pub fn separation(&self, stage: usize) -> usize {
        let mut sep = self.base;
        for _ in 0..stage {
            sep = sep.saturating_mul(self.growth);
        }
        sep
    }

    /// Pieces must sit within line-graph distance < separation/3 of a seed.
    pub fn radius(&self, stage: usize) -> usize {
        (self.separation(stage) + 2) / 3 - 1
    }
}

struct PathRec {
    edges: Vec<EdgeId>,
    tail: VertexId,
    head: VertexId,
}

struct PathForest {
    paths: Vec<Option<PathRec>>,
    path_of_edge: Vec<usize>,
    /// Per vertex: attaching edge of each path end at that vertex -> path id.
    ends_at: Vec<BTreeMap<EdgeId, usize>>,
    merges: Vec<(VertexId, EdgeId, EdgeId)>,
}

impl PathForest {
    fn new(g: &Graph) -> Self {
        let m = g.n_edges();
        let mut ends_at = vec![BTreeMap::new(); g.n_vertices()];
        let mut paths = Vec::with_capacity(m);
        for e in 0..m {
            let (u, v) = g.endpoints(e);
            paths.push(Some(PathRec {
                edges: vec![e],
                tail: u,
                head: v,
            }));
            ends_at[u].insert(e, e);
            ends_at[v].insert(e, e);
        }
        PathForest {
            paths,
            path_of_edge: (0..m).collect(),
            ends_at,
            merges: Vec::new(),
        }
    }

    fn attach_edge(&self, pid: usize, x: VertexId) -> EdgeId {
        let p = self.paths[pid].as_ref().unwrap();
        if p.tail == x {
            p.edges[0]
        } else {
            debug_assert_eq!(p.head, x);
            *p.edges.last().unwrap()
        }
    }

    fn reverse(&mut self, pid: usize) {
        let p = self.paths[pid].as_mut().unwrap();
        p.edges.reverse();
        std::mem::swap(&mut p.tail, &mut p.head);
    }

    /// Joins path `rid` onto `pid` at their shared end vertex `x`.
    fn merge(&mut self, pid: usize, x: VertexId, rid: usize) {
        debug_assert_ne!(pid, rid);
        let p_attach = self.attach_edge(pid, x);
        let r_attach = self.attach_edge(rid, x);
        self.ends_at[x].remove(&p_attach);
        self.ends_at[x].remove(&r_attach);
        self.merges.push((x, p_attach, r_attach));
        if self.paths[pid].as_ref().unwrap().head != x {
            self.reverse(pid);
        }
        if self.paths[rid].as_ref().unwrap().tail != x {
            self.reverse(rid);
        }
        let r = self.paths[rid].take().unwrap();
        for &e in &r.edges {
            self.path_of_edge[e] = pid;
        }
        let p = self.paths[pid].as_mut().unwrap();
        p.edges.extend(r.edges.iter().copied());
        p.head = r.head;
        // The far end of the absorbed path keeps its attaching edge; only the
        // owning path changes.
        let far_attach = *r.edges.last().unwrap();
        self.ends_at[r.head].insert(far_attach, pid);
    }

    /// Extends the path maximally by absorbing whole current paths hanging at
    /// its ends, restricted to pieces inside `ball` when given. Lowest
    /// attaching edge id first.
    fn extend(&mut self, pid: usize, ball: Option<&[bool]>) -> usize {
        let mut merged = 0;
        loop {
            let (tail, head) = {
                let p = self.paths[pid].as_ref().unwrap();
                (p.tail, p.head)
            };
            let mut best: Option<(EdgeId, VertexId, usize)> = None;
            for &x in &[tail, head] {
                for (&attach, &rid) in &self.ends_at[x] {
                    if rid == pid {
                        continue;
                    }
                    if let Some(ball) = ball {
                        let r = self.paths[rid].as_ref().unwrap();
                        if !r.edges.iter().all(|&e| ball[e]) {
                            continue;
                        }
                    }
                    if best.map_or(true, |(b, _, _)| attach < b) {
                        best = Some((attach, x, rid));
                    }
                }
            }
            match best {
                Some((_, x, rid)) => {
                    self.merge(pid, x, rid);
                    merged += 1;
                }
                None => return merged,
            }
        }
    }

    fn has_foreign_end(&self, pid: usize) -> bool {
        let p = self.paths[pid].as_ref().unwrap();
        [p.tail, p.head]
            .iter()
            .any(|&x| self.ends_at[x].values().any(|&rid| rid != pid))
    }

    fn snapshot(&self, stage: usize) -> PathSystem {
        let mut paths = Vec::new();
        let mut endpoints = BTreeSet::new();
        for p in self.paths.iter().flatten() {
            paths.push(p.edges.clone());
            endpoints.insert(p.tail);
            endpoints.insert(p.head);
        }
        PathSystem {
            stage,
            paths,
            pairing: self.merges.clone(),
            endpoint_vertices: endpoints.into_iter().collect(),
        }
    }
}

/// Union of line-graph balls of the given radius around the seeds.
fn seed_ball(g: &Graph, seeds: &[EdgeId], radius: usize) -> Vec<bool> {
    let mut dist = vec![usize::MAX; g.n_edges()];
    let mut inside = vec![false; g.n_edges()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        dist[s] = 0;
        inside[s] = true;
        queue.push_back(s);
    }
    while let Some(e) = queue.pop_front() {
        if dist[e] == radius {
            continue;
        }
        for f in g.line_neighbors(e) {
            if dist[f] == usize::MAX {
                dist[f] = dist[e] + 1;
                inside[f] = true;
                queue.push_back(f);
            }
        }
    }
    inside
}

/// Grows the stage-indexed path systems on an acyclic graph. Stage 0 is the
/// singleton system; stage n cycles through the sparse edge classes at
/// separation `schedule.separation(n)` and extends each seeded path by whole
/// neighboring paths within distance < separation/3 of its seeds. Stops early
/// once a stage performs no merge at a scale covering every component.
pub fn grow_path_system(
    h: &Graph,
    max_stages: usize,
    schedule: &SeedSchedule,
) -> Result<Vec<PathSystem>, OrientError> {
    if h.has_cycle_within(&vec![true; h.n_edges()]) {
        return Err(OrientError::CyclicInput);
    }
    let mut forest = PathForest::new(h);
    let mut systems = vec![forest.snapshot(0)];

    // Per-component line-diameter bound, to skip ball constraints once the
    // scale covers the whole component.
    let (vcomp, ncomp) = h.components();
    let mut diam_bound = vec![0usize; ncomp];
    let mut seen = vec![false; ncomp];
    for v in 0..h.n_vertices() {
        if !seen[vcomp[v]] && h.degree(v) > 0 {
            seen[vcomp[v]] = true;
            diam_bound[vcomp[v]] = 2 * h.vertex_eccentricity(v) + 1;
        }
    }
    let max_diam_bound = diam_bound.iter().copied().max().unwrap_or(0);

    for stage in 1..=max_stages {
        let separation = schedule.separation(stage);
        let radius = schedule.radius(stage);
        let classes = h.sparse_edge_classes(separation);
        let mut stage_merges = 0;
        for class in &classes {
            let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
            for &e in class {
                groups.entry(forest.path_of_edge[e]).or_default().push(e);
            }
            for (pid0, seeds) in groups {
                let pid = forest.path_of_edge[seeds[0]];
                debug_assert_eq!(pid, pid0, "seeded paths are never absorbed within a class");
                if forest.paths[pid].is_none() || !forest.has_foreign_end(pid) {
                    continue;
                }
                let comp = vcomp[h.endpoints(seeds[0]).0];
                let ball = if radius >= diam_bound[comp] {
                    None
                } else {
                    Some(seed_ball(h, &seeds, radius))
                };
                stage_merges += forest.extend(pid, ball.as_deref());
            }
        }
        systems.push(forest.snapshot(stage));
        if stage_merges == 0 && radius >= max_diam_bound {
            break;
        }
    }
    Ok(systems)
}

// ---------------------------------------------------------------------------
// Orientation from cycles and paths
// ---------------------------------------------------------------------------

fn shared_vertex(g: &Graph, e: EdgeId, f: EdgeId) -> Option<VertexId> {
    let (a, b) = g.endpoints(e);
    let (c, d) = g.endpoints(f);
    if a == c || a == d {
        Some(a)
    } else if b == c || b == d {
        Some(b)
    } else {
        None
    }
}

fn orient_cycle(
    g: &Graph,
    cycle: &[EdgeId],
    forward: &mut [bool],
    covered: &mut [bool],
) -> Result<(), OrientError> {
    for &e in cycle {
        if covered[e] {
            return Err(OrientError::DoublyCoveredEdge(e));
        }
        covered[e] = true;
    }
    if cycle.len() == 2 {
        // Pair of parallel edges: around from the lower endpoint.
        let (u, v) = g.endpoints(cycle[0]);
        let (lo, hi) = (u.min(v), u.max(v));
        forward[cycle[0]] = g.endpoints(cycle[0]).0 == lo;
        forward[cycle[1]] = g.endpoints(cycle[1]).0 == hi;
        return Ok(());
    }
    let k = cycle.len();
    // verts[i] is the vertex where cycle[i-1] meets cycle[i]; edge i runs
    // verts[i] -> verts[i+1] in traversal order.
    let mut verts = Vec::with_capacity(k);
    for i in 0..k {
        let prev = cycle[(i + k - 1) % k];
        verts.push(shared_vertex(g, prev, cycle[i]).expect("consecutive cycle edges share a vertex"));
    }
    let start = (0..k).min_by_key(|&i| verts[i]).unwrap();
    // Start the cycle at its lowest vertex, heading toward the lower of its
    // two cycle neighbors.
    let succ = verts[(start + 1) % k];
    let pred = verts[(start + k - 1) % k];
    let keep_order = succ <= pred;
    for i in 0..k {
        let (from, to) = if keep_order {
            (verts[i], verts[(i + 1) % k])
        } else {
            (verts[(i + 1) % k], verts[i])
        };
        let _ = to;
        forward[cycle[i]] = g.endpoints(cycle[i]).0 == from;
    }
    Ok(())
}

/// Orients every cycle consistently around and every path end-to-end. Paths
/// are directed by two-coloring the graph whose edges join path endpoints
/// (a forest whenever the paths live in a forest): each path runs from its
/// color-0 end to its color-1 end, so the ends meeting at a vertex all agree
/// in direction and a vertex is balanced exactly when no path ends there.
pub fn orient_from_systems(
    g: &Graph,
    packing: &CyclePacking,
    paths: &PathSystem,
) -> Result<Orientation, OrientError> {
    let m = g.n_edges();
    let mut forward = vec![false; m];
    let mut covered = vec![false; m];
    for cycle in &packing.cycles {
        orient_cycle(g, cycle, &mut forward, &mut covered)?;
    }

    // Endpoint graph: one node per path-end vertex, one edge per path.
    let mut path_ends = Vec::with_capacity(paths.paths.len());
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, usize)>> = BTreeMap::new();
    for (i, path) in paths.paths.iter().enumerate() {
        let first = path[0];
        let tail = if path.len() == 1 {
            g.endpoints(first).0
        } else {
            let (u, v) = g.endpoints(first);
            let s = shared_vertex(g, first, path[1]).expect("consecutive path edges share a vertex");
            if s == u {
                v
            } else {
                u
            }
        };
        let mut cur = tail;
        for &e in path {
            if covered[e] {
                return Err(OrientError::DoublyCoveredEdge(e));
            }
            covered[e] = true;
            cur = g.other_endpoint(e, cur);
        }
        let head = cur;
        path_ends.push((tail, head));
        adj.entry(tail).or_default().push((head, i));
        adj.entry(head).or_default().push((tail, i));
    }
    let mut color: BTreeMap<VertexId, bool> = BTreeMap::new();
    let nodes: Vec<VertexId> = adj.keys().copied().collect();
    let mut queue = VecDeque::new();
    for &root in &nodes {
        if color.contains_key(&root) {
            continue;
        }
        color.insert(root, false);
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            let cx = color[&x];
            for &(y, _) in &adj[&x] {
                match color.get(&y) {
                    None => {
                        color.insert(y, !cx);
                        queue.push_back(y);
                    }
                    Some(&cy) if cy == cx => return Err(OrientError::EndpointGraphOddCycle),
                    _ => {}
                }
            }
        }
    }
    for (i, path) in paths.paths.iter().enumerate() {
        let (tail, head) = path_ends[i];
        let from_tail = !color[&tail];
        let start = if from_tail { tail } else { head };
        let seq: Box<dyn Iterator<Item = &EdgeId>> = if from_tail {
            Box::new(path.iter())
        } else {
            Box::new(path.iter().rev())
        };
        let mut cur = start;
        for &e in seq {
            forward[e] = g.endpoints(e).0 == cur;
            cur = g.other_endpoint(e, cur);
        }
    }

    if let Some(e) = covered.iter().position(|&c| !c) {
        return Err(OrientError::UncoveredEdge(e));
    }
    Ok(Orientation::from_forward(forward))
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientOptions {
    /// Allow odd-degree boundary vertices (finite truncations).
    pub truncation: bool,
    pub max_stages: usize,
}

impl Default for OrientOptions {
    fn default() -> Self {
        OrientOptions {
            truncation: false,
            max_stages: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub n_paths: usize,
    pub endpoint_vertices: usize,
    /// Endpoint vertices of even residual degree: the part that must shrink.
    pub interior_endpoint_vertices: usize,
    pub corr_mass: f64,
    pub deep_corr_mass: f64,
}

#[derive(Debug, Clone)]
pub struct OrientOutcome {
    pub orientation: Orientation,
    pub report: CorrReport,
    pub best_stage: usize,
    pub stage_reports: Vec<StageReport>,
    pub n_cycles: usize,
    pub n_residual_edges: usize,
}

/// Packs cycles, grows path systems on the residual with increasing scales,
/// and returns the first orientation whose deep Corr mass exceeds `1 -
/// epsilon` (or the best one within the stage cap). On even-degree graphs the
/// residual forest is empty and the stage-0 orientation is exactly balanced.
pub fn approximate_balanced_orientation(
    g: &Graph,
    mu: &VertexMeasure,
    epsilon: f64,
    opts: OrientOptions,
) -> Result<OrientOutcome, OrientError> {
    if !opts.truncation {
        if let Some(v) = (0..g.n_vertices()).find(|&v| g.degree(v) % 2 != 0) {
            return Err(OrientError::OddDegreeVertex(v));
        }
    }
    let packing = pack_cycles(g);
    let target = 1.0 - epsilon;

    if packing.residual.is_empty() {
        let orientation = orient_from_systems(g, &packing, &PathSystem::empty(0))?;
        let report = corr_of_orientation(g, &orientation, mu);
        let stage_reports = vec![StageReport {
            stage: 0,
            n_paths: 0,
            endpoint_vertices: 0,
            interior_endpoint_vertices: 0,
            corr_mass: report.corr_mass,
            deep_corr_mass: report.deep_corr_mass,
        }];
        let n_cycles = packing.cycles.len();
        return Ok(OrientOutcome {
            orientation,
            report,
            best_stage: 0,
            stage_reports,
            n_cycles,
            n_residual_edges: 0,
        });
    }

    let (h, emap) = g.edge_subgraph(&packing.residual_mask(g.n_edges()));
    let systems = grow_path_system(&h, opts.max_stages, &SeedSchedule::default())?;
    let mut stage_reports = Vec::new();
    let mut best: Option<(usize, Orientation, CorrReport)> = None;
    for sys in &systems {
        let mapped = sys.map_edge_ids(&emap);
        let orientation = orient_from_systems(g, &packing, &mapped)?;
        let report = corr_of_orientation(g, &orientation, mu);
        stage_reports.push(StageReport {
            stage: sys.stage,
            n_paths: sys.paths.len(),
            endpoint_vertices: sys.endpoint_vertices.len(),
            interior_endpoint_vertices: sys
                .endpoint_vertices
                .iter()
                .filter(|&&v| h.degree(v) % 2 == 0)
                .count(),
            corr_mass: report.corr_mass,
            deep_corr_mass: report.deep_corr_mass,
        });
        let better = best
            .as_ref()
            .map_or(true, |(_, _, b)| report.deep_corr_mass > b.deep_corr_mass);
        if better {
            best = Some((sys.stage, orientation, report));
        }
        let (_, _, b) = best.as_ref().unwrap();
        if target <= 0.0 || b.deep_corr_mass > target {
            break;
        }
    }
    let (best_stage, orientation, report) = best.expect("at least the stage-0 system exists");
    Ok(OrientOutcome {
        orientation,
        report,
        best_stage,
        stage_reports,
        n_cycles: packing.cycles.len(),
        n_residual_edges: packing.residual.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_torus, gen_truncated_even_tree};

    fn cycle_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn k5() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        Graph::from_edges(5, &edges).unwrap()
    }

    #[test]
    fn pack_cycles_on_tree_is_empty() {
        let g = gen_truncated_even_tree(4, 3).unwrap();
        let packing = pack_cycles(&g);
        assert!(packing.cycles.is_empty());
        assert_eq!(packing.residual.len(), g.n_edges());
    }

    #[test]
    fn pack_cycles_k5_covers_everything() {
        let g = k5();
        let packing = pack_cycles(&g);
        assert!(packing.residual.is_empty());
        let total: usize = packing.cycles.iter().map(Vec::len).sum();
        assert_eq!(total, 10);
        // Pairwise edge-disjoint.
        let mut seen = [false; 10];
        for c in &packing.cycles {
            for &e in c {
                assert!(!seen[e]);
                seen[e] = true;
            }
        }
    }

    #[test]
    fn k5_admits_two_disjoint_5_cycles_by_exhaustive_search() {
        // Independent confirmation that the 10 edges of K5 split into two
        // edge-disjoint 5-cycles.
        let g = k5();
        let verts: Vec<usize> = (0..5).collect();
        let mut five_cycles: Vec<Vec<EdgeId>> = Vec::new();
        let mut perm = verts.clone();
        // All 5-cycles as permutations fixing 0 up to rotation/reflection.
        fn heap_permutations(k: usize, arr: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 1 {
                out.push(arr.clone());
                return;
            }
            for i in 0..k {
                heap_permutations(k - 1, arr, out);
                if k % 2 == 0 {
                    arr.swap(i, k - 1);
                } else {
                    arr.swap(0, k - 1);
                }
            }
        }
        let mut orders = Vec::new();
        heap_permutations(5, &mut perm, &mut orders);
        let edge_id = |u: usize, v: usize| -> EdgeId {
            g.edge_list()
                .iter()
                .position(|&(a, b)| (a, b) == (u.min(v), u.max(v)))
                .unwrap()
        };
        for order in orders {
            if order[0] != 0 || order[1] > order[4] {
                continue; // fix rotation and reflection
            }
            let edges: Vec<EdgeId> = (0..5)
                .map(|i| edge_id(order[i], order[(i + 1) % 5]))
                .collect();
            five_cycles.push(edges);
        }
        assert_eq!(five_cycles.len(), 12);
        let found = five_cycles.iter().enumerate().any(|(i, a)| {
            five_cycles[i + 1..].iter().any(|b| {
                let mut seen = [false; 10];
                a.iter().chain(b.iter()).all(|&e| {
                    let fresh = !seen[e];
                    seen[e] = true;
                    fresh
                })
            })
        });
        assert!(found, "two edge-disjoint 5-cycles must exist");
    }

    #[test]
    fn pack_cycles_torus_residual_is_empty_and_acyclic() {
        let t = gen_torus(&[6, 6]).unwrap();
        let packing = pack_cycles(&t.graph);
        // All degrees even: maximality forces an empty residual.
        assert!(packing.residual.is_empty());
        let mask = packing.residual_mask(t.graph.n_edges());
        assert!(!t.graph.has_cycle_within(&mask));
    }

    #[test]
    fn pack_cycles_preserves_degree_parity_in_residual() {
        // A tree plus one extra cycle: residual keeps the tree's parities.
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 4), (3, 5)]).unwrap();
        let packing = pack_cycles(&g);
        let mask = packing.residual_mask(g.n_edges());
        assert!(!g.has_cycle_within(&mask));
        for v in 0..6 {
            let res_deg = g
                .incident_edges(v)
                .filter(|&e| mask[e])
                .count();
            assert_eq!(res_deg % 2, g.degree(v) % 2);
        }
    }

    #[test]
    fn grow_rejects_cyclic_input() {
        let g = cycle_graph(4);
        assert_eq!(
            grow_path_system(&g, 3, &SeedSchedule::default()).unwrap_err(),
            OrientError::CyclicInput
        );
    }

    #[test]
    fn single_edge_stays_a_path_forever() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let systems = grow_path_system(&g, 6, &SeedSchedule::default()).unwrap();
        for sys in &systems {
            assert_eq!(sys.paths.len(), 1);
            assert_eq!(sys.endpoint_vertices, vec![0, 1]);
        }
    }

    #[test]
    fn star_pairs_into_two_paths_through_center() {
        // Center 0 with 4 leaves.
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let systems = grow_path_system(&g, 4, &SeedSchedule::default()).unwrap();
        assert_eq!(systems[0].paths.len(), 4);
        let stage1 = &systems[1];
        assert_eq!(stage1.paths.len(), 2);
        assert!(!stage1.endpoint_vertices.contains(&0));
        // Merge record pairs disjoint edges at the center.
        for &(v, a, b) in &stage1.pairing {
            assert_eq!(v, 0);
            assert_ne!(a, b);
        }
    }

    #[test]
    fn path_system_invariants_on_truncated_tree() {
        let h = gen_truncated_even_tree(4, 4).unwrap();
        let systems = grow_path_system(&h, 16, &SeedSchedule::default()).unwrap();
        let m = h.n_edges();
        for window in systems.windows(2) {
            let (prev, next) = (&window[0], &window[1]);
            // Coverage and disjointness at every stage.
            for sys in [prev, next] {
                let mut owner = vec![usize::MAX; m];
                for (i, p) in sys.paths.iter().enumerate() {
                    for &e in p {
                        assert_eq!(owner[e], usize::MAX);
                        owner[e] = i;
                    }
                }
                assert!(owner.iter().all(|&o| o != usize::MAX));
            }
            // Refinement: every path extends into a unique next-stage path.
            let mut owner_next = vec![usize::MAX; m];
            for (i, p) in next.paths.iter().enumerate() {
                for &e in p {
                    owner_next[e] = i;
                }
            }
            for p in &prev.paths {
                let target = owner_next[p[0]];
                assert!(p.iter().all(|&e| owner_next[e] == target));
            }
            // Endpoint vertices shrink monotonically.
            let prev_ends: std::collections::BTreeSet<_> =
                prev.endpoint_vertices.iter().collect();
            for v in &next.endpoint_vertices {
                assert!(prev_ends.contains(v));
            }
        }
        // Terminal stage: only odd-degree boundary vertices remain endpoints.
        let last = systems.last().unwrap();
        for &v in &last.endpoint_vertices {
            assert_eq!(h.degree(v) % 2, 1, "vertex {} should be boundary", v);
        }
        // Paths never form cycles: endpoints of each path differ.
        for p in &last.paths {
            let mut degree_count = std::collections::BTreeMap::new();
            for &e in p {
                let (u, v) = h.endpoints(e);
                *degree_count.entry(u).or_insert(0) += 1;
                *degree_count.entry(v).or_insert(0) += 1;
            }
            let odd = degree_count.values().filter(|&&c| c % 2 == 1).count();
            assert_eq!(odd, 2);
        }
    }

    #[test]
    fn orient_pure_cycle_graph_is_exact() {
        let g = cycle_graph(7);
        let packing = pack_cycles(&g);
        let s = orient_from_systems(&g, &packing, &PathSystem::empty(0)).unwrap();
        let mu = VertexMeasure::uniform(7);
        assert_eq!(corr_of_orientation(&g, &s, &mu).corr_mass, 1.0);
    }

    #[test]
    fn orient_single_path_fails_exactly_at_endpoints() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let packing = CyclePacking {
            cycles: Vec::new(),
            residual: vec![0, 1, 2],
        };
        let sys = PathSystem {
            stage: 0,
            paths: vec![vec![0, 1, 2]],
            pairing: Vec::new(),
            endpoint_vertices: vec![0, 3],
        };
        let s = orient_from_systems(&g, &packing, &sys).unwrap();
        let mu = VertexMeasure::uniform(4);
        let rep = corr_of_orientation(&g, &s, &mu);
        assert_eq!(rep.corr_vertices, vec![1, 2]);
    }

    #[test]
    fn orient_rejects_uncovered_edges() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let packing = CyclePacking {
            cycles: Vec::new(),
            residual: vec![0, 1],
        };
        let sys = PathSystem {
            stage: 0,
            paths: vec![vec![0]],
            pairing: Vec::new(),
            endpoint_vertices: vec![0, 1],
        };
        assert_eq!(
            orient_from_systems(&g, &packing, &sys).unwrap_err(),
            OrientError::UncoveredEdge(1)
        );
    }

    #[test]
    fn balanced_orientation_exact_on_even_graphs() {
        for g in [cycle_graph(9), k5(), gen_torus(&[4, 5]).unwrap().graph] {
            let mu = VertexMeasure::uniform(g.n_vertices());
            let out =
                approximate_balanced_orientation(&g, &mu, 0.5, OrientOptions::default()).unwrap();
            assert_eq!(out.report.corr_mass, 1.0);
            assert_eq!(out.best_stage, 0);
        }
    }

    #[test]
    fn balanced_orientation_rejects_odd_degree() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mu = VertexMeasure::uniform(4);
        let err = approximate_balanced_orientation(&g, &mu, 0.5, OrientOptions::default())
            .unwrap_err();
        assert_eq!(err, OrientError::OddDegreeVertex(0));
    }

    #[test]
    fn truncated_tree_deep_corr_is_monotone_and_converges() {
        let g = gen_truncated_even_tree(4, 5).unwrap();
        let mu = VertexMeasure::uniform(g.n_vertices());
        let opts = OrientOptions {
            truncation: true,
            max_stages: 20,
        };
        let out = approximate_balanced_orientation(&g, &mu, 0.0, opts).unwrap();
        let deeps: Vec<f64> = out.stage_reports.iter().map(|r| r.deep_corr_mass).collect();
        assert!(deeps.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let interiors: Vec<usize> = out
            .stage_reports
            .iter()
            .map(|r| r.interior_endpoint_vertices)
            .collect();
        assert!(interiors.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*interiors.last().unwrap(), 0);
        // Failure set is exactly the endpoint vertices at every stage.
        let last = out.stage_reports.last().unwrap();
        let leaves = (0..g.n_vertices()).filter(|&v| g.degree(v) == 1).count();
        assert_eq!(
            last.endpoint_vertices, leaves,
            "terminal endpoints are the boundary"
        );
    }

    #[test]
    fn epsilon_one_stops_at_stage_zero() {
        let g = gen_truncated_even_tree(4, 3).unwrap();
        let mu = VertexMeasure::uniform(g.n_vertices());
        let opts = OrientOptions {
            truncation: true,
            max_stages: 20,
        };
        let out = approximate_balanced_orientation(&g, &mu, 1.0, opts).unwrap();
        assert_eq!(out.stage_reports.len(), 1);
        assert_eq!(out.best_stage, 0);
    }
}
