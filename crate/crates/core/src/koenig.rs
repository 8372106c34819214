//! Approximate Kőnig line coloring on odd-cycle-free graphs.
//!
//! The pipeline colors all edges with `max_degree + 1` colors (Misra-Gries),
//! then eliminates the distinguished top color by augmenting alternating
//! chains seeded on sparse edge classes. A chain is the distinguished edge
//! followed by the unique beta/gamma alternating path from its anchor
//! endpoint; simultaneous augmentation over vertex-disjoint chains keeps the
//! coloring proper while the distinguished class shrinks. Once every
//! surviving distinguished edge carries a chain of cocycle weight at least
//! `2 * max_degree * L`, the surviving eta-mass is at most `1/L`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Color, CorrReport, EdgeId, Graph, PartialEdgeColoring, VertexId};
use crate::graph::corr_of_coloring;
use crate::measure::{
    cocycle_ratio, edge_measure_from, make_quasi_invariant, EdgeMeasure, MeasureError,
    VertexMeasure,
};

#[derive(Debug, Error, PartialEq)]
pub enum KoenigError {
    #[error("graph has parallel edges; fan recoloring needs a simple graph")]
    ParallelEdges,
    #[error("palette {0} exceeds the supported width of 128 colors")]
    PaletteTooWide(usize),
    #[error("alternating chain from edge {seed} returned to its far endpoint: graph contains an odd cycle")]
    OddCycleDetected { seed: EdgeId },
    #[error("seed edge {0} does not carry the distinguished color")]
    SeedNotDistinguished(EdgeId),
    #[error("chains of seeds {0} and {1} share a vertex")]
    ChainsNotDisjoint(EdgeId, EdgeId),
    #[error("coloring must be total on the edge set")]
    NotTotal,
    #[error("coloring not proper at vertex {vertex}: edges {e1} and {e2}")]
    NotProper {
        vertex: VertexId,
        e1: EdgeId,
        e2: EdgeId,
    },
    #[error("expected palette {expected}, got {actual}")]
    PaletteMismatch { expected: usize, actual: usize },
    #[error("invalid elimination config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Colors of the palette missing at `v` (never empty for a total proper
/// coloring with palette `max_degree + 1`).
pub fn missing_colors(g: &Graph, c: &PartialEdgeColoring, v: VertexId) -> Vec<Color> {
    c.missing_at(g, v)
}

// ---------------------------------------------------------------------------
// Misra-Gries fan recoloring: total proper coloring with max_degree+1 colors.
// ---------------------------------------------------------------------------

struct FanColorer<'a> {
    g: &'a Graph,
    palette: usize,
    colors: Vec<Option<Color>>,
    used: Vec<u128>,
}

impl<'a> FanColorer<'a> {
    fn new(g: &'a Graph, palette: usize) -> Self {
        FanColorer {
            g,
            palette,
            colors: vec![None; g.n_edges()],
            used: vec![0u128; g.n_vertices()],
        }
    }

    fn free_color(&self, v: VertexId) -> Color {
        (0..self.palette)
            .find(|&c| self.used[v] & (1 << c) == 0)
            .expect("palette exceeds degree, a free color exists")
    }

    fn is_free(&self, v: VertexId, c: Color) -> bool {
        self.used[v] & (1 << c) == 0
    }

    fn apply(&mut self, updates: &[(EdgeId, Color)]) {
        for &(e, _) in updates {
            if let Some(old) = self.colors[e] {
                let (u, v) = self.g.endpoints(e);
                self.used[u] &= !(1 << old);
                self.used[v] &= !(1 << old);
            }
        }
        for &(e, c) in updates {
            let (u, v) = self.g.endpoints(e);
            self.used[u] |= 1 << c;
            self.used[v] |= 1 << c;
        }
        for &(e, c) in updates {
            self.colors[e] = Some(c);
        }
    }

    /// Maximal fan of `e0 = (u, v)` at `u`: entries are (edge, far vertex),
    /// starting with (e0, v); each next edge is colored and its color is free
    /// at the previous far vertex.
    fn maximal_fan(&self, e0: EdgeId, u: VertexId, v: VertexId) -> Vec<(EdgeId, VertexId)> {
        let mut fan = vec![(e0, v)];
        let mut candidates: Vec<(EdgeId, VertexId)> = self
            .g
            .incident_darts(u)
            .iter()
            .map(|&d| (self.g.dart_edge(d), self.g.dart_target(d)))
            .filter(|&(e, _)| e != e0)
            .collect();
        let mut last = v;
        loop {
            let pick = candidates.iter().position(|&(e, _)| {
                self.colors[e].is_some_and(|c| self.is_free(last, c))
            });
            match pick {
                Some(i) => {
                    let (e, far) = candidates.remove(i);
                    last = far;
                    fan.push((e, far));
                }
                None => return fan,
            }
        }
    }

    /// Maximal path from `u` alternating colors `first, second, first, ...`.
    fn alternating_path(&self, u: VertexId, first: Color, second: Color) -> Vec<(EdgeId, Color)> {
        let mut path = Vec::new();
        let mut cur = u;
        let mut want = first;
        loop {
            let next = self
                .g
                .incident_darts(cur)
                .iter()
                .map(|&d| (self.g.dart_edge(d), self.g.dart_target(d)))
                .find(|&(e, _)| self.colors[e] == Some(want));
            match next {
                Some((e, far)) => {
                    path.push((e, want));
                    cur = far;
                    want = if want == first { second } else { first };
                }
                None => return path,
            }
        }
    }

    fn run(&mut self) {
        for e0 in 0..self.g.n_edges() {
            let (u, v) = self.g.endpoints(e0);
            let fan = self.maximal_fan(e0, u, v);
            let c = self.free_color(u);
            let d = self.free_color(fan.last().unwrap().1);

            if c != d {
                // Invert the maximal d/c path at u; afterwards d is free at u.
                let inversion: Vec<(EdgeId, Color)> = self
                    .alternating_path(u, d, c)
                    .into_iter()
                    .map(|(e, col)| (e, if col == c { d } else { c }))
                    .collect();
                self.apply(&inversion);
            }

            let w = fan
                .iter()
                .position(|&(_, far)| self.is_free(far, d))
                .expect("some fan vertex has the second color free");

            let mut updates = Vec::with_capacity(w + 1);
            for i in 1..=w {
                let shifted = self.colors[fan[i].0].expect("fan tail edges are colored");
                updates.push((fan[i - 1].0, shifted));
            }
            updates.push((fan[w].0, d));
            self.apply(&updates);
        }
    }
}

/// Total proper coloring with `max_degree + 1` colors via fan recoloring.
pub fn vizing_plus_one(g: &Graph) -> Result<PartialEdgeColoring, KoenigError> {
    if g.has_parallel_edges() {
        return Err(KoenigError::ParallelEdges);
    }
    let palette = g.max_degree() + 1;
    if palette > 128 {
        return Err(KoenigError::PaletteTooWide(palette));
    }
    let mut fc = FanColorer::new(g, palette);
    fc.run();
    let mut coloring = PartialEdgeColoring::new(g.n_edges(), palette);
    for (e, col) in fc.colors.iter().enumerate() {
        coloring.set(e, col.expect("every edge colored"));
    }
    if let Some((vertex, e1, e2)) = coloring.proper_violation(g) {
        return Err(KoenigError::NotProper { vertex, e1, e2 });
    }
    Ok(coloring)
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

/// A distinguished edge together with the alternating path hanging off its
/// anchor endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub seed: EdgeId,
    /// Chosen endpoint of the seed: the lower vertex id.
    pub anchor: VertexId,
    /// Missing at the far endpoint; the first path color and the seed's new
    /// color on augmentation.
    pub beta: Color,
    /// Missing at the anchor; the second path color.
    pub gamma: Color,
    /// Seed first, then the alternating path edges in walk order.
    pub edges: Vec<EdgeId>,
    /// Total cocycle weight relative to the seed, seed included.
    pub weight: f64,
    /// True when the walk ended at the natural end of the alternating path
    /// rather than at a weight or hop cap.
    pub complete: bool,
}

fn build_chain_inner(
    g: &Graph,
    c: &PartialEdgeColoring,
    seed: EdgeId,
    eta: Option<&EdgeMeasure>,
    stop_weight: f64,
    max_hops: usize,
) -> Result<Chain, KoenigError> {
    let a = c.distinguished();
    if c.get(seed) != Some(a) {
        return Err(KoenigError::SeedNotDistinguished(seed));
    }
    let (u, v) = g.endpoints(seed);
    let (anchor, far) = (u.min(v), u.max(v));
    // Lexicographically least valid (endpoint, gamma, beta): any endpoint
    // admits a choice since both missing sets are non-empty, so the anchor is
    // always the lower endpoint; then the least missing colors.
    let gamma = first_missing_excluding(g, c, anchor, a);
    let beta = first_missing_excluding(g, c, far, a);

    let find_colored = |at: VertexId, want: Color| -> Option<(EdgeId, VertexId)> {
        g.incident_darts(at)
            .iter()
            .map(|&d| (g.dart_edge(d), g.dart_target(d)))
            .find(|&(e, _)| c.get(e) == Some(want))
    };

    let mut edges = vec![seed];
    let mut weight = 1.0;
    let mut cur = anchor;
    let mut want = beta;
    let complete = loop {
        let Some((e, next)) = find_colored(cur, want) else {
            break true;
        };
        if next == far {
            return Err(KoenigError::OddCycleDetected { seed });
        }
        edges.push(e);
        weight += eta.map_or(1.0, |m| cocycle_ratio(m, e, seed));
        cur = next;
        want = if want == beta { gamma } else { beta };
        if weight >= stop_weight || edges.len() >= max_hops {
            break find_colored(cur, want).is_none();
        }
    };
    Ok(Chain {
        seed,
        anchor,
        beta,
        gamma,
        edges,
        weight,
        complete,
    })
}

fn first_missing_excluding(g: &Graph, c: &PartialEdgeColoring, v: VertexId, skip: Color) -> Color {
    let mut present = vec![false; c.palette()];
    for e in g.incident_edges(v) {
        if let Some(col) = c.get(e) {
            present[col] = true;
        }
    }
    (0..c.palette())
        .find(|&col| col != skip && !present[col])
        .expect("a non-distinguished color is missing at every endpoint of a distinguished edge")
}

/// Builds the chain of a distinguished edge, following it until it ends
/// naturally or its cumulative cocycle weight reaches `stop_weight` or its
/// hop count reaches `max_hops`, whichever first. Walking onto the far
/// endpoint of the seed is a structural error: it certifies an odd cycle.
pub fn build_chain(
    g: &Graph,
    c: &PartialEdgeColoring,
    eta: &EdgeMeasure,
    seed: EdgeId,
    stop_weight: f64,
    max_hops: usize,
) -> Result<Chain, KoenigError> {
    build_chain_inner(g, c, seed, Some(eta), stop_weight, max_hops)
}

fn build_full_chain(
    g: &Graph,
    c: &PartialEdgeColoring,
    seed: EdgeId,
) -> Result<Chain, KoenigError> {
    build_chain_inner(g, c, seed, None, f64::INFINITY, usize::MAX)
}

/// Recolors along a complete chain: the seed takes beta, every path edge
/// swaps beta and gamma. Equivalently each path edge takes the color of its
/// successor and the last edge takes the color it did not have.
fn apply_chain(c: &mut PartialEdgeColoring, chain: &Chain) {
    debug_assert!(chain.complete, "only complete chains can be augmented");
    c.set(chain.seed, chain.beta);
    for &f in &chain.edges[1..] {
        let col = c.get(f).expect("chain edges are colored");
        let flipped = if col == chain.beta {
            chain.gamma
        } else {
            chain.beta
        };
        c.set(f, flipped);
    }
}

fn chain_vertices<'a>(g: &'a Graph, chain: &'a Chain) -> impl Iterator<Item = VertexId> + 'a {
    chain.edges.iter().flat_map(move |&e| {
        let (u, v) = g.endpoints(e);
        [u, v]
    })
}

/// Simultaneously augments the chains of the given distinguished seeds. The
/// chains must be pairwise vertex disjoint (checked); afterwards none of the
/// seeds carries the distinguished color and the domain is unchanged.
pub fn augment_disjoint(
    g: &Graph,
    c: &PartialEdgeColoring,
    seeds: &[EdgeId],
) -> Result<PartialEdgeColoring, KoenigError> {
    let mut sorted: Vec<EdgeId> = seeds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut chains = Vec::with_capacity(sorted.len());
    for &seed in &sorted {
        chains.push(build_full_chain(g, c, seed)?);
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n_vertices()];
    for (i, chain) in chains.iter().enumerate() {
        for v in chain_vertices(g, chain) {
            match owner[v] {
                Some(j) if j != i => {
                    return Err(KoenigError::ChainsNotDisjoint(chains[j].seed, chain.seed))
                }
                _ => owner[v] = Some(i),
            }
        }
    }
    let mut d = c.clone();
    for chain in &chains {
        apply_chain(&mut d, chain);
    }
    debug_assert!(d.is_proper(g), "augmentation must preserve properness");
    Ok(d)
}

// ---------------------------------------------------------------------------
// Elimination
// ---------------------------------------------------------------------------

/// Parameters of the distinguished-color elimination loop.
///
/// `epsilon` is the eta-mass budget for the surviving distinguished class;
/// `l_scale` is the least L with 1/L < epsilon. Chains are considered long at
/// weight `2 * max_degree * l_scale`. In uniform mode seeds are separated by
/// `4 * max_degree * l_scale` which makes short chains vertex disjoint; in
/// weighted mode chains are additionally capped at `max_hops` hops and seeds
/// separated by `2 * max_hops + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationConfig {
    pub epsilon: f64,
    pub l_scale: usize,
    pub max_hops: usize,
    pub seed_separation: usize,
    pub weighted: bool,
    pub rng_seed: u64,
}

impl EliminationConfig {
    pub fn for_graph(
        g: &Graph,
        epsilon: f64,
        weighted: bool,
        rng_seed: u64,
    ) -> Result<Self, KoenigError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(KoenigError::InvalidConfig(format!(
                "epsilon must be positive and finite, got {}",
                epsilon
            )));
        }
        let l_scale = (1.0 / epsilon).floor() as usize + 1;
        let delta = g.max_degree().max(1);
        let (max_hops, seed_separation) = if weighted {
            let mh = 8 * delta * l_scale;
            (mh, 2 * mh + 2)
        } else {
            (2 * delta * l_scale, 4 * delta * l_scale)
        };
        Ok(EliminationConfig {
            epsilon,
            l_scale,
            max_hops,
            seed_separation,
            weighted,
            rng_seed,
        })
    }

    fn validate(&self, g: &Graph) -> Result<(), KoenigError> {
        let delta = g.max_degree().max(1);
        if self.l_scale as f64 * self.epsilon <= 1.0 {
            return Err(KoenigError::InvalidConfig(format!(
                "need 1/L < epsilon, got L = {}, epsilon = {}",
                self.l_scale, self.epsilon
            )));
        }
        let needed = if self.weighted {
            2 * self.max_hops + 2
        } else {
            4 * delta * self.l_scale
        };
        if self.seed_separation < needed {
            return Err(KoenigError::InvalidConfig(format!(
                "seed separation {} below required {}",
                self.seed_separation, needed
            )));
        }
        if !self.weighted && self.max_hops < 2 * delta * self.l_scale {
            return Err(KoenigError::InvalidConfig(
                "uniform mode must not cap chains below the weight threshold".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStats {
    /// Full passes over the seed classes, including the final empty one.
    pub sweeps: usize,
    pub augmentations: usize,
    /// Distinguished-class size before the loop and after each sweep.
    pub a_trajectory: Vec<usize>,
    pub survivors: usize,
    /// Survivors whose chain was cut by the hop cap while still light; they
    /// carry no long-chain certificate (empty in uniform mode).
    pub uncertified_survivors: usize,
    /// Chains skipped within a class because of a vertex conflict. The seed
    /// separation makes this zero; counted as a safety net.
    pub skipped_conflicts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationOutcome {
    pub coloring: PartialEdgeColoring,
    pub stats: EliminationStats,
}

/// Improves `c0` by augmenting short chains over cycled sparse seed classes
/// until a full sweep performs no augmentation. Afterwards every surviving
/// distinguished edge carries a chain of weight at least
/// `2 * max_degree * l_scale`, hence the surviving eta-mass is at most
/// `1 / l_scale`.
pub fn eliminate_color(
    g: &Graph,
    c0: &PartialEdgeColoring,
    eta: &EdgeMeasure,
    cfg: &EliminationConfig,
) -> Result<EliminationOutcome, KoenigError> {
    if c0.palette() != g.max_degree() + 1 {
        return Err(KoenigError::PaletteMismatch {
            expected: g.max_degree() + 1,
            actual: c0.palette(),
        });
    }
    if !c0.is_total() {
        return Err(KoenigError::NotTotal);
    }
    if let Some((vertex, e1, e2)) = c0.proper_violation(g) {
        return Err(KoenigError::NotProper { vertex, e1, e2 });
    }
    cfg.validate(g)?;
    if !cfg.weighted && !eta.is_uniform() {
        return Err(KoenigError::InvalidConfig(
            "non-uniform edge measure requires weighted mode".into(),
        ));
    }

    let delta = g.max_degree().max(1);
    let stop_weight = (2 * delta * cfg.l_scale) as f64;
    let classes = g.sparse_edge_classes(cfg.seed_separation);
    let mut class_of = vec![0usize; g.n_edges()];
    for (i, class) in classes.iter().enumerate() {
        for &e in class {
            class_of[e] = i;
        }
    }

    let a = c0.distinguished();
    let mut d = c0.clone();
    let mut a_edges: BTreeSet<EdgeId> = d.class_edges(a).into_iter().collect();
    let mut stats = EliminationStats {
        sweeps: 0,
        augmentations: 0,
        a_trajectory: vec![a_edges.len()],
        survivors: 0,
        uncertified_survivors: 0,
        skipped_conflicts: 0,
    };

    let mut owner_stamp: Vec<u64> = vec![0; g.n_vertices()];
    let mut stamp = 0u64;
    loop {
        stats.sweeps += 1;
        let mut sweep_augments = 0usize;
        let mut by_class: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
        for &e in &a_edges {
            by_class.entry(class_of[e]).or_default().push(e);
        }
        for (_, seeds) in by_class {
            let mut chains = Vec::new();
            for &seed in &seeds {
                if d.get(seed) != Some(a) {
                    continue;
                }
                let chain = build_chain_inner(g, &d, seed, Some(eta), stop_weight, cfg.max_hops)?;
                if chain.complete && chain.weight < stop_weight {
                    chains.push(chain);
                }
            }
            // The separation makes these disjoint; verify and skip on the
            // off chance of a conflict rather than corrupt the coloring.
            stamp += 1;
            let mut selected = Vec::with_capacity(chains.len());
            'chains: for chain in chains {
                for v in chain_vertices(g, &chain) {
                    if owner_stamp[v] == stamp {
                        stats.skipped_conflicts += 1;
                        debug_assert!(false, "seed separation must give disjoint chains");
                        continue 'chains;
                    }
                }
                for v in chain_vertices(g, &chain) {
                    owner_stamp[v] = stamp;
                }
                selected.push(chain);
            }
            for chain in &selected {
                apply_chain(&mut d, chain);
                a_edges.remove(&chain.seed);
            }
            sweep_augments += selected.len();
        }
        stats.augmentations += sweep_augments;
        stats.a_trajectory.push(a_edges.len());
        debug_assert!(d.is_proper(g));
        if sweep_augments == 0 {
            break;
        }
    }

    stats.survivors = a_edges.len();
    for &seed in &a_edges {
        let chain = build_chain_inner(g, &d, seed, Some(eta), stop_weight, cfg.max_hops)?;
        if chain.weight < stop_weight {
            stats.uncertified_survivors += 1;
        }
    }
    Ok(EliminationOutcome { coloring: d, stats })
}

/// Drops the distinguished class from the domain and shrinks the palette by
/// one: the result is a proper partial coloring with `palette - 1` colors
/// agreeing with `d` outside the distinguished class.
pub fn finalize_delta_coloring(g: &Graph, d: &PartialEdgeColoring) -> PartialEdgeColoring {
    let _ = g;
    let a = d.distinguished();
    let mut out = PartialEdgeColoring::new(d.n_edges(), (d.palette() - 1).max(1));
    for e in 0..d.n_edges() {
        match d.get(e) {
            Some(c) if c != a => out.set(e, c),
            _ => {}
        }
    }
    out
}

/// The matching carried by one color class of a proper coloring.
pub fn extract_matching(g: &Graph, c: &PartialEdgeColoring, beta: Color) -> Vec<EdgeId> {
    let matching = c.class_edges(beta);
    debug_assert!({
        let mut seen = vec![false; g.n_vertices()];
        matching.iter().all(|&e| {
            let (u, v) = g.endpoints(e);
            let ok = !seen[u] && !seen[v];
            seen[u] = true;
            seen[v] = true;
            ok
        })
    });
    matching
}

pub fn unmatched_vertices(g: &Graph, matching: &[EdgeId]) -> Vec<VertexId> {
    let mut matched = vec![false; g.n_vertices()];
    for &e in matching {
        let (u, v) = g.endpoints(e);
        matched[u] = true;
        matched[v] = true;
    }
    (0..g.n_vertices()).filter(|&v| !matched[v]).collect()
}

/// Full-chain membership counts over the current distinguished class: for
/// every edge, on how many chains of distinguished seeds it lies. Bounded by
/// `2 * max_degree`.
pub fn chain_edge_multiplicity(
    g: &Graph,
    c: &PartialEdgeColoring,
) -> Result<Vec<usize>, KoenigError> {
    let mut counts = vec![0usize; g.n_edges()];
    for seed in c.class_edges(c.distinguished()) {
        let chain = build_full_chain(g, c, seed)?;
        for &e in &chain.edges {
            counts[e] += 1;
        }
    }
    Ok(counts)
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct KoenigOutcome {
    /// Finalized coloring with palette `max_degree`; edges of the surviving
    /// distinguished class are left uncolored.
    pub coloring: PartialEdgeColoring,
    pub report: CorrReport,
    pub elimination: EliminationStats,
    pub config: EliminationConfig,
    /// Measured eta-mass of the surviving distinguished class.
    pub eta_a_mass: f64,
}

/// The full approximate line-coloring pipeline for odd-cycle-free graphs:
/// `vizing_plus_one`, then elimination of the distinguished color with
/// eta-budget `epsilon / (4 * max_degree)` under the smoothed edge measure,
/// then finalization to palette `max_degree`. The vertex failure mass of the
/// result is below `epsilon`.
pub fn approximate_koenig(
    g: &Graph,
    mu: &VertexMeasure,
    epsilon: f64,
    force_weighted: bool,
    rng_seed: u64,
) -> Result<KoenigOutcome, KoenigError> {
    let c = vizing_plus_one(g)?;
    let nu = make_quasi_invariant(mu);
    let eta = edge_measure_from(g, &nu)?;
    let delta = g.max_degree().max(1);
    let eta_epsilon = epsilon / (4.0 * delta as f64);
    let weighted = force_weighted || !eta.is_uniform();
    let cfg = EliminationConfig::for_graph(g, eta_epsilon, weighted, rng_seed)?;
    let out = eliminate_color(g, &c, &eta, &cfg)?;
    let survivors = out.coloring.class_edges(out.coloring.distinguished());
    let eta_a_mass = eta.mass(survivors.iter().copied());
    let coloring = finalize_delta_coloring(g, &out.coloring);
    let report = corr_of_coloring(g, &coloring, mu);
    Ok(KoenigOutcome {
        coloring,
        report,
        elimination: out.stats,
        config: cfg,
        eta_a_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::corr_of_coloring;

    fn k33() -> Graph {
        let mut edges = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                edges.push((i, 3 + j));
            }
        }
        Graph::from_edges(6, &edges).unwrap()
    }

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn vizing_triangle_uses_three_colors() {
        let g = triangle();
        let c = vizing_plus_one(&g).unwrap();
        assert!(c.is_total());
        assert!(c.is_proper(&g));
        let used: std::collections::BTreeSet<_> =
            (0..3).map(|e| c.get(e).unwrap()).collect();
        assert_eq!(used.len(), 3);
    }

    #[test]
    fn vizing_k33_within_palette() {
        let g = k33();
        let c = vizing_plus_one(&g).unwrap();
        assert!(c.is_total());
        assert!(c.is_proper(&g));
        assert_eq!(c.palette(), 4);
    }

    #[test]
    fn missing_colors_cases() {
        // Graph with an isolated vertex 4 and a K33 block.
        let mut edges = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                edges.push((i, 3 + j));
            }
        }
        let g = Graph::from_edges(7, &edges).unwrap();
        let c = vizing_plus_one(&g).unwrap();
        assert_eq!(missing_colors(&g, &c, 6), vec![0, 1, 2, 3]);
        // Degree-3 vertex with distinct colors on all edges: exactly one missing.
        assert_eq!(missing_colors(&g, &c, 0).len(), 1);
        // Matches a direct recomputation.
        for v in 0..6 {
            let mut expect: Vec<Color> = (0..4).collect();
            expect.retain(|&col| {
                !g.incident_edges(v).any(|e| c.get(e) == Some(col))
            });
            assert_eq!(missing_colors(&g, &c, v), expect);
        }
    }

    #[test]
    fn chain_of_isolated_distinguished_edge_is_trivial() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut c = PartialEdgeColoring::new(1, 2);
        c.set(0, 1); // distinguished
        let eta = EdgeMeasure::uniform(1);
        let chain = build_chain(&g, &c, &eta, 0, 100.0, 100).unwrap();
        assert_eq!(chain.edges, vec![0]);
        assert_eq!(chain.beta, chain.gamma);
        assert!(chain.complete);
    }

    #[test]
    fn chain_walks_three_edge_path_from_middle_anchor() {
        // Vertices labeled so the anchor of the seed is the path's interior
        // vertex: 1 - 0 - 2 - 3 with edges (1,0)=a, (0,2)=beta, (2,3)=gamma.
        let g = Graph::from_edges(4, &[(1, 0), (0, 2), (2, 3)]).unwrap();
        let mut c = PartialEdgeColoring::new(3, 3);
        c.set(0, 2); // a
        c.set(1, 0); // beta
        c.set(2, 1); // gamma
        let eta = EdgeMeasure::uniform(3);
        let chain = build_chain(&g, &c, &eta, 0, 1e9, 1_000).unwrap();
        assert_eq!(chain.anchor, 0);
        assert_eq!(chain.beta, 0);
        assert_eq!(chain.gamma, 1);
        assert_eq!(chain.edges, vec![0, 1, 2]);
        assert!(chain.complete);
        assert!((chain.weight - 3.0).abs() < 1e-12);
    }

    #[test]
    fn chain_on_triangle_detects_odd_cycle() {
        let g = triangle();
        let mut c = PartialEdgeColoring::new(3, 3);
        c.set(0, 2);
        c.set(1, 0);
        c.set(2, 1);
        let eta = EdgeMeasure::uniform(3);
        assert_eq!(
            build_chain(&g, &c, &eta, 0, 1e9, 1_000),
            Err(KoenigError::OddCycleDetected { seed: 0 })
        );
    }

    #[test]
    fn augment_empty_seed_set_is_identity() {
        let g = k33();
        let c = vizing_plus_one(&g).unwrap();
        let d = augment_disjoint(&g, &c, &[]).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn augment_seed_with_empty_continuation() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut c = PartialEdgeColoring::new(1, 2);
        c.set(0, 1);
        let d = augment_disjoint(&g, &c, &[0]).unwrap();
        assert_eq!(d.get(0), Some(0));
        assert!(d.is_proper(&g));
    }

    #[test]
    fn augment_rejects_uncolored_seed() {
        let g = k33();
        let mut c = vizing_plus_one(&g).unwrap();
        let a = c.distinguished();
        for e in 0..g.n_edges() {
            if c.get(e) == Some(a) {
                c.set(e, 0);
            }
        }
        // Recolor edge 0 to some non-distinguished color and seed on it.
        let err = augment_disjoint(&g, &c, &[0]).unwrap_err();
        assert!(matches!(err, KoenigError::SeedNotDistinguished(0)));
    }

    #[test]
    fn augmentation_shift_matches_successor_rule() {
        let g = Graph::from_edges(4, &[(1, 0), (0, 2), (2, 3)]).unwrap();
        let mut c = PartialEdgeColoring::new(3, 3);
        c.set(0, 2);
        c.set(1, 0);
        c.set(2, 1);
        let d = augment_disjoint(&g, &c, &[0]).unwrap();
        // d(e) = beta, d(f_i) = c(f_{i+1}), last edge flips.
        assert_eq!(d.get(0), Some(0));
        assert_eq!(d.get(1), c.get(2));
        assert_eq!(d.get(2), Some(0));
        assert!(d.is_proper(&g));
        assert_eq!(d.class_edges(2), Vec::<EdgeId>::new());
    }

    #[test]
    fn eliminate_noop_without_distinguished_edges() {
        let g = cycle(6);
        let mut c = PartialEdgeColoring::new(6, 3);
        for e in 0..6 {
            c.set(e, e % 2);
        }
        let eta = EdgeMeasure::uniform(6);
        let cfg = EliminationConfig::for_graph(&g, 0.5, false, 0).unwrap();
        let out = eliminate_color(&g, &c, &eta, &cfg).unwrap();
        assert_eq!(out.coloring, c);
        assert_eq!(out.stats.augmentations, 0);
        assert_eq!(out.stats.sweeps, 1);
    }

    #[test]
    fn eliminate_six_cycle_with_one_distinguished_edge() {
        let g = cycle(6);
        let mut c = PartialEdgeColoring::new(6, 3);
        for e in 0..6 {
            c.set(e, e % 2);
        }
        c.set(0, 2);
        let eta = EdgeMeasure::uniform(6);
        let cfg = EliminationConfig::for_graph(&g, 0.5, false, 0).unwrap();
        let out = eliminate_color(&g, &c, &eta, &cfg).unwrap();
        assert!(out.coloring.class_edges(2).is_empty());
        assert!(out.coloring.is_proper(&g));
        assert_eq!(out.stats.survivors, 0);
    }

    #[test]
    fn eliminate_triangle_reports_odd_cycle() {
        let g = triangle();
        let mut c = PartialEdgeColoring::new(3, 3);
        c.set(0, 2);
        c.set(1, 0);
        c.set(2, 1);
        let eta = EdgeMeasure::uniform(3);
        let cfg = EliminationConfig::for_graph(&g, 0.5, false, 0).unwrap();
        assert!(matches!(
            eliminate_color(&g, &c, &eta, &cfg),
            Err(KoenigError::OddCycleDetected { .. })
        ));
    }

    #[test]
    fn improvement_relation_holds_on_random_bipartite() {
        let g = crate::generate::gen_bipartite_regular(40, 3, 7).unwrap();
        let c = vizing_plus_one(&g).unwrap();
        let mu = VertexMeasure::uniform(g.n_vertices());
        let eta = edge_measure_from(&g, &mu).unwrap();
        let cfg = EliminationConfig::for_graph(&g, 0.25, false, 0).unwrap();
        let out = eliminate_color(&g, &c, &eta, &cfg).unwrap();
        let a = c.distinguished();
        // dom never changes and the distinguished class only shrinks.
        assert!(out.coloring.is_total());
        let before: BTreeSet<_> = c.class_edges(a).into_iter().collect();
        let after: BTreeSet<_> = out.coloring.class_edges(a).into_iter().collect();
        assert!(after.is_subset(&before));
        // Trajectory is non-increasing.
        assert!(out
            .stats
            .a_trajectory
            .windows(2)
            .all(|w| w[1] <= w[0]));
    }

    #[test]
    fn vizing_random_cubic_graph_is_proper_by_recount() {
        let g = crate::generate::gen_random_regular(100, 3, 2).unwrap();
        let c = vizing_plus_one(&g).unwrap();
        let mu = VertexMeasure::uniform(100);
        let rep = corr_of_coloring(&g, &c, &mu);
        assert_eq!(rep.corr_mass, 1.0);
    }

    #[test]
    fn augment_ten_sparse_seeds_drops_class_by_ten() {
        let g = crate::generate::gen_bipartite_regular(400, 3, 9).unwrap();
        let mut c = vizing_plus_one(&g).unwrap();
        let a = c.distinguished();
        // Seed the distinguished color on edges whose endpoints both miss it.
        for e in 0..g.n_edges() {
            let (u, v) = g.endpoints(e);
            let free = |x: VertexId| !g.incident_edges(x).any(|f| c.get(f) == Some(a));
            if free(u) && free(v) {
                c.set(e, a);
            }
        }
        let all = c.class_edges(a);
        // Take ten seeds from one sparse class so the chains are disjoint.
        let classes = g.sparse_edge_classes(3 * 2 * 2 * 4);
        let class = classes
            .iter()
            .map(|cl| {
                cl.iter()
                    .copied()
                    .filter(|e| c.get(*e) == Some(a))
                    .collect::<Vec<_>>()
            })
            .max_by_key(Vec::len)
            .unwrap();
        let seeds = &class[..class.len().min(10)];
        assert!(!seeds.is_empty());
        let d = augment_disjoint(&g, &c, seeds).unwrap();
        assert!(d.is_proper(&g));
        assert_eq!(d.class_edges(a).len(), all.len() - seeds.len());
    }

    #[test]
    fn finalize_drops_distinguished_class() {
        let g = cycle(6);
        let mut c = PartialEdgeColoring::new(6, 3);
        for e in 0..6 {
            c.set(e, e % 2);
        }
        let mu = VertexMeasure::uniform(6);
        let d = finalize_delta_coloring(&g, &c);
        assert_eq!(d.palette(), 2);
        assert!(d.is_total());
        assert_eq!(corr_of_coloring(&g, &d, &mu).corr_mass, 1.0);

        let mut c2 = c.clone();
        c2.set(0, 2);
        let d2 = finalize_delta_coloring(&g, &c2);
        assert_eq!(d2.get(0), None);
        let rep = corr_of_coloring(&g, &d2, &mu);
        // Exactly the 2 endpoints of the dropped edge leave Corr.
        assert_eq!(rep.corr_vertices.len(), 4);
    }

    #[test]
    fn matching_from_alternating_cycle_coloring() {
        let g = cycle(8);
        let mut c = PartialEdgeColoring::new(8, 2);
        for e in 0..8 {
            c.set(e, e % 2);
        }
        let m = extract_matching(&g, &c, 0);
        assert_eq!(m.len(), 4);
        assert!(unmatched_vertices(&g, &m).is_empty());
        let empty = extract_matching(&g, &c, 1).is_empty();
        assert!(!empty);
        let none = extract_matching(&g, &PartialEdgeColoring::new(8, 2), 0);
        assert!(none.is_empty());
        assert_eq!(unmatched_vertices(&g, &none).len(), 8);
    }

    #[test]
    fn weighted_elimination_bound_under_skewed_measure() {
        let full = crate::generate::gen_bipartite_regular(200, 3, 4).unwrap();
        let keep: Vec<bool> = (0..full.n_edges()).map(|e| e % 15 != 2).collect();
        let (g, _) = full.edge_subgraph(&keep);
        let mu = VertexMeasure::random(g.n_vertices(), 9);
        let nu = make_quasi_invariant(&mu);
        let eta = edge_measure_from(&g, &nu).unwrap();
        assert!(!eta.is_uniform());
        let mut c = vizing_plus_one(&g).unwrap();
        let a = c.distinguished();
        for e in 0..g.n_edges() {
            let (u, v) = g.endpoints(e);
            let free = |x: VertexId| !g.incident_edges(x).any(|f| c.get(f) == Some(a));
            if free(u) && free(v) {
                c.set(e, a);
            }
        }
        let cfg = EliminationConfig::for_graph(&g, 0.02, true, 0).unwrap();
        assert!(cfg.weighted);
        let out = eliminate_color(&g, &c, &eta, &cfg).unwrap();
        assert!(out.coloring.is_proper(&g));
        assert_eq!(out.stats.skipped_conflicts, 0);
        if out.stats.uncertified_survivors == 0 {
            let a_mass = eta.mass(out.coloring.class_edges(a).into_iter());
            assert!(
                a_mass <= 1.0 / cfg.l_scale as f64 + 1e-12,
                "eta mass {} above 1/{}",
                a_mass,
                cfg.l_scale
            );
        }
        // Uniform mode must refuse a skewed edge measure.
        let bad = EliminationConfig::for_graph(&g, 0.02, false, 0).unwrap();
        assert!(matches!(
            eliminate_color(&g, &c, &eta, &bad),
            Err(KoenigError::InvalidConfig(_))
        ));
    }

    #[test]
    fn pipeline_on_k33_reaches_full_mass() {
        let g = k33();
        let mu = VertexMeasure::uniform(6);
        let eps = 1.0 / 12.0;
        let out = approximate_koenig(&g, &mu, eps, false, 0).unwrap();
        assert_eq!(out.report.corr_mass, 1.0);
        assert_eq!(out.coloring.palette(), 3);
        assert!(out.coloring.is_total());
    }
}
