//! Shared instance fixtures for the pipeline benchmarks.

use schreier_core::generate::{gen_bipartite_regular, gen_random_regular, gen_torus};
use schreier_core::graph::Graph;

pub fn bipartite_fixture(n_side: usize, d: usize) -> Graph {
    gen_bipartite_regular(n_side, d, 42).expect("bipartite fixture")
}

pub fn torus_fixture(side: usize) -> Graph {
    gen_torus(&[side, side]).expect("torus fixture").graph
}

pub fn regular_fixture(n: usize, d: usize) -> Graph {
    gen_random_regular(n, d, 42).expect("regular fixture")
}
