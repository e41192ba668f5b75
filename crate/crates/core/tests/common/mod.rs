#![allow(dead_code)]

use gpi_core::graph::{max_weighted_indegree, random_strongly_connected, WeightedDigraph};

pub const FUZZ_EPSILON: f64 = 1e-4;

pub struct FuzzCase {
    pub seed: u64,
    pub graph: WeightedDigraph,
    pub delta: f64,
}

/// Graph `s` of the fuzz corpus: `n = 3 + s % 8`, extra-edge probability 0.4,
/// step size `0.9 / Delta`.
pub fn fuzz_case(seed: u64) -> FuzzCase {
    let n = 3 + (seed % 8) as usize;
    let graph = random_strongly_connected(n, 0.4, seed);
    let delta = 0.9 / max_weighted_indegree(&graph);
    FuzzCase { seed, graph, delta }
}

pub fn fuzz_corpus(count: u64) -> Vec<FuzzCase> {
    (0..count).map(fuzz_case).collect()
}
