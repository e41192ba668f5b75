use thiserror::Error;

use crate::trace::Trace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: non-positive or non-finite weight {weight} on edge {src}->{dst}")]
    BadWeight {
        line: usize,
        src: usize,
        dst: usize,
        weight: f64,
    },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("line {line}: duplicate edge {src}->{dst}")]
    DuplicateEdge { line: usize, src: usize, dst: usize },

    #[error("vertex id {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("invalid graph json: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("QR iteration did not converge after {iterations} sweeps (n = {n}, last subdiagonal residual {residual:e})")]
    NonConvergence {
        n: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("eigenvector for eigenvalue {eigenvalue} has residual {residual:e} above tolerance")]
    EigenvectorResidual { eigenvalue: String, residual: f64 },

    #[error(
        "zero eigenvalue is not simple: two smallest |lambda| are {smallest:e} and {second:e}"
    )]
    ZeroMultiplicity { smallest: f64, second: f64 },

    #[error("matrix exponential: tolerance {tol:e} not reachable within {max_terms} Taylor terms")]
    ExpTolerance { tol: f64, max_terms: usize },

    #[error("rank-deficient basis (Gram condition {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("input vector is not unit norm (norm {norm})")]
    NonUnit { norm: f64 },

    #[error("degenerate two-dimensional span (|<x, y>| = {overlap})")]
    DegenerateSubspace { overlap: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpiError {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("step size {delta} outside the admissible interval (0, {bound}) with max in-degree {max_indegree}")]
    InvalidDelta {
        delta: f64,
        max_indegree: f64,
        bound: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no convergence after {max_iter} iterations (last estimate {last_estimate})")]
    NonConvergence {
        max_iter: usize,
        last_estimate: f64,
        trace: Box<Trace>,
    },

    #[error("iteration {k} produced a zero or non-finite state vector")]
    DegenerateIterate { k: usize },

    #[error(
        "node {node} computed a non-positive squared-norm estimate {value:e} at iteration {k}"
    )]
    NonpositiveNormEstimate { node: usize, k: usize, value: f64 },

    #[error(transparent)]
    Spectral(#[from] SpectralError),

    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("node {src} tried to send to {dst} without an edge {src}->{dst}")]
    NoSuchEdge { src: usize, dst: usize },

    #[error("node state count {states} does not match topology size {n}")]
    SizeMismatch { states: usize, n: usize },
}
