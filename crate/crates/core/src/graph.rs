//! Weighted digraphs and their Laplacians.
//!
//! Edges are stored as `(src, dst, weight)` where information flows from `src`
//! to `dst`. In weight-matrix form this is `W[dst][src] = weight`, i.e. row `i`
//! of `W` holds the weights node `i` assigns to its in-neighbors.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GpiError, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// Immutable weighted digraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
    /// `in_neighbors[i]` lists `(src, weight)` sorted by `src`.
    in_neighbors: Vec<Vec<(usize, f64)>>,
    out_neighbors: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedDigraph {
    pub fn from_edges(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewVertices(n));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for (idx, e) in edges.iter().enumerate() {
            let line = idx + 1;
            for v in [e.src, e.dst] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop {
                    line,
                    vertex: e.src,
                });
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(GraphError::BadWeight {
                    line,
                    src: e.src,
                    dst: e.dst,
                    weight: e.weight,
                });
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(GraphError::DuplicateEdge {
                    line,
                    src: e.src,
                    dst: e.dst,
                });
            }
        }
        let mut in_neighbors = vec![Vec::new(); n];
        let mut out_neighbors = vec![Vec::new(); n];
        for e in &edges {
            in_neighbors[e.dst].push((e.src, e.weight));
            out_neighbors[e.src].push(e.dst);
        }
        for list in &mut in_neighbors {
            list.sort_by_key(|&(src, _)| src);
        }
        for list in &mut out_neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges,
            in_neighbors,
            out_neighbors,
        })
    }

    /// Builds a graph from a weight matrix where `w[i][j] > 0` is the weight of
    /// edge `j -> i`. Zero entries mean "no edge"; the diagonal must be zero.
    pub fn from_weight_matrix(w: &[Vec<f64>]) -> Result<Self, GraphError> {
        let n = w.len();
        let mut edges = Vec::new();
        for (i, row) in w.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::Parse {
                    line: i + 1,
                    msg: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            for (j, &wij) in row.iter().enumerate() {
                if wij != 0.0 {
                    edges.push(Edge {
                        src: j,
                        dst: i,
                        weight: wij,
                    });
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn in_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.in_neighbors[i]
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_neighbors[i]
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out_neighbors[src].binary_search(&dst).is_ok()
    }

    /// Dense weight matrix with `W[i][j]` the weight of `j -> i`.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            w[(e.dst, e.src)] = e.weight;
        }
        w
    }

    /// Copy of the graph with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GraphError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: e.weight * factor,
                ..*e
            })
            .collect();
        Self::from_edges(self.n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            // `{}` on f64 prints the shortest representation that round-trips.
            let _ = writeln!(out, "{},{},{}", e.src, e.dst, e.weight);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| (e.src, e.dst, e.weight))
                .collect(),
        };
        serde_json::to_string(&doc).expect("graph json serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        let edges = doc
            .edges
            .into_iter()
            .map(|(src, dst, weight)| Edge { src, dst, weight })
            .collect();
        Self::from_edges(doc.n, edges)
    }
}

/// Parses a `src,dst,weight` edge list. Blank lines and `#` comments are
/// skipped; the vertex count is one more than the largest id seen.
pub fn load_edge_list(text: &str) -> Result<WeightedDigraph, GraphError> {
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(GraphError::Parse {
                line,
                msg: format!("expected 3 fields `src,dst,weight`, got {}", fields.len()),
            });
        }
        let parse_id = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("invalid {what} vertex id `{s}`"),
            })
        };
        let src = parse_id(fields[0], "source")?;
        let dst = parse_id(fields[1], "destination")?;
        let weight = fields[2].parse::<f64>().map_err(|_| GraphError::Parse {
            line,
            msg: format!("invalid weight `{}`", fields[2]),
        })?;
        if src == dst {
            return Err(GraphError::SelfLoop { line, vertex: src });
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(GraphError::BadWeight {
                line,
                src,
                dst,
                weight,
            });
        }
        if !seen.insert((src, dst)) {
            return Err(GraphError::DuplicateEdge { line, src, dst });
        }
        max_id = max_id.max(src).max(dst);
        edges.push(Edge { src, dst, weight });
    }
    if edges.is_empty() {
        return Err(GraphError::TooFewVertices(0));
    }
    WeightedDigraph::from_edges(max_id + 1, edges)
}

/// Dense Laplacian `L = D - W` of a weighted digraph (in-degree form).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl std::ops::Deref for LaplacianMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

pub fn laplacian(g: &WeightedDigraph) -> LaplacianMatrix {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for &(j, w) in g.in_neighbors(i) {
            l[(i, j)] = -w;
            diag += w;
        }
        l[(i, i)] = diag;
    }
    LaplacianMatrix(l)
}

/// Largest total in-weight over all vertices.
pub fn max_weighted_indegree(g: &WeightedDigraph) -> f64 {
    (0..g.n())
        .map(|i| g.in_neighbors(i).iter().map(|&(_, w)| w).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Checks `0 < delta < 1/max_indegree`.
pub fn validate_delta(g: &WeightedDigraph, delta: f64) -> Result<(), GpiError> {
    let max_indegree = max_weighted_indegree(g);
    let bound = 1.0 / max_indegree;
    if delta > 0.0 && delta < bound {
        Ok(())
    } else {
        Err(GpiError::InvalidDelta {
            delta,
            max_indegree,
            bound,
        })
    }
}

fn reaches_all(n: usize, adjacency: impl Fn(usize) -> Vec<usize>) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for u in adjacency(v) {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == n
}

/// True iff every vertex reaches and is reached from vertex 0.
pub fn is_strongly_connected(g: &WeightedDigraph) -> bool {
    let n = g.n();
    reaches_all(n, |v| g.out_neighbors(v).to_vec())
        && reaches_all(n, |v| g.in_neighbors(v).iter().map(|&(s, _)| s).collect())
}

/// Random strongly connected digraph: a shuffled Hamiltonian cycle plus every
/// other ordered pair independently with probability `extra_edge_prob`.
/// Weights are uniform on (0, 1].
pub fn random_strongly_connected(n: usize, extra_edge_prob: f64, seed: u64) -> WeightedDigraph {
    assert!(n >= 2, "random_strongly_connected needs n >= 2");
    let p = extra_edge_prob.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut weights = vec![vec![0.0; n]; n];
    for a in 0..n {
        let src = order[a];
        let dst = order[(a + 1) % n];
        weights[src][dst] = 1.0 - rng.random::<f64>();
    }
    for (src, row) in weights.iter_mut().enumerate() {
        for (dst, w) in row.iter_mut().enumerate() {
            if src != dst && *w == 0.0 && rng.random::<f64>() < p {
                *w = 1.0 - rng.random::<f64>();
            }
        }
    }
    let edges = weights
        .iter()
        .enumerate()
        .flat_map(|(src, row)| {
            row.iter()
                .enumerate()
                .filter(|&(_, &w)| w > 0.0)
                .map(move |(dst, &weight)| Edge { src, dst, weight })
        })
        .collect();
    WeightedDigraph::from_edges(n, edges).expect("generator produces a valid graph")
}
