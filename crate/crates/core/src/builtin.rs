//! The two six-node reference networks with their published run parameters.

use crate::graph::WeightedDigraph;

#[derive(Debug, Clone)]
pub struct BuiltinExample {
    pub name: &'static str,
    /// `weights[i][j]` is the weight of edge `j -> i`.
    pub weights: Vec<Vec<f64>>,
    pub graph: WeightedDigraph,
    pub x0: Vec<f64>,
    pub delta: f64,
    pub epsilon: f64,
}

const EXAMPLE1_W: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.78, 0.71, 0.93, 0.73],
    [0.0, 0.0, 0.0, 0.0, 0.90, 0.88],
    [0.98, 0.0, 0.0, 0.76, 0.55, 0.0],
    [0.0, 0.10, 0.0, 0.0, 0.0, 0.75],
    [0.0, 0.0, 0.61, 0.77, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.61, 0.0],
];

const EXAMPLE1_X0: [f64; 6] = [0.0976, 0.2323, 0.2316, 0.8137, 0.1618, 0.4411];

const EXAMPLE2_W: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.0, 0.61, 0.75, 0.0],
    [0.60, 0.0, 0.0, 0.97, 0.0, 0.71],
    [0.0, 0.86, 0.0, 0.77, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.74, 0.72],
    [0.85, 1.0, 0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.76, 0.0, 0.58, 0.0],
];

const EXAMPLE2_X0: [f64; 6] = [0.1423, 0.4528, 0.6571, 0.0866, 0.5208, 0.2534];

fn build(
    name: &'static str,
    w: &[[f64; 6]; 6],
    x0: &[f64; 6],
    delta: f64,
    epsilon: f64,
) -> BuiltinExample {
    let weights: Vec<Vec<f64>> = w.iter().map(|r| r.to_vec()).collect();
    let graph = WeightedDigraph::from_weight_matrix(&weights).expect("builtin weights are valid");
    BuiltinExample {
        name,
        weights,
        graph,
        x0: x0.to_vec(),
        delta,
        epsilon,
    }
}

/// Network whose connectivity is set by a complex-conjugate Laplacian pair.
pub fn example1() -> BuiltinExample {
    build("example1", &EXAMPLE1_W, &EXAMPLE1_X0, 0.235, 5e-4)
}

/// Network whose connectivity is set by a real Laplacian eigenvalue.
pub fn example2() -> BuiltinExample {
    build("example2", &EXAMPLE2_W, &EXAMPLE2_X0, 0.269, 5e-4)
}

pub fn by_index(index: u8) -> Option<BuiltinExample> {
    match index {
        1 => Some(example1()),
        2 => Some(example2()),
        _ => None,
    }
}
