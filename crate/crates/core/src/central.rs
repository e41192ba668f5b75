//! Centralized generalized power iteration.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{GpiError, SpectralError};
use crate::graph::{is_strongly_connected, laplacian, validate_delta, WeightedDigraph};
use crate::spectral::{
    dominant_2x2_magnitude_real, left_null_eigvec, modified_laplacian, subspace_dist_1d,
    subspace_dist_2d,
};
use crate::trace::{Scenario, Trace, TraceRecord};

/// Gram determinants at or below this leave the 2-d Rayleigh block undefined.
pub const GRAM_DET_FLOOR: f64 = 1e-14;

/// Required ratio between the 2-d distance denominator and the inner-product
/// error level.
pub const NOISE_MARGIN: f64 = 1e3;

/// Whether the two-dimensional distance can be resolved from inner products
/// carrying relative error `noise`. With Gram factors `f = 1 - |<x, y>|^2`,
/// the error in `d_hat^2` is about `noise / sqrt(f_cur f_prev)`; once that
/// reaches the scale of `f_cur` the value is noise and is reported as 1.
pub fn two_dim_resolvable(f_cur: f64, f_prev: f64, noise: f64) -> bool {
    f_cur * f_prev > NOISE_MARGIN * noise.max(f64::EPSILON)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    /// Equal distances select the one-dimensional (real) branch.
    #[default]
    PreferReal,
    PreferComplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpiConfig {
    pub delta: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub tie_break: TieBreak,
    /// Replaces the seeded random start; normalized before use.
    pub initial_vector: Option<Vec<f64>>,
}

impl GpiConfig {
    pub fn new(delta: f64, epsilon: f64) -> Self {
        Self {
            delta,
            epsilon,
            max_iter: 1000,
            seed: 0,
            tie_break: TieBreak::default(),
            initial_vector: None,
        }
    }

    pub fn validate(&self, g: &WeightedDigraph) -> Result<(), GpiError> {
        validate_delta(g, self.delta)?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(GpiError::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter < 3 {
            return Err(GpiError::Config(format!(
                "max_iter must be at least 3, got {}",
                self.max_iter
            )));
        }
        if let Some(x) = &self.initial_vector {
            if x.len() != g.n() {
                return Err(GpiError::Config(format!(
                    "initial vector has {} entries for a graph with {} vertices",
                    x.len(),
                    g.n()
                )));
            }
        }
        Ok(())
    }

    /// The unit start vector: the override if present, else i.i.d. standard
    /// normal entries from the seeded generator.
    pub fn initial_state_vector(&self, n: usize) -> Result<DVector<f64>, GpiError> {
        let x = match &self.initial_vector {
            Some(v) => DVector::from_column_slice(v),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng))
            }
        };
        let norm = x.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(GpiError::Config(
                "initial vector must be finite and nonzero".into(),
            ));
        }
        Ok(x / norm)
    }
}

/// `(1 - ln magnitude) / delta`.
pub fn gac_from_magnitude(magnitude: f64, delta: f64) -> f64 {
    (1.0 - magnitude.ln()) / delta
}

/// Picks the branch with the smaller subspace distance and returns
/// `(d_next, lam_tilde, scenario)`.
pub fn select_branch(
    d_check: f64,
    d_hat: f64,
    lam_check: f64,
    lam_hat: f64,
    delta: f64,
    tie_break: TieBreak,
) -> (f64, f64, Scenario) {
    let real = match tie_break {
        TieBreak::PreferReal => d_check <= d_hat,
        TieBreak::PreferComplex => d_check < d_hat,
    };
    if real {
        (d_check, gac_from_magnitude(lam_check, delta), Scenario::R)
    } else {
        (d_hat, gac_from_magnitude(lam_hat, delta), Scenario::I)
    }
}

/// Solves the 2x2 system `[[1, g], [g, 1]] R = b` and returns the dominant
/// root magnitude of `R`, or `None` when the Gram matrix is numerically
/// singular.
pub fn rayleigh_2x2_magnitude(g: f64, b: &Matrix2<f64>) -> Option<f64> {
    let det = 1.0 - g * g;
    // Negated so NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(det > GRAM_DET_FLOOR) {
        return None;
    }
    let inv = Matrix2::new(1.0, -g, -g, 1.0) / det;
    Some(dominant_2x2_magnitude_real(&(inv * b)))
}

#[derive(Debug, Clone)]
pub struct CentralState {
    /// Index of the next iteration to run.
    pub k: usize,
    pub x_prev2: Option<DVector<f64>>,
    pub x_prev: Option<DVector<f64>>,
    pub x_cur: DVector<f64>,
    /// `L~ x_prev`, i.e. the intermediate vector that produced `x_cur`.
    pub xbar_cur: Option<DVector<f64>>,
    pub d_check: f64,
    pub d_hat: f64,
    pub d_next: f64,
    pub lam_check: f64,
    pub lam_hat: f64,
    pub lam_tilde: f64,
    pub scenario: Scenario,
    pub delta: f64,
    pub tie_break: TieBreak,
}

pub fn init_central(n: usize, cfg: &GpiConfig) -> Result<CentralState, GpiError> {
    let x0 = cfg.initial_state_vector(n)?;
    Ok(CentralState {
        k: 1,
        x_prev2: None,
        x_prev: None,
        x_cur: x0,
        xbar_cur: None,
        d_check: f64::NAN,
        d_hat: f64::NAN,
        d_next: cfg.epsilon,
        lam_check: f64::NAN,
        lam_hat: f64::NAN,
        lam_tilde: f64::NAN,
        scenario: Scenario::Undecided,
        delta: cfg.delta,
        tie_break: cfg.tie_break,
    })
}

/// One iteration `x_k = L~ x_{k-1} / ||L~ x_{k-1}||` with its distance and
/// eigenvalue estimates. Returns the record for iteration `k`.
pub fn step_central(state: &mut CentralState, op: &DMatrix<f64>) -> Result<TraceRecord, GpiError> {
    let k = state.k;
    let xbar = op * &state.x_cur;
    let norm = xbar.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(GpiError::DegenerateIterate { k });
    }
    let x_new = &xbar / norm;

    let d_check = subspace_dist_1d(&state.x_cur, &x_new)?;
    let lam_check = state.x_cur.dot(&xbar).abs();
    let (d_hat, lam_hat) = match (&state.x_prev, &state.xbar_cur) {
        (Some(xp), Some(xbar_prev)) => {
            let f_prev = 1.0 - xp.dot(&state.x_cur).powi(2);
            let d_hat = if two_dim_resolvable(d_check * d_check, f_prev, 0.0) {
                match subspace_dist_2d(xp, &state.x_cur, &x_new) {
                    Ok(d) => d,
                    Err(SpectralError::DegenerateSubspace { .. }) => 1.0,
                    Err(e) => return Err(e.into()),
                }
            } else {
                1.0
            };
            let b = Matrix2::new(
                xp.dot(xbar_prev),
                xp.dot(&xbar),
                state.x_cur.dot(xbar_prev),
                state.x_cur.dot(&xbar),
            );
            let lam_hat = rayleigh_2x2_magnitude(xp.dot(&state.x_cur), &b).unwrap_or(state.lam_hat);
            (d_hat, lam_hat)
        }
        _ => (1.0, lam_check),
    };
    let (d, lam_tilde, scenario) = select_branch(
        d_check,
        d_hat,
        lam_check,
        lam_hat,
        state.delta,
        state.tie_break,
    );

    state.x_prev2 = state.x_prev.take();
    state.x_prev = Some(std::mem::replace(&mut state.x_cur, x_new));
    state.xbar_cur = Some(xbar);
    state.d_check = d_check;
    state.d_hat = d_hat;
    state.d_next = d;
    state.lam_check = lam_check;
    state.lam_hat = lam_hat;
    state.lam_tilde = lam_tilde;
    state.scenario = scenario;
    state.k += 1;

    Ok(TraceRecord {
        k,
        d_check,
        d_hat,
        d,
        lam_check,
        lam_hat,
        lam_tilde,
        scenario,
    })
}

#[derive(Debug, Clone)]
pub struct CentralRun {
    pub estimate: f64,
    pub scenario: Scenario,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub final_vector: DVector<f64>,
}

/// Iterates `op` until the selected distance drops below `epsilon`.
pub fn run_with_operator(op: &DMatrix<f64>, cfg: &GpiConfig) -> Result<CentralRun, GpiError> {
    let mut state = init_central(op.nrows(), cfg)?;
    let mut trace = Vec::new();
    while state.d_next >= cfg.epsilon {
        if trace.len() == cfg.max_iter {
            return Err(GpiError::NonConvergence {
                max_iter: cfg.max_iter,
                last_estimate: state.lam_tilde,
                trace: Box::new(Trace::Central(trace)),
            });
        }
        trace.push(step_central(&mut state, op)?);
    }
    Ok(CentralRun {
        estimate: state.lam_tilde,
        scenario: state.scenario,
        iterations: trace.len(),
        trace,
        final_vector: state.x_cur,
    })
}

pub fn run_centralized(g: &WeightedDigraph, cfg: &GpiConfig) -> Result<CentralRun, GpiError> {
    if !is_strongly_connected(g) {
        return Err(GpiError::NotStronglyConnected);
    }
    cfg.validate(g)?;
    let l = laplacian(g);
    let w1 = left_null_eigvec(&l)?;
    let lt = modified_laplacian(&l, &w1, cfg.delta)?;
    run_with_operator(&lt.matrix, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{example1, example2};
    use crate::graph::load_edge_list;
    use crate::trace::scenario_stable_from;

    #[test]
    fn seeded_start_is_deterministic_and_unit() {
        let cfg = GpiConfig {
            seed: 9,
            ..GpiConfig::new(0.1, 1e-3)
        };
        let a = init_central(7, &cfg).unwrap();
        let b = init_central(7, &cfg).unwrap();
        assert_eq!(a.x_cur, b.x_cur);
        assert!((a.x_cur.norm() - 1.0).abs() < 1e-15);
        assert_eq!(a.d_next, 1e-3);
        assert_eq!(a.k, 1);
    }

    #[test]
    fn published_start_vector_override() {
        let ex = example1();
        let cfg = GpiConfig {
            initial_vector: Some(ex.x0.clone()),
            ..GpiConfig::new(ex.delta, ex.epsilon)
        };
        let s = init_central(6, &cfg).unwrap();
        let norm = DVector::from_column_slice(&ex.x0).norm();
        assert!((s.x_cur[3] - 0.8137 / norm).abs() < 1e-15);
    }

    #[test]
    fn diagonal_fixed_point() {
        let op = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        let cfg = GpiConfig {
            initial_vector: Some(vec![1.0, 0.0]),
            ..GpiConfig::new(0.2, 1e-3)
        };
        let mut s = init_central(2, &cfg).unwrap();
        let r = step_central(&mut s, &op).unwrap();
        assert_eq!(s.x_cur, DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(r.d_check, 0.0);
        assert_eq!(r.lam_check, 2.0);
        assert_eq!(r.d_hat, 1.0);
        assert_eq!(r.scenario, Scenario::R);
        assert!((r.lam_tilde - (1.0 - 2f64.ln()) / 0.2).abs() < 1e-15);
    }

    #[test]
    fn tie_break_policies() {
        assert_eq!(
            select_branch(0.5, 0.5, 2.0, 3.0, 0.1, TieBreak::PreferReal).2,
            Scenario::R
        );
        assert_eq!(
            select_branch(0.5, 0.5, 2.0, 3.0, 0.1, TieBreak::PreferComplex).2,
            Scenario::I
        );
        assert_eq!(
            select_branch(0.2, 0.5, 2.0, 3.0, 0.1, TieBreak::PreferComplex).2,
            Scenario::R
        );
    }

    #[test]
    fn example1_complex_pair() {
        let ex = example1();
        let cfg = GpiConfig {
            initial_vector: Some(ex.x0.clone()),
            ..GpiConfig::new(ex.delta, ex.epsilon)
        };
        let run = run_centralized(&ex.graph, &cfg).unwrap();
        assert_eq!(run.scenario, Scenario::I);
        assert!((run.estimate - 1.192).abs() < 5e-3, "{}", run.estimate);
        assert!((32..=60).contains(&run.iterations), "{}", run.iterations);
        let last = run.trace.last().unwrap();
        assert!((last.lam_hat - 2.055).abs() < 5e-3);
        let stable =
            scenario_stable_from(run.trace.iter().map(|r| (r.k, &r.scenario)), Scenario::I);
        assert!(stable.unwrap() <= 15, "{stable:?}");
    }

    #[test]
    fn example2_real() {
        let ex = example2();
        let cfg = GpiConfig {
            initial_vector: Some(ex.x0.clone()),
            ..GpiConfig::new(ex.delta, ex.epsilon)
        };
        let run = run_centralized(&ex.graph, &cfg).unwrap();
        assert_eq!(run.scenario, Scenario::R);
        assert!((run.estimate - 1.255).abs() < 5e-3, "{}", run.estimate);
        assert!((34..=64).contains(&run.iterations), "{}", run.iterations);
        assert!((run.trace.last().unwrap().lam_check - 1.939).abs() < 5e-3);
    }

    #[test]
    fn perturbed_complete_graph_matches_fiedler_value() {
        // Symmetric K4 with distinct weights so the Fiedler value is simple.
        let mut text = String::new();
        for (i, j, w) in [
            (0, 1, 1.0),
            (0, 2, 0.9),
            (0, 3, 1.2),
            (1, 2, 1.1),
            (1, 3, 0.8),
            (2, 3, 1.05),
        ] {
            text += &format!("{i},{j},{w}\n{j},{i},{w}\n");
        }
        let g = load_edge_list(&text).unwrap();
        let cfg = GpiConfig {
            seed: 5,
            ..GpiConfig::new(0.2, 1e-6)
        };
        let run = run_centralized(&g, &cfg).unwrap();
        let oracle = crate::spectral::gac_oracle(&laplacian(&g), 0.2).unwrap();
        // The scenario label is not asserted: here the third eigenvalue ratio
        // is below the second, so the 2-d distance shrinks faster than the
        // 1-d one even though the dominant eigenvalue is real.
        assert!(
            (run.estimate - oracle.gac).abs() < 1e-4,
            "{} vs {}",
            run.estimate,
            oracle.gac
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let path = load_edge_list("0,1,1\n1,2,1").unwrap();
        assert_eq!(
            run_centralized(&path, &GpiConfig::new(0.1, 1e-3)).unwrap_err(),
            GpiError::NotStronglyConnected
        );
        let ex = example1();
        assert!(matches!(
            run_centralized(&ex.graph, &GpiConfig::new(0.5, 1e-3)),
            Err(GpiError::InvalidDelta { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let ex = example1();
        let cfg = GpiConfig {
            max_iter: 5,
            initial_vector: Some(ex.x0.clone()),
            ..GpiConfig::new(ex.delta, ex.epsilon)
        };
        match run_centralized(&ex.graph, &cfg) {
            Err(GpiError::NonConvergence {
                max_iter, trace, ..
            }) => {
                assert_eq!(max_iter, 5);
                assert_eq!(trace.len(), 5);
            }
            other => panic!("{other:?}"),
        }
    }
}
