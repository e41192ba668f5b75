//! The modified Laplacian `exp(I - delta L) - e w1 w1^T`, its truncated-series
//! approximant, and the direct GAC oracle.

use std::f64::consts::E;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::eig::{eigenvalues, frobenius, left_null_eigvec, zero_tolerance};
use super::expm::matrix_exp;
use crate::error::SpectralError;
use crate::graph::LaplacianMatrix;

const EXP_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct ModifiedLaplacian {
    pub matrix: DMatrix<f64>,
    pub delta: f64,
    pub w1: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct ApproxModifiedLaplacian {
    pub matrix: DMatrix<f64>,
    pub l_star: usize,
}

fn iteration_matrix(l: &LaplacianMatrix, delta: f64) -> DMatrix<f64> {
    let n = l.n();
    DMatrix::identity(n, n) - l.matrix() * delta
}

pub fn modified_laplacian(
    l: &LaplacianMatrix,
    w1: &DVector<f64>,
    delta: f64,
) -> Result<ModifiedLaplacian, SpectralError> {
    if w1.len() != l.n() {
        return Err(SpectralError::Dimension {
            expected: l.n(),
            got: w1.len(),
        });
    }
    let exp = matrix_exp(&iteration_matrix(l, delta), EXP_TOL)?;
    Ok(ModifiedLaplacian {
        matrix: exp - w1 * w1.transpose() * E,
        delta,
        w1: w1.clone(),
    })
}

/// `sum_{j=0}^{l_star} (I - delta L)^j / j!`, without the deflation term.
pub fn taylor_exp_series(l: &LaplacianMatrix, delta: f64, l_star: usize) -> DMatrix<f64> {
    let n = l.n();
    let a = iteration_matrix(l, delta);
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for j in 1..=l_star {
        term = &term * &a / j as f64;
        sum += &term;
    }
    sum
}

pub fn approx_modified_laplacian(
    l: &LaplacianMatrix,
    w1: &DVector<f64>,
    delta: f64,
    l_star: usize,
) -> ApproxModifiedLaplacian {
    assert_eq!(w1.len(), l.n(), "w1 length must match the Laplacian");
    let series = taylor_exp_series(l, delta, l_star);
    ApproxModifiedLaplacian {
        matrix: series - w1 * w1.transpose() * E,
        l_star,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DominantKind {
    Real,
    ComplexPair,
}

#[derive(Debug, Clone, Serialize)]
pub struct GacReport {
    pub gac: f64,
    pub kind: DominantKind,
    /// The eigenvalue of `L` attaining the minimum nonzero real part (upper
    /// half-plane member for a pair).
    pub achieving: (f64, f64),
    pub delta: f64,
    /// `max |lambda(L~)|` for the configured delta.
    pub modified_radius: f64,
    /// `|gac - (1 - ln modified_radius) / delta|`.
    pub recovery_residual: f64,
    /// More eigenvalues than the achieving real value or pair share the
    /// minimum real part, so the dominant eigenvalue of `L~` is not simple.
    pub multiplicity_violation: bool,
    #[serde(skip)]
    pub laplacian_spectrum: Vec<Complex64>,
    #[serde(skip)]
    pub modified_spectrum: Vec<Complex64>,
}

/// Relative gap under which two real parts count as the same.
const MULTIPLICITY_GAP: f64 = 1e-6;

/// Smallest nonzero real part of the Laplacian spectrum, computed directly,
/// plus the modified-Laplacian cross-check at the given `delta`.
pub fn gac_oracle(l: &LaplacianMatrix, delta: f64) -> Result<GacReport, SpectralError> {
    let lm = l.matrix();
    let mut spectrum = eigenvalues(lm)?;
    spectrum.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let zero_tol = zero_tolerance(lm);
    if spectrum.len() >= 2 && spectrum[1].norm() <= zero_tol {
        return Err(SpectralError::ZeroMultiplicity {
            smallest: spectrum[0].norm(),
            second: spectrum[1].norm(),
        });
    }

    let nonzero = &spectrum[1..];
    let achieving = nonzero
        .iter()
        .copied()
        .min_by(|a, b| a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)))
        .expect("n >= 2");
    let gac = achieving.re;
    let imag_tol = 1e-8 * frobenius(lm).max(1.0);
    let kind = if achieving.im.abs() > imag_tol {
        DominantKind::ComplexPair
    } else {
        DominantKind::Real
    };
    let sharing = nonzero
        .iter()
        .filter(|z| (z.re - gac).abs() <= MULTIPLICITY_GAP * gac.abs().max(1.0))
        .count();
    let expected = match kind {
        DominantKind::Real => 1,
        DominantKind::ComplexPair => 2,
    };

    let w1 = left_null_eigvec(l)?;
    let modified = modified_laplacian(l, &w1, delta)?;
    let mut modified_spectrum = eigenvalues(&modified.matrix)?;
    modified_spectrum.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let modified_radius = modified_spectrum.last().map_or(0.0, |z| z.norm());
    let recovered = (1.0 - modified_radius.ln()) / delta;

    Ok(GacReport {
        gac,
        kind,
        achieving: (achieving.re, achieving.im.abs()),
        delta,
        modified_radius,
        recovery_residual: (gac - recovered).abs(),
        multiplicity_violation: sharing > expected,
        laplacian_spectrum: spectrum,
        modified_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{example1, example2};
    use crate::graph::{laplacian, load_edge_list};

    fn spectral_norm(a: &DMatrix<f64>) -> f64 {
        a.clone().svd(false, false).singular_values.max()
    }

    #[test]
    fn published_modified_radii() {
        for (ex, want) in [(example1(), 2.055), (example2(), 1.939)] {
            let l = laplacian(&ex.graph);
            let w1 = left_null_eigvec(&l).unwrap();
            let m = modified_laplacian(&l, &w1, ex.delta).unwrap();
            let radius = eigenvalues(&m.matrix)
                .unwrap()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!((radius - want).abs() < 5e-3, "{}: {radius}", ex.name);
            assert!((w1.transpose() * &m.matrix).amax() < 1e-8 * frobenius(&m.matrix));
        }
    }

    #[test]
    fn symmetric_graph_stays_symmetric() {
        let g = load_edge_list("0,1,1\n1,0,1\n1,2,0.5\n2,1,0.5\n0,2,0.25\n2,0,0.25").unwrap();
        let l = laplacian(&g);
        let w1 = left_null_eigvec(&l).unwrap();
        let m = modified_laplacian(&l, &w1, 0.4).unwrap();
        assert!((&m.matrix - m.matrix.transpose()).amax() < 1e-13);
        let mut got: Vec<f64> = eigenvalues(&m.matrix)
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        let mut want: Vec<f64> = eigenvalues(l.matrix())
            .unwrap()
            .iter()
            .map(|z| {
                if z.norm() < 1e-10 {
                    0.0
                } else {
                    (1.0 - 0.4 * z.re).exp()
                }
            })
            .collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn first_order_series() {
        let ex = example1();
        let l = laplacian(&ex.graph);
        let w1 = left_null_eigvec(&l).unwrap();
        let a = approx_modified_laplacian(&l, &w1, ex.delta, 1);
        let n = l.n();
        let want = DMatrix::identity(n, n) * 2.0 - l.matrix() * ex.delta - &w1 * w1.transpose() * E;
        assert!((a.matrix - want).amax() < 1e-15);
    }

    #[test]
    fn series_converges_monotonically() {
        let ex = example1();
        let l = laplacian(&ex.graph);
        let w1 = left_null_eigvec(&l).unwrap();
        let exact = modified_laplacian(&l, &w1, ex.delta).unwrap();
        let a_norm = spectral_norm(&iteration_matrix(&l, ex.delta));
        let mut prev = f64::INFINITY;
        let mut fact = 1.0;
        for l_star in 1..=30 {
            fact *= (l_star + 1) as f64;
            let err = spectral_norm(
                &(approx_modified_laplacian(&l, &w1, ex.delta, l_star).matrix - &exact.matrix),
            );
            let bound = a_norm.powi(l_star as i32 + 1) / fact * a_norm.exp();
            assert!(err <= prev + 1e-15, "l*={l_star}");
            assert!(err <= bound + 1e-14, "l*={l_star}: {err} > {bound}");
            prev = err;
        }
        let far = approx_modified_laplacian(&l, &w1, ex.delta, 60);
        assert!(
            spectral_norm(&(far.matrix - &exact.matrix)) <= 1e-12 * spectral_norm(&exact.matrix)
        );
    }

    #[test]
    fn oracle_on_published_examples() {
        let ex = example1();
        let l = laplacian(&ex.graph);
        let r = gac_oracle(&l, ex.delta).unwrap();
        assert_eq!(r.kind, DominantKind::ComplexPair);
        assert!((r.gac - 1.192).abs() < 2e-3);
        assert!((r.achieving.1 - 0.630).abs() < 2e-3);
        assert!(r.recovery_residual < 1e-6);
        assert!(!r.multiplicity_violation);

        let ex = example2();
        let l = laplacian(&ex.graph);
        let r = gac_oracle(&l, ex.delta).unwrap();
        assert_eq!(r.kind, DominantKind::Real);
        assert!((r.gac - 1.255).abs() < 2e-3);
        assert!(r.recovery_residual < 1e-6);
    }

    #[test]
    fn oracle_on_two_node_path() {
        let g = load_edge_list("0,1,1\n1,0,1").unwrap();
        let l = laplacian(&g);
        let r = gac_oracle(&l, 0.4).unwrap();
        assert!((r.gac - 2.0).abs() < 1e-12);
        assert_eq!(r.kind, DominantKind::Real);
    }

    #[test]
    fn oracle_flags_repeated_dominant_eigenvalue() {
        // K3 with unit weights has the double eigenvalue 3.
        let g = load_edge_list("0,1,1\n1,0,1\n1,2,1\n2,1,1\n0,2,1\n2,0,1").unwrap();
        let l = laplacian(&g);
        let r = gac_oracle(&l, 0.3).unwrap();
        assert!((r.gac - 3.0).abs() < 1e-10);
        assert!(r.multiplicity_violation);
    }
}
