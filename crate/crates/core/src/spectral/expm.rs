//! Matrix exponential by scaling and squaring around a truncated Taylor core.

use nalgebra::DMatrix;

use crate::error::SpectralError;

/// Hard cap on Taylor terms for the scaled matrix.
pub const MAX_TAYLOR_TERMS: usize = 40;

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` to within `tol` (relative to `exp(||a||)`).
///
/// The matrix is scaled by `2^-s` until its 1-norm is at most 0.5, the Taylor
/// series of the scaled matrix is summed until the Lagrange remainder bound
/// drops below `tol / 2^s`, and the result is squared `s` times.
pub fn matrix_exp(a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>, SpectralError> {
    assert!(a.is_square(), "matrix_exp of a non-square matrix");
    let n = a.nrows();
    let norm = norm1(a);
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let scaled = a / 2f64.powi(s as i32);
    let theta = norm / 2f64.powi(s as i32);
    // Squaring amplifies the core error by roughly 2^s.
    let core_tol = tol / 2f64.powi(s as i32);

    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut remainder = theta * theta.exp();
    let mut converged = theta == 0.0;
    for j in 1..=MAX_TAYLOR_TERMS {
        term = &term * &scaled / j as f64;
        result += &term;
        // ||R_j|| <= theta^(j+1) / (j+1)! * e^theta
        remainder *= theta / (j + 1) as f64;
        if remainder <= core_tol || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpectralError::ExpTolerance {
            tol,
            max_terms: MAX_TAYLOR_TERMS,
        });
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}
