//! Orthogonal projectors, Rayleigh blocks, and closed-form subspace distances.

use nalgebra::{ComplexField, DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use super::eig::eigenvalues;
use crate::error::SpectralError;

/// Largest admissible condition number of a Gram matrix `Q^H Q`.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// Overlap `|<x, y>|` at or above which two unit vectors count as parallel.
pub const PARALLEL_OVERLAP: f64 = 1.0 - 1e-12;

const UNIT_TOL: f64 = 1e-10;

/// Eigenvalues of a Hermitian matrix via its real embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `h` with each value
/// doubled. Returned sorted ascending, duplicates included.
pub(crate) fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>, SpectralError> {
    let k = h.nrows();
    let mut real = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let z = h[(i, j)];
            real[(i, j)] = z.re;
            real[(i + k, j + k)] = z.re;
            real[(i, j + k)] = -z.im;
            real[(i + k, j)] = z.im;
        }
    }
    let mut vals: Vec<f64> = eigenvalues(&real)?.iter().map(|z| z.re).collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn checked_gram(q: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, SpectralError> {
    let gram = q.adjoint() * q;
    let vals = hermitian_eigenvalues(&gram)?;
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(condition <= GRAM_CONDITION_LIMIT) {
        return Err(SpectralError::RankDeficient { condition });
    }
    Ok(gram)
}

fn solve_gram(
    gram: DMatrix<Complex64>,
    rhs: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>, SpectralError> {
    gram.lu().solve(rhs).ok_or(SpectralError::RankDeficient {
        condition: f64::INFINITY,
    })
}

/// `Q (Q^H Q)^-1 Q^H` for a one- or two-column basis `Q`.
pub fn project_f(q: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>, SpectralError> {
    let k = q.ncols();
    if !(1..=2).contains(&k) {
        return Err(SpectralError::Dimension {
            expected: 2,
            got: k,
        });
    }
    let gram = checked_gram(q)?;
    Ok(q * solve_gram(gram, &q.adjoint())?)
}

/// `(Q^H Q)^-1 Q^H A Q`, the matrix of `A` compressed onto `span(Q)`.
pub fn project_g(
    a: &DMatrix<f64>,
    q: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>, SpectralError> {
    if a.nrows() != q.nrows() {
        return Err(SpectralError::Dimension {
            expected: a.nrows(),
            got: q.nrows(),
        });
    }
    let gram = checked_gram(q)?;
    let ac = a.map(|x| Complex64::new(x, 0.0));
    solve_gram(gram, &(q.adjoint() * ac * q))
}

fn check_unit<T: ComplexField<RealField = f64>>(x: &DVector<T>) -> Result<(), SpectralError> {
    let norm = x.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(SpectralError::NonUnit { norm });
    }
    Ok(())
}

/// `<a, b> = b^H a`.
fn inner<T: ComplexField<RealField = f64>>(a: &DVector<T>, b: &DVector<T>) -> T {
    b.dotc(a)
}

/// Distance between `span{x1}` and `span{x2}`: `sqrt(1 - |<x2, x1>|^2)`.
pub fn subspace_dist_1d<T: ComplexField<RealField = f64>>(
    x1: &DVector<T>,
    x2: &DVector<T>,
) -> Result<f64, SpectralError> {
    check_unit(x1)?;
    check_unit(x2)?;
    let z1 = inner(x2, x1).modulus_squared();
    Ok((1.0 - z1).clamp(0.0, 1.0).sqrt())
}

/// Distance between `span{x0, x1}` and `span{x1, x2}`.
pub fn subspace_dist_2d<T: ComplexField<RealField = f64>>(
    x0: &DVector<T>,
    x1: &DVector<T>,
    x2: &DVector<T>,
) -> Result<f64, SpectralError> {
    check_unit(x0)?;
    check_unit(x1)?;
    check_unit(x2)?;
    let z1 = inner(x2, x1);
    let z2 = inner(x1, x0);
    let z3 = inner(x2, x0);
    for overlap in [z1.clone().modulus(), z2.clone().modulus()] {
        if overlap >= PARALLEL_OVERLAP {
            return Err(SpectralError::DegenerateSubspace { overlap });
        }
    }
    let num = (z1.clone() * z2.clone() - z3).modulus_squared();
    let den = (1.0 - z1.modulus_squared()) * (1.0 - z2.modulus_squared());
    Ok((1.0 - num / den).clamp(0.0, 1.0).sqrt())
}

/// `|tr/2 + sqrt((tr/2)^2 - det)|` with the principal complex square root.
pub fn dominant_2x2_magnitude(r: &Matrix2<Complex64>) -> f64 {
    let half_tr = (r[(0, 0)] + r[(1, 1)]) * 0.5;
    let det = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
    (half_tr + (half_tr * half_tr - det).sqrt()).norm()
}

/// Real-input convenience wrapper.
pub fn dominant_2x2_magnitude_real(r: &Matrix2<f64>) -> f64 {
    dominant_2x2_magnitude(&r.map(|x| Complex64::new(x, 0.0)))
}
