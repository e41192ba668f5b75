//! Dense nonsymmetric eigensolver.
//!
//! Eigenvalues come from a Householder reduction to upper Hessenberg form
//! followed by Francis double-shift QR sweeps (eigenvalues only, no Schur
//! vectors). Right and left eigenvectors are then recovered one eigenvalue at a
//! time by complex inverse iteration on `A - mu I` and `A^T - conj(mu) I`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::SpectralError;
use crate::graph::LaplacianMatrix;

/// Residual bound `||A v - lambda v|| <= EIG_RESIDUAL_TOL * ||A||`.
pub const EIG_RESIDUAL_TOL: f64 = 1e-8;

const MAX_QR_SWEEPS_PER_EIGENVALUE: usize = 60;
const INVERSE_ITERATION_STEPS: usize = 4;

#[derive(Debug, Clone)]
pub struct Triplet {
    pub value: Complex64,
    pub right: DVector<Complex64>,
    pub left: DVector<Complex64>,
}

/// Eigen-triplets sorted by nondecreasing `|lambda|`.
#[derive(Debug, Clone)]
pub struct SpectralTriplets {
    triplets: Vec<Triplet>,
}

impl SpectralTriplets {
    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.triplets.iter().map(|t| t.value).collect()
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.triplets.last().map_or(0.0, |t| t.value.norm())
    }
}

/// Frobenius norm, used as the scale for all residual tolerances.
pub(crate) fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Reduces `a` in place to upper Hessenberg form by Householder reflections.
fn hessenberg_in_place(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for col in 0..n - 2 {
        let alpha_norm = (col + 1..n)
            .map(|i| a[(i, col)].powi(2))
            .sum::<f64>()
            .sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let alpha = if a[(col + 1, col)] > 0.0 {
            -alpha_norm
        } else {
            alpha_norm
        };
        let mut v: Vec<f64> = (col + 1..n).map(|i| a[(i, col)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H = I - 2 v v^T / (v^T v), applied from the left and the right.
        for j in 0..n {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * a[(col + 1 + t, j)])
                .sum();
            let f = 2.0 * dot / vnorm2;
            for (t, vt) in v.iter().enumerate() {
                a[(col + 1 + t, j)] -= f * vt;
            }
        }
        for i in 0..n {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * a[(i, col + 1 + t)])
                .sum();
            let f = 2.0 * dot / vnorm2;
            for (t, vt) in v.iter().enumerate() {
                a[(i, col + 1 + t)] -= f * vt;
            }
        }
        for i in col + 2..n {
            a[(i, col)] = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
fn hessenberg_qr_eigenvalues(mut h: DMatrix<f64>) -> Result<Vec<Complex64>, SpectralError> {
    let nn = h.nrows();
    let mut values = Vec::with_capacity(nn);
    if nn == 0 {
        return Ok(values);
    }
    let eps = f64::EPSILON;
    let norm: f64 = (0..nn)
        .flat_map(|i| (i.saturating_sub(1)..nn).map(move |j| (i, j)))
        .map(|(i, j)| h[(i, j)].abs())
        .sum();

    let mut en = nn as isize - 1;
    let mut shift_acc = 0.0;
    let mut its = 0usize;
    let mut total_its = 0usize;

    while en >= 0 {
        let e = en as usize;
        // Find the start of the active unreduced block.
        let mut l = e;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        let mut x = h[(e, e)];
        if l == e {
            values.push(Complex64::new(x + shift_acc, 0.0));
            en -= 1;
            its = 0;
            continue;
        }
        let mut y = h[(e - 1, e - 1)];
        let mut w = h[(e, e - 1)] * h[(e - 1, e)];
        if l == e - 1 {
            let p = (y - x) / 2.0;
            let q = p * p + w;
            let mut z = q.abs().sqrt();
            x += shift_acc;
            if q >= 0.0 {
                z = p + z.copysign(p);
                let first = x + z;
                let second = if z != 0.0 { x - w / z } else { first };
                values.push(Complex64::new(first, 0.0));
                values.push(Complex64::new(second, 0.0));
            } else {
                values.push(Complex64::new(x + p, z));
                values.push(Complex64::new(x + p, -z));
            }
            en -= 2;
            its = 0;
            continue;
        }

        if its >= MAX_QR_SWEEPS_PER_EIGENVALUE {
            return Err(SpectralError::NonConvergence {
                n: nn,
                iterations: total_its,
                residual: h[(e, e - 1)].abs(),
            });
        }
        if its > 0 && its.is_multiple_of(10) {
            // Exceptional shift.
            shift_acc += x;
            for i in 0..=e {
                h[(i, i)] -= x;
            }
            let s = h[(e, e - 1)].abs() + h[(e - 1, e - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;
        total_its += 1;

        // Look for two consecutive small subdiagonal elements.
        let mut m = e - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = h[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
            q = h[(m + 1, m + 1)] - z - rr - ss;
            r = h[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
            let rhs = eps * p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
            if lhs <= rhs {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=e {
            h[(i, i - 2)] = 0.0;
            if i != m + 2 {
                h[(i, i - 3)] = 0.0;
            }
        }

        // Double QR step on rows l..=e, columns m..=e.
        for k in m..e {
            let notlast = k != e - 1;
            let mut scale = 0.0;
            if k != m {
                p = h[(k, k - 1)];
                q = h[(k + 1, k - 1)];
                r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                scale = p.abs() + q.abs() + r.abs();
                if scale == 0.0 {
                    continue;
                }
                p /= scale;
                q /= scale;
                r /= scale;
            }
            let s = (p * p + q * q + r * r).sqrt().copysign(p);
            if k != m {
                h[(k, k - 1)] = -s * scale;
            } else if l != m {
                h[(k, k - 1)] = -h[(k, k - 1)];
            }
            p += s;
            let xr = p / s;
            let yr = q / s;
            let zr = r / s;
            q /= p;
            r /= p;

            for j in k..=e {
                let mut t = h[(k, j)] + q * h[(k + 1, j)];
                if notlast {
                    t += r * h[(k + 2, j)];
                    h[(k + 2, j)] -= t * zr;
                }
                h[(k + 1, j)] -= t * yr;
                h[(k, j)] -= t * xr;
            }
            let upper = e.min(k + 3);
            for i in l..=upper {
                let mut t = xr * h[(i, k)] + yr * h[(i, k + 1)];
                if notlast {
                    t += zr * h[(i, k + 2)];
                    h[(i, k + 2)] -= t * r;
                }
                h[(i, k + 1)] -= t * q;
                h[(i, k)] -= t;
            }
        }
    }
    Ok(values)
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>, SpectralError> {
    assert!(a.is_square(), "eigenvalues of a non-square matrix");
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    hessenberg_qr_eigenvalues(h)
}

fn sort_by_magnitude(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
}

/// Rotates `v` so its largest-modulus entry is real and positive, and
/// normalizes to unit Euclidean norm.
fn normalize_phase(v: &mut DVector<Complex64>) {
    let norm = v.norm();
    if norm > 0.0 {
        *v /= Complex64::new(norm, 0.0);
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        *v *= phase;
    }
}

/// Inverse iteration for an eigenvector of `a` near `mu`.
fn inverse_iteration(a: &DMatrix<Complex64>, mu: Complex64, scale: f64) -> DVector<Complex64> {
    let n = a.nrows();
    // A tiny offset keeps the shifted matrix numerically invertible even
    // when `mu` is exact to machine precision.
    let mut offset = scale.max(f64::MIN_POSITIVE) * 1e-10;
    let mut v = DVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 + 1.0).sqrt() / n as f64, 0.0)
    });
    normalize_phase(&mut v);
    for _attempt in 0..6 {
        let shifted = a - DMatrix::identity(n, n) * (mu + Complex64::new(offset, 0.0));
        let lu = shifted.lu();
        let mut ok = true;
        let mut current = v.clone();
        for _ in 0..INVERSE_ITERATION_STEPS {
            match lu.solve(&current) {
                Some(next) if next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                    current = next;
                    normalize_phase(&mut current);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return current;
        }
        offset *= 1e3;
    }
    v
}

fn residual(a: &DMatrix<Complex64>, v: &DVector<Complex64>, lambda: Complex64) -> f64 {
    (a * v - v * lambda).norm()
}

/// Full eigen-decomposition with right and left eigenvectors.
pub fn eig_dense(a: &DMatrix<f64>) -> Result<SpectralTriplets, SpectralError> {
    assert!(a.is_square(), "eig_dense of a non-square matrix");
    let mut values = eigenvalues(a)?;
    sort_by_magnitude(&mut values);

    let scale = frobenius(a).max(f64::MIN_POSITIVE);
    let ac: DMatrix<Complex64> = a.map(|x| Complex64::new(x, 0.0));
    let at = ac.transpose();
    let tol = EIG_RESIDUAL_TOL * scale;

    let mut triplets = Vec::with_capacity(values.len());
    for lambda in values {
        let right = inverse_iteration(&ac, lambda, scale);
        let left = inverse_iteration(&at, lambda.conj(), scale);
        let r_right = residual(&ac, &right, lambda);
        let r_left = residual(&at, &left, lambda.conj());
        if r_right > tol || r_left > tol {
            return Err(SpectralError::EigenvectorResidual {
                eigenvalue: format!("{lambda}"),
                residual: r_right.max(r_left) / scale,
            });
        }
        triplets.push(Triplet {
            value: lambda,
            right,
            left,
        });
    }
    Ok(SpectralTriplets { triplets })
}

/// Tolerance below which an eigenvalue of `L` counts as zero.
pub(crate) fn zero_tolerance(l: &DMatrix<f64>) -> f64 {
    1e-8 * frobenius(l).max(1.0)
}

/// Unit left null vector of a Laplacian, signed to be elementwise positive.
pub fn left_null_eigvec(l: &LaplacianMatrix) -> Result<DVector<f64>, SpectralError> {
    let lm = l.matrix();
    let n = lm.nrows();
    let mut mags: Vec<f64> = eigenvalues(lm)?.iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    if n >= 2 && mags[1] <= zero_tolerance(lm) {
        return Err(SpectralError::ZeroMultiplicity {
            smallest: mags[0],
            second: mags[1],
        });
    }

    // Columns of L sum to the left-null condition; the rows of L^T are
    // dependent, so one of them is replaced by a normalization row.
    let mut system = lm.transpose();
    for j in 0..n {
        system[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let mut w = system
        .lu()
        .solve(&rhs)
        .ok_or(SpectralError::ZeroMultiplicity {
            smallest: mags[0],
            second: mags.get(1).copied().unwrap_or(0.0),
        })?;
    if w.sum() < 0.0 {
        w = -w;
    }
    let norm = w.norm();
    Ok(w / norm)
}
