//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! All SPD-cone operators reduce to functions of a symmetric spectrum, so
//! the eigensolver's accuracy bounds every geodesic computation. Cyclic
//! Jacobi annihilates off-diagonal entries until convergence; for the small
//! matrices used here it reconstructs `V Λ Vᵀ = M` to a few ulps, including
//! clustered spectra, and is deterministic for a fixed input.

use nalgebra::{DMatrix, DVector};

/// Eigenvalues (unsorted) and orthonormal eigenvectors (columns) of a
/// symmetric matrix.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    debug_assert_eq!(m.ncols(), n);
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    if n <= 1 {
        return (a.diagonal(), v);
    }

    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// `V f(Λ) Vᵀ` for a symmetric input, symmetrized against roundoff.
pub(crate) fn sym_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let out = &vecs * DMatrix::from_diagonal(&vals.map(f)) * vecs.transpose();
    (&out + out.transpose()) * 0.5
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigen(m).0.iter().copied().fold(f64::INFINITY, f64::min)
}
