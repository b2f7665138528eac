//! Symmetric positive-definite matrices under the affine-invariant metric.
//!
//! Points are `d×d` SPD matrices with `d ∈ {2, 3, 6}`; tangent vectors at any
//! point are symmetric matrices. The geodesic operators are
//!
//! ```text
//! Exp_Σ(𝔴) = Σ^{1/2} expm(Σ^{-1/2} 𝔴 Σ^{-1/2}) Σ^{1/2}
//! Log_Σ(W) = Σ^{1/2} logm(Σ^{-1/2} W Σ^{-1/2}) Σ^{1/2}
//! Γ_{Σ₁→Σ₂}(𝔴) = Σ₂^{1/2} Σ₁^{-1/2} 𝔴 Σ₁^{-1/2} Σ₂^{1/2}
//! d(Σ, W)  = ‖logm(Σ^{-1/2} W Σ^{-1/2})‖_F
//! ```
//!
//! with `expm`/`logm` computed by symmetric eigendecomposition. The cone has
//! no cut locus, so Exp/Log are global inverses.
//!
//! Two vectorizations are provided: Mandel (isometric, √2-scaled
//! off-diagonals) and Cholesky (upper-triangular factor entries, always
//! reconstructing an SPD matrix).

use nalgebra::{DMatrix, DVector};

use crate::error::Error;

/// Matrix sizes accepted for SPD points.
pub const SUPPORTED_SPD_DIMS: [usize; 3] = [2, 3, 6];

/// Eigenvalues below this make `sym_logm` (and the maps built on it) fail.
pub const STRICT_MIN_EIG: f64 = 1e-12;

/// Eigenvalue floor used by the repairing operations (`nearest_spd`,
/// `chol_unvec`'s diagonal floor).
pub const REPAIR_FLOOR: f64 = 1e-8;

const SYM_TOL: f64 = 1e-10;

/// Spectrum bound for the whitened exponent in [`SpdMatrix::exp_map`].
/// Keeps outputs representable in f64; only degenerate exploration ever
/// reaches it, and the resulting point still scores a finite (enormous)
/// distance so optimizers steer away instead of crashing.
const EXP_SPECTRUM_CLAMP: f64 = 150.0;

/// A symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix(DMatrix<f64>);

/// A symmetric matrix, viewed as a tangent vector somewhere on the SPD cone.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdTangent(DMatrix<f64>);

fn check_square_supported(m: &DMatrix<f64>) -> Result<usize, Error> {
    let d = m.nrows();
    if m.ncols() != d || !SUPPORTED_SPD_DIMS.contains(&d) {
        return Err(Error::dimension_mismatch(format!(
            "expected square matrix with side in {:?}, got {}x{}",
            SUPPORTED_SPD_DIMS,
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(d)
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).norm()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn eigen_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    crate::linalg::sym_apply(m, f)
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    crate::linalg::min_eigenvalue(m)
}

/// Matrix exponential of a symmetric matrix.
pub fn sym_expm(s: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert!(asymmetry(s) <= SYM_TOL * (1.0 + s.norm()));
    eigen_apply(s, f64::exp)
}

/// Matrix logarithm of an SPD matrix. Fails when any eigenvalue is below
/// 1e-12.
pub fn sym_logm(p: &DMatrix<f64>) -> Result<DMatrix<f64>, Error> {
    let (vals, vecs) = crate::linalg::sym_eigen(p);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig <= STRICT_MIN_EIG {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let out = &vecs * DMatrix::from_diagonal(&vals.map(f64::ln)) * vecs.transpose();
    Ok(symmetrize(&out))
}

impl SpdTangent {
    /// Wraps a symmetric matrix (asymmetry beyond 1e-10 is rejected).
    pub fn new(m: DMatrix<f64>) -> Result<Self, Error> {
        check_square_supported(&m)?;
        let a = asymmetry(&m);
        if a > SYM_TOL * (1.0 + m.norm()) {
            return Err(Error::dimension_mismatch(format!(
                "tangent matrix is not symmetric (asymmetry {a:.3e})"
            )));
        }
        Ok(SpdTangent(symmetrize(&m)))
    }

    pub fn zeros(d: usize) -> Self {
        SpdTangent(DMatrix::zeros(d, d))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }
}

impl SpdMatrix {
    /// Validates symmetry (1e-10) and strict positive definiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self, Error> {
        check_square_supported(&m)?;
        let a = asymmetry(&m);
        if a > SYM_TOL * (1.0 + m.norm()) {
            return Err(Error::dimension_mismatch(format!(
                "matrix is not symmetric (asymmetry {a:.3e})"
            )));
        }
        let sym = symmetrize(&m);
        let min_eig = min_eigenvalue(&sym);
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        Ok(SpdMatrix(sym))
    }

    pub fn identity(d: usize) -> Self {
        SpdMatrix(DMatrix::identity(d, d))
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self, Error> {
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(values)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn sqrt_pair(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let (vals, vecs) = crate::linalg::sym_eigen(&self.0);
        let sqrt = DMatrix::from_diagonal(&vals.map(|v| v.max(0.0).sqrt()));
        let inv_sqrt = DMatrix::from_diagonal(&vals.map(|v| 1.0 / v.max(1e-300).sqrt()));
        let vt = vecs.transpose();
        (
            symmetrize(&(&vecs * sqrt * &vt)),
            symmetrize(&(&vecs * inv_sqrt * &vt)),
        )
    }

    /// Geodesic exponential: projects a tangent at `self` onto the cone.
    ///
    /// The whitened exponent's eigenvalues are clamped to ±150 so the result
    /// stays finite for arbitrarily large tangents (the cone has no
    /// injectivity bound, but f64 does).
    pub fn exp_map(&self, tangent: &SpdTangent) -> SpdMatrix {
        debug_assert_eq!(self.dim(), tangent.dim());
        let (sqrt, inv_sqrt) = self.sqrt_pair();
        let whitened = symmetrize(&(&inv_sqrt * tangent.matrix() * &inv_sqrt));
        let inner = eigen_apply(&whitened, |v| {
            v.clamp(-EXP_SPECTRUM_CLAMP, EXP_SPECTRUM_CLAMP).exp()
        });
        SpdMatrix(symmetrize(&(&sqrt * inner * &sqrt)))
    }

    /// Geodesic logarithm: maps `target` into the tangent space at `self`.
    pub fn log_map(&self, target: &SpdMatrix) -> Result<SpdTangent, Error> {
        debug_assert_eq!(self.dim(), target.dim());
        let (sqrt, inv_sqrt) = self.sqrt_pair();
        let inner = sym_logm(&symmetrize(&(&inv_sqrt * target.matrix() * &inv_sqrt)))?;
        Ok(SpdTangent(symmetrize(&(&sqrt * inner * &sqrt))))
    }

    /// Parallel transport of `tangent` from `self` to `to` along the
    /// connecting geodesic; preserves the affine-invariant inner product
    /// `⟨a, b⟩_Σ = tr(Σ⁻¹ a Σ⁻¹ b)`.
    pub fn parallel_transport(&self, to: &SpdMatrix, tangent: &SpdTangent) -> SpdTangent {
        debug_assert_eq!(self.dim(), to.dim());
        let (_, from_inv_sqrt) = self.sqrt_pair();
        let (to_sqrt, _) = to.sqrt_pair();
        let e = &to_sqrt * &from_inv_sqrt;
        SpdTangent(symmetrize(&(&e * tangent.matrix() * e.transpose())))
    }

    /// Affine-invariant distance `‖logm(Σ^{-1/2} W Σ^{-1/2})‖_F`.
    pub fn distance(&self, other: &SpdMatrix) -> Result<f64, Error> {
        let (_, inv_sqrt) = self.sqrt_pair();
        let inner = sym_logm(&symmetrize(&(&inv_sqrt * other.matrix() * &inv_sqrt)))?;
        Ok(inner.norm())
    }

    /// Inner product of two tangents at this base point,
    /// `tr(Σ⁻¹ a Σ⁻¹ b)`.
    pub fn tangent_inner(&self, a: &SpdTangent, b: &SpdTangent) -> f64 {
        let (_, inv_sqrt) = self.sqrt_pair();
        let inv = &inv_sqrt * &inv_sqrt;
        (&inv * a.matrix() * &inv * b.matrix()).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }
}

/// Frozen ordering of the `d(d+1)/2` independent entries of a symmetric
/// matrix: diagonal entries in index order, then the strict upper triangle in
/// reverse column-major order. For `d = 3` this gives
/// `(0,0) (1,1) (2,2) (1,2) (0,2) (0,1)`.
fn sym_entry_order(d: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = (0..d).map(|i| (i, i)).collect();
    let mut off: Vec<(usize, usize)> = Vec::with_capacity(d * (d - 1) / 2);
    for j in 1..d {
        for i in 0..j {
            off.push((i, j));
        }
    }
    off.reverse();
    order.extend(off);
    order
}

fn dim_for_vec_len(len: usize) -> Result<usize, Error> {
    for d in SUPPORTED_SPD_DIMS {
        if d * (d + 1) / 2 == len {
            return Ok(d);
        }
    }
    Err(Error::BadLength {
        expected: SUPPORTED_SPD_DIMS[0] * (SUPPORTED_SPD_DIMS[0] + 1) / 2,
        got: len,
    })
}

/// Mandel vectorization of a symmetric matrix: diagonal entries followed by
/// √2-scaled off-diagonals, so the Euclidean norm of the vector equals the
/// Frobenius norm of the matrix.
pub fn mandel_vec(s: &DMatrix<f64>) -> DVector<f64> {
    let d = s.nrows();
    debug_assert_eq!(s.ncols(), d);
    let order = sym_entry_order(d);
    DVector::from_iterator(
        order.len(),
        order.into_iter().map(|(i, j)| {
            if i == j {
                s[(i, i)]
            } else {
                std::f64::consts::SQRT_2 * s[(i, j)]
            }
        }),
    )
}

/// Inverse of [`mandel_vec`]. The length must be `d(d+1)/2` for a supported
/// `d`.
pub fn mandel_unvec(v: &DVector<f64>) -> Result<DMatrix<f64>, Error> {
    let d = dim_for_vec_len(v.len())?;
    let mut m = DMatrix::zeros(d, d);
    for (k, (i, j)) in sym_entry_order(d).into_iter().enumerate() {
        if i == j {
            m[(i, i)] = v[k];
        } else {
            let x = v[k] / std::f64::consts::SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    Ok(m)
}

/// Vectorizes the upper-triangular Cholesky-style factor `U` of `p = UᵀU`
/// using the same entry ordering as [`mandel_vec`] (no scaling).
pub fn chol_vec(p: &SpdMatrix) -> DVector<f64> {
    let chol = p
        .matrix()
        .clone()
        .cholesky()
        .expect("SpdMatrix is positive definite by construction");
    let u = chol.l().transpose();
    let order = sym_entry_order(p.dim());
    DVector::from_iterator(order.len(), order.into_iter().map(|(i, j)| u[(i, j)]))
}

/// Rebuilds an SPD matrix from factor entries as `UᵀU`, flooring the factor
/// diagonal at 1e-8 so the result is positive definite for any real input.
/// The boolean reports whether the floor was applied.
///
/// Positive definiteness holds by construction (the factor is nonsingular),
/// but a floored factor with large off-diagonals can be numerically
/// rank-deficient; strict operations on such outputs (`log_map`, `distance`)
/// then fail with `NotPositiveDefinite`, which is the intended strictness.
pub fn chol_unvec_flagged(v: &DVector<f64>) -> Result<(SpdMatrix, bool), Error> {
    let d = dim_for_vec_len(v.len())?;
    let mut u = DMatrix::zeros(d, d);
    let mut floored = false;
    for (k, (i, j)) in sym_entry_order(d).into_iter().enumerate() {
        if i == j {
            if v[k] < REPAIR_FLOOR {
                floored = true;
                u[(i, i)] = REPAIR_FLOOR;
            } else {
                u[(i, i)] = v[k];
            }
        } else {
            u[(i, j)] = v[k];
        }
    }
    let m = symmetrize(&(u.transpose() * &u));
    Ok((SpdMatrix(m), floored))
}

/// See [`chol_unvec_flagged`].
pub fn chol_unvec(v: &DVector<f64>) -> Result<SpdMatrix, Error> {
    chol_unvec_flagged(v).map(|(m, _)| m)
}

/// Projects a symmetric matrix onto the SPD cone by clamping eigenvalues
/// below 1e-8 up to 1e-8. Inputs that are already safely positive definite
/// are returned unchanged. The boolean reports whether clamping occurred.
pub fn nearest_spd(s: &DMatrix<f64>) -> (SpdMatrix, bool) {
    let sym = symmetrize(s);
    let (vals, vecs) = crate::linalg::sym_eigen(&sym);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig >= REPAIR_FLOOR {
        return (SpdMatrix(sym), false);
    }
    let diag = DMatrix::from_diagonal(&vals.map(|v| v.max(REPAIR_FLOOR)));
    let out = symmetrize(&(&vecs * diag * vecs.transpose()));
    (SpdMatrix(out), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
        let raw = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-scale..scale));
        (raw.clone() + raw.transpose()) * 0.5
    }

    pub(crate) fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> SpdMatrix {
        // Random rotation basis with eigenvalues in a well-conditioned range.
        let raw = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        let q = raw.qr().q();
        let eigs = DVector::from_fn(d, |_, _| rng.gen_range(0.2..4.0));
        SpdMatrix::new(&q * DMatrix::from_diagonal(&eigs) * q.transpose()).unwrap()
    }

    #[test]
    fn sym_expm_of_zero_is_identity() {
        let out = sym_expm(&DMatrix::zeros(3, 3));
        assert_relative_eq!(out, DMatrix::identity(3, 3), epsilon = 1e-14);
    }

    #[test]
    fn sym_expm_diagonal_matches_scalar_exp() {
        let s = DMatrix::from_diagonal(&DVector::from_row_slice(&[2f64.ln(), 3f64.ln()]));
        let out = sym_expm(&s);
        assert_relative_eq!(out[(0, 0)], 2.0, epsilon = 1e-12);
        assert_relative_eq!(out[(1, 1)], 3.0, epsilon = 1e-12);
        assert_relative_eq!(out[(0, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sym_logm_rejects_indefinite() {
        let s = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -0.5]));
        assert!(matches!(
            sym_logm(&s),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn expm_logm_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &d in &SUPPORTED_SPD_DIMS {
            for _ in 0..200 {
                let s = random_symmetric(&mut rng, d, 2.0);
                let back = sym_logm(&sym_expm(&s)).unwrap();
                assert!((back - &s).norm() < 1e-9, "round trip failed for d={d}");
            }
        }
    }

    #[test]
    fn exp_map_zero_tangent_is_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_spd(&mut rng, 3);
        let out = p.exp_map(&SpdTangent::zeros(3));
        assert!((out.matrix() - p.matrix()).norm() < 1e-12);
    }

    #[test]
    fn exp_map_at_identity_is_expm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_symmetric(&mut rng, 3, 1.0);
        let out = SpdMatrix::identity(3).exp_map(&SpdTangent::new(s.clone()).unwrap());
        assert!((out.matrix() - sym_expm(&s)).norm() < 1e-10);
    }

    #[test]
    fn exp_map_diagonal_closed_form() {
        // Base diag(4, 1), tangent diag(4 ln 2, 0):
        // Σ^{-1/2} 𝔴 Σ^{-1/2} = diag(ln 2, 0), expm = diag(2, 1),
        // Σ^{1/2} diag(2, 1) Σ^{1/2} = diag(8, 1).
        let base = SpdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let t = SpdTangent::new(DMatrix::from_diagonal(&DVector::from_row_slice(&[
            4.0 * 2f64.ln(),
            0.0,
        ])))
        .unwrap();
        let out = base.exp_map(&t);
        assert_relative_eq!(out.matrix()[(0, 0)], 8.0, epsilon = 1e-10);
        assert_relative_eq!(out.matrix()[(1, 1)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn log_map_of_base_is_zero_and_identity_reduces_to_logm() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_spd(&mut rng, 3);
        assert!(p.log_map(&p).unwrap().frobenius_norm() < 1e-10);

        let w = random_spd(&mut rng, 3);
        let via_map = SpdMatrix::identity(3).log_map(&w).unwrap();
        let direct = sym_logm(w.matrix()).unwrap();
        assert!((via_map.matrix() - direct).norm() < 1e-10);
    }

    #[test]
    fn exp_log_round_trip_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &d in &[2usize, 3, 6] {
            for _ in 0..200 {
                let a = random_spd(&mut rng, d);
                let b = random_spd(&mut rng, d);
                let t = a.log_map(&b).unwrap();
                let back = a.exp_map(&t);
                assert!(
                    (back.matrix() - b.matrix()).norm() < 1e-8,
                    "exp∘log failed for d={d}"
                );
            }
        }
    }

    #[test]
    fn transport_identity_and_from_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = random_spd(&mut rng, 3);
        let t = SpdTangent::new(random_symmetric(&mut rng, 3, 1.0)).unwrap();
        let same = p.parallel_transport(&p, &t);
        assert!((same.matrix() - t.matrix()).norm() < 1e-9);

        // From the identity the transport is W^{1/2} t W^{1/2}.
        let w = random_spd(&mut rng, 3);
        let (w_sqrt, _) = w.sqrt_pair();
        let out = SpdMatrix::identity(3).parallel_transport(&w, &t);
        let expected = &w_sqrt * t.matrix() * &w_sqrt;
        assert!((out.matrix() - expected).norm() < 1e-9);
    }

    #[test]
    fn transport_preserves_affine_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let a = random_spd(&mut rng, 3);
            let b = random_spd(&mut rng, 3);
            let t1 = SpdTangent::new(random_symmetric(&mut rng, 3, 1.0)).unwrap();
            let t2 = SpdTangent::new(random_symmetric(&mut rng, 3, 1.0)).unwrap();
            let u1 = a.parallel_transport(&b, &t1);
            let u2 = a.parallel_transport(&b, &t2);
            let before = a.tangent_inner(&t1, &t2);
            let after = b.tangent_inner(&u1, &u2);
            assert_relative_eq!(before, after, epsilon = 1e-8, max_relative = 1e-8);
        }
    }

    #[test]
    fn distance_examples() {
        let i2 = SpdMatrix::identity(2);
        assert!(i2.distance(&i2).unwrap() < 1e-12);
        let e = SpdMatrix::from_diagonal(&[std::f64::consts::E, 1.0]).unwrap();
        assert_relative_eq!(i2.distance(&e).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_is_affine_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = random_spd(&mut rng, 3);
            let b = random_spd(&mut rng, 3);
            let g = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0f64..1.0));
            if g.determinant().abs() < 0.1 {
                continue;
            }
            let ga = SpdMatrix::new(symmetrize(&(&g * a.matrix() * g.transpose()))).unwrap();
            let gb = SpdMatrix::new(symmetrize(&(&g * b.matrix() * g.transpose()))).unwrap();
            assert_relative_eq!(
                a.distance(&b).unwrap(),
                ga.distance(&gb).unwrap(),
                epsilon = 1e-8,
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn mandel_matches_frozen_3x3_layout() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 6.0, 5.0, /**/ 6.0, 2.0, 4.0, /**/ 5.0, 4.0, 3.0],
        );
        let v = mandel_vec(&m);
        let r2 = std::f64::consts::SQRT_2;
        let expected = [1.0, 2.0, 3.0, 4.0 * r2, 5.0 * r2, 6.0 * r2];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(v[k], *e, epsilon = 1e-14);
        }
        assert_relative_eq!(
            mandel_vec(&DMatrix::identity(3, 3)),
            DVector::from_row_slice(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
            epsilon = 1e-15
        );
    }

    #[test]
    fn mandel_round_trip_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for &d in &SUPPORTED_SPD_DIMS {
            for _ in 0..200 {
                let s = random_symmetric(&mut rng, d, 3.0);
                let v = mandel_vec(&s);
                assert_relative_eq!(v.norm(), s.norm(), epsilon = 1e-12);
                let back = mandel_unvec(&v).unwrap();
                assert!((back - s).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn mandel_unvec_rejects_bad_length() {
        assert!(matches!(
            mandel_unvec(&DVector::zeros(5)),
            Err(Error::BadLength { .. })
        ));
    }

    #[test]
    fn chol_vec_examples() {
        let v = chol_vec(&SpdMatrix::identity(3));
        assert_relative_eq!(
            v,
            DVector::from_row_slice(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
            epsilon = 1e-14
        );
        let v = chol_vec(&SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap());
        assert_relative_eq!(v, DVector::from_row_slice(&[2.0, 3.0, 0.0]), epsilon = 1e-12);
    }

    #[test]
    fn chol_round_trip_and_zero_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let p = random_spd(&mut rng, 3);
            let (back, floored) = chol_unvec_flagged(&chol_vec(&p)).unwrap();
            assert!(!floored);
            assert!((back.matrix() - p.matrix()).norm() < 1e-9);
        }
        let (zero, floored) = chol_unvec_flagged(&DVector::zeros(6)).unwrap();
        assert!(floored);
        let expected = DMatrix::identity(3, 3) * REPAIR_FLOOR * REPAIR_FLOOR;
        assert!((zero.matrix() - expected).norm() < 1e-20);
    }

    #[test]
    fn chol_unvec_always_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let v = DVector::from_fn(6, |_, _| rng.gen_range(-2.0..2.0));
            let (m, _) = chol_unvec_flagged(&v).unwrap();
            // Positive definite by construction; the computed spectrum may sit
            // at the eigensolver's noise floor when the factor is floored.
            assert!(asymmetry(m.matrix()) < 1e-12);
            assert!(m.min_eigenvalue() > -1e-12 * (1.0 + m.matrix().norm()));
            assert!(m.matrix().clone().cholesky().is_some() || m.min_eigenvalue() < 1e-10);
        }
    }

    #[test]
    fn nearest_spd_examples() {
        let already = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 2.0]));
        let (out, clamped) = nearest_spd(&already);
        assert!(!clamped);
        assert_eq!(out.matrix(), &already);

        let indefinite = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -3.0]));
        let (out, clamped) = nearest_spd(&indefinite);
        assert!(clamped);
        assert_relative_eq!(out.matrix()[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(out.matrix()[(1, 1)], REPAIR_FLOOR, epsilon = 1e-20);
    }

    #[test]
    fn nearest_spd_is_closest_eigenvalue_clamp() {
        // Among candidates that replace the spectrum with any values ≥ the
        // floor, max(λ, floor) minimizes the Frobenius distance.
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..100 {
            let s = random_symmetric(&mut rng, 3, 2.0);
            let (proj, _) = nearest_spd(&s);
            let best = (proj.matrix() - &s).norm();
            let eig = s.clone().symmetric_eigen();
            for _ in 0..20 {
                let cand = DVector::from_fn(3, |i, _| {
                    (eig.eigenvalues[i] + rng.gen_range(-1.0..1.0)).max(REPAIR_FLOOR)
                });
                let m = &eig.eigenvectors
                    * DMatrix::from_diagonal(&cand)
                    * eig.eigenvectors.transpose();
                assert!((m - &s).norm() + 1e-12 >= best);
            }
        }
    }
}
