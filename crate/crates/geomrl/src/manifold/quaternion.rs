//! Unit quaternions as points on the 3-sphere embedded in R⁴.
//!
//! The tangent space at a point `Q` is the subspace of R⁴ orthogonal to `Q`,
//! and all tangent vectors are stored in ambient coordinates (4 numbers, not
//! a 3-vector in a chart). Geodesic distance is the arc length
//! `arccos(⟨Q₁, Q₂⟩) ∈ [0, π]`. Because unit quaternions double-cover 3-D
//! rotations, `Q` and `-Q` encode the same rotation; [`UnitQuaternion::canonicalized`]
//! picks the `w ≥ 0` hemisphere representative.

use nalgebra::{Vector3, Vector4};

use crate::error::Error;

/// Geodesic distances above `π − ANTIPODAL_MARGIN` are treated as antipodal.
pub const ANTIPODAL_MARGIN: f64 = 1e-6;

/// Tangent norms are clamped to this bound before the exponential map so the
/// result stays inside the injectivity radius.
pub const EXP_NORM_CLAMP: f64 = std::f64::consts::PI - ANTIPODAL_MARGIN;

/// Below this geodesic distance two points are treated as identical.
const SAME_POINT_EPS: f64 = 1e-12;

/// Norms below this cannot be normalized.
const ZERO_NORM_EPS: f64 = 1e-12;

/// A point on the unit 3-sphere, stored as `[w, x, y, z]` with unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Vector4<f64>);

/// A tangent vector at some point of the 3-sphere, in ambient R⁴ coordinates.
///
/// The base point is contextual: operations that consume a tangent state
/// which base it must be orthogonal to.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentS3(pub Vector4<f64>);

impl TangentS3 {
    pub fn zero() -> Self {
        TangentS3(Vector4::zeros())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Removes the component along `base`, leaving a valid tangent at `base`.
    pub fn orthogonalized_against(&self, base: &UnitQuaternion) -> Self {
        let b = base.as_vector();
        TangentS3(self.0 - b * b.dot(&self.0))
    }
}

impl UnitQuaternion {
    /// Normalizes `(w, x, y, z)` onto the sphere. Does not canonicalize the
    /// hemisphere; see [`UnitQuaternion::canonicalized`].
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, Error> {
        Self::from_vector(Vector4::new(w, x, y, z))
    }

    pub fn from_vector(v: Vector4<f64>) -> Result<Self, Error> {
        let n = v.norm();
        if n <= ZERO_NORM_EPS || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        // Already unit to well within the construction tolerance: keep the
        // exact bits, so serialization round-trips are lossless.
        if (n - 1.0).abs() <= 1e-13 {
            return Ok(UnitQuaternion(v));
        }
        Ok(UnitQuaternion(v / n))
    }

    pub fn identity() -> Self {
        UnitQuaternion(Vector4::new(1.0, 0.0, 0.0, 0.0))
    }

    pub fn w(&self) -> f64 {
        self.0[0]
    }
    pub fn x(&self) -> f64 {
        self.0[1]
    }
    pub fn y(&self) -> f64 {
        self.0[2]
    }
    pub fn z(&self) -> f64 {
        self.0[3]
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn dot(&self, other: &UnitQuaternion) -> f64 {
        self.0.dot(&other.0)
    }

    /// Flips to the `w ≥ 0` hemisphere. Ties at `w = 0` are broken by making
    /// the first nonzero of `(x, y, z)` positive. The rotation encoded is
    /// unchanged (double cover).
    pub fn canonicalized(&self) -> Self {
        let v = &self.0;
        let flip = if v[0] != 0.0 {
            v[0] < 0.0
        } else {
            match v.iter().skip(1).find(|c| **c != 0.0) {
                Some(c) => *c < 0.0,
                None => false,
            }
        };
        if flip {
            UnitQuaternion(-v)
        } else {
            *self
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonicalized().0 == self.0
    }

    /// Geodesic distance `arccos(⟨q₁, q₂⟩)`, in radians, in `[0, π]`.
    ///
    /// Evaluated through the chord (`2·asin(‖q₁ − q₂‖/2)` and its antipodal
    /// mirror), which is the same quantity but stays fully accurate where
    /// `arccos` loses precision, near 0 and near π. Identical points report
    /// exactly zero.
    pub fn distance(&self, other: &UnitQuaternion) -> f64 {
        if self.dot(other) >= 0.0 {
            let half_chord = 0.5 * (self.0 - other.0).norm();
            2.0 * half_chord.min(1.0).asin()
        } else {
            let half_chord = 0.5 * (self.0 + other.0).norm();
            std::f64::consts::PI - 2.0 * half_chord.min(1.0).asin()
        }
    }

    /// Maps `target` into the tangent space at `self`.
    ///
    /// Returns the zero vector when the points coincide (distance below
    /// 1e-12) and [`Error::Antipodal`] when the distance exceeds
    /// `π − 1e-6`, where the direction is undefined.
    pub fn log_map(&self, target: &UnitQuaternion) -> Result<TangentS3, Error> {
        let d = self.distance(target);
        if d < SAME_POINT_EPS {
            return Ok(TangentS3::zero());
        }
        if d > std::f64::consts::PI - ANTIPODAL_MARGIN {
            return Err(Error::Antipodal);
        }
        let p = self.dot(target);
        let residual = target.0 - self.0 * p;
        let n = residual.norm();
        Ok(TangentS3(residual * (d / n)))
    }

    /// Projects a tangent vector at `self` onto the sphere along its
    /// geodesic: `cos(‖𝔮‖)·Q + sin(‖𝔮‖)·𝔮/‖𝔮‖`.
    ///
    /// The tangent norm is clamped to `π − 1e-6` first. A zero tangent
    /// returns `self` exactly. The output is not hemisphere-canonicalized, so
    /// `distance(self, result) = ‖𝔮‖` holds for the whole clamped range.
    pub fn exp_map(&self, tangent: &TangentS3) -> UnitQuaternion {
        let n = tangent.norm();
        if n == 0.0 {
            return *self;
        }
        debug_assert!(
            self.0.dot(&tangent.0).abs() <= 1e-8,
            "exp_map tangent must be orthogonal to its base"
        );
        let a = n.min(EXP_NORM_CLAMP);
        let v = self.0 * a.cos() + (tangent.0 / n) * a.sin();
        // v is unit up to roundoff; renormalize to keep the invariant exact.
        UnitQuaternion(v / v.norm())
    }

    /// Parallel-transports `tangent` from the tangent space at `self` to the
    /// tangent space at `to` along the connecting geodesic.
    ///
    /// Identity when `self == to`; fails with [`Error::Antipodal`] when no
    /// unique geodesic exists. Preserves inner products.
    pub fn parallel_transport(
        &self,
        to: &UnitQuaternion,
        tangent: &TangentS3,
    ) -> Result<TangentS3, Error> {
        let u = self.log_map(to)?;
        let n = u.norm();
        if n < SAME_POINT_EPS {
            return Ok(*tangent);
        }
        debug_assert!(
            self.0.dot(&tangent.0).abs() <= 1e-8,
            "transport input must be orthogonal to the source base"
        );
        let dir = u.0 / n;
        let along = dir.dot(&tangent.0);
        let result = (-self.0 * n.sin() + dir * n.cos()) * along + (tangent.0 - dir * along);
        Ok(TangentS3(result))
    }

    /// Applies the rotation encoded by this quaternion to a 3-vector.
    ///
    /// `Q` and `-Q` give identical results.
    pub fn rotate_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        let w = self.w();
        let u = Vector3::new(self.x(), self.y(), self.z());
        let uv = u.cross(v);
        v + (uv * w + u.cross(&uv)) * 2.0
    }
}
