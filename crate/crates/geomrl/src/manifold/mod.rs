//! Riemannian primitives for the 3-sphere and the SPD cone, plus composite
//! (product) manifold plumbing and vectorization schemes.
//!
//! All operations are pure functions of their inputs; nothing here holds
//! shared mutable state, so everything is safe to call from any number of
//! threads.

mod composite;
mod gaussian;
mod quaternion;
mod spd;

pub use composite::{CompositePoint, CompositeTangent, Factor, FactorKind};
pub use gaussian::riemannian_gaussian_logpdf;
pub use quaternion::{TangentS3, UnitQuaternion, ANTIPODAL_MARGIN, EXP_NORM_CLAMP};
pub use spd::{
    chol_unvec, chol_unvec_flagged, chol_vec, mandel_unvec, mandel_vec, nearest_spd, sym_expm,
    sym_logm, SpdMatrix, SpdTangent, REPAIR_FLOOR, STRICT_MIN_EIG, SUPPORTED_SPD_DIMS,
};
