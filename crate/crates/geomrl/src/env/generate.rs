//! Synthetic target-trajectory generators.
//!
//! Both generators draw a cubic Bézier curve in a fixed tangent space and
//! project it point-wise with the exponential map, giving globally smooth
//! profiles like the manipulation trajectories these benchmarks stand in
//! for. Everything is determined by `(master_seed, env_seed)`.

use nalgebra::{DMatrix, DVector, Vector4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::manifold::{mandel_unvec, mandel_vec, SpdMatrix, SpdTangent, TangentS3, UnitQuaternion};
use crate::seeds;

/// Keeps generated orientation trajectories away from the hemisphere
/// boundary so canonicalization never introduces jumps.
const HEMISPHERE_MARGIN: f64 = 0.1;

fn bezier(u: f64, controls: &[DVector<f64>; 4]) -> DVector<f64> {
    let v = 1.0 - u;
    &controls[0] * (v * v * v)
        + &controls[1] * (3.0 * v * v * u)
        + &controls[2] * (3.0 * v * u * u)
        + &controls[3] * (u * u * u)
}

/// A smooth orientation trajectory of `len` points starting at the identity.
///
/// The path follows a cubic Bézier in the tangent space at the identity, so
/// consecutive increments vary smoothly; the control polygon is scaled until
/// every step distance is at most `amplitude` radians and the whole curve
/// stays on the `w > 0.1` hemisphere.
pub fn gen_quat_traj(
    master_seed: u64,
    env_seed: u64,
    len: usize,
    amplitude: f64,
) -> Vec<UnitQuaternion> {
    assert!(len >= 1);
    assert!((0.0..std::f64::consts::FRAC_PI_2).contains(&amplitude));
    let mut rng = seeds::stream(master_seed, &[seeds::domain::ENV, env_seed]);
    let identity = UnitQuaternion::identity();
    if len == 1 || amplitude == 0.0 {
        return vec![identity; len];
    }

    // Random control points in the tangent at the identity; first one at the
    // origin so the curve starts there exactly.
    let mut controls: [DVector<f64>; 4] = std::array::from_fn(|_| DVector::zeros(4));
    let reach = amplitude * (len - 1) as f64 / 3.0;
    for c in controls.iter_mut().skip(1) {
        let raw = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let t = TangentS3(raw).orthogonalized_against(&identity);
        let n = t.norm().max(1e-12);
        let target_norm = rng.gen_range(0.3..1.0) * reach;
        *c = DVector::from_row_slice((t.0 * (target_norm / n)).as_slice());
    }

    // Scale the control polygon down until the per-step bound and the
    // hemisphere margin hold.
    let mut scale = 1.0;
    for _ in 0..64 {
        let points = sample_quat_bezier(&controls, scale, len, &identity);
        let max_step = points
            .windows(2)
            .map(|p| p[0].distance(&p[1]))
            .fold(0.0f64, f64::max);
        let min_w = points.iter().map(|q| q.w()).fold(f64::INFINITY, f64::min);
        if max_step <= amplitude && min_w > HEMISPHERE_MARGIN {
            return points;
        }
        scale *= 0.8;
    }
    vec![identity; len]
}

fn sample_quat_bezier(
    controls: &[DVector<f64>; 4],
    scale: f64,
    len: usize,
    base: &UnitQuaternion,
) -> Vec<UnitQuaternion> {
    (0..len)
        .map(|k| {
            let u = k as f64 / (len - 1) as f64;
            let coords = bezier(u, controls) * scale;
            let t = TangentS3(Vector4::new(coords[0], coords[1], coords[2], coords[3]));
            base.exp_map(&t)
        })
        .collect()
}

/// A smooth SPD trajectory of `len` points: a cubic Bézier through the
/// tangent-space images of random control points with eigenvalues in
/// `[0.5^spread, 2^spread]`.
///
/// `spread = 0` degenerates every control point to the identity, giving a
/// constant trajectory; `spread = 1` gives the reference range `[0.5, 2]`.
pub fn gen_spd_traj(
    master_seed: u64,
    env_seed: u64,
    len: usize,
    dim: usize,
    spread: f64,
) -> Vec<SpdMatrix> {
    assert!(len >= 1);
    assert!(spread >= 0.0);
    let mut rng = seeds::stream(master_seed, &[seeds::domain::ENV, env_seed]);
    let controls: [DVector<f64>; 4] = std::array::from_fn(|_| {
        let m = random_log_control(&mut rng, dim, spread);
        mandel_vec(&m)
    });
    if len == 1 {
        let m = mandel_unvec(&controls[0]).expect("generated length");
        return vec![SpdMatrix::identity(dim)
            .exp_map(&SpdTangent::new(m).expect("symmetric"))];
    }
    (0..len)
        .map(|k| {
            let u = k as f64 / (len - 1) as f64;
            let coords = bezier(u, &controls);
            let m = mandel_unvec(&coords).expect("generated length");
            SpdMatrix::identity(dim).exp_map(&SpdTangent::new(m).expect("symmetric"))
        })
        .collect()
}

/// A symmetric matrix whose exponential has eigenvalues in
/// `[0.5^spread, 2^spread]`.
fn random_log_control(rng: &mut ChaCha8Rng, dim: usize, spread: f64) -> DMatrix<f64> {
    let raw = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = raw.qr().q();
    let lo = 0.5f64.ln();
    let hi = 2.0f64.ln();
    let eigs = DVector::from_fn(dim, |_, _| spread * rng.gen_range(lo..hi));
    let m = &q * DMatrix::from_diagonal(&eigs) * q.transpose();
    (&m + m.transpose()) * 0.5
}
