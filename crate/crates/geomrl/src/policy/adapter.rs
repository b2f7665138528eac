//! Turning flat policy outputs into manifold actions.
//!
//! The geometric path (`grl_map_action`) treats the policy output as a
//! tangent vector at the parameterization base, transports it to the local
//! base, and projects it with the exponential map; the result satisfies the
//! manifold invariants by construction, with no repair step. The baseline
//! paths treat the same numbers as raw coordinates and force them onto the
//! manifold after the fact, which is the approximation the geometric path is
//! measured against.

use nalgebra::DVector;

use crate::error::Error;
use crate::manifold::{
    chol_unvec_flagged, mandel_unvec, mandel_vec, nearest_spd, CompositePoint, CompositeTangent,
    Factor, FactorKind, SpdMatrix, UnitQuaternion,
};
use crate::policy::frame::TangentFrame;

const UNIT_NORM_TOL: f64 = 1e-9;

/// Which action mapping an experiment arm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterMode {
    /// Tangent parameterization + parallel transport + exponential map.
    Grl,
    /// Raw ambient quaternion divided by its norm (sphere factors only).
    Normalize,
    /// Raw factor entries rebuilt as `UᵀU` (SPD factors only).
    Cholesky,
    /// Raw Mandel coordinates projected to the nearest SPD matrix
    /// (SPD factors only).
    Mandel,
}

impl AdapterMode {
    pub fn name(&self) -> &'static str {
        match self {
            AdapterMode::Grl => "grl",
            AdapterMode::Normalize => "normalize",
            AdapterMode::Cholesky => "cholesky",
            AdapterMode::Mandel => "mandel",
        }
    }

    /// Whether this adapter can handle every factor of the given layout.
    /// Euclidean factors are always passed through.
    pub fn supports(&self, kinds: &[FactorKind]) -> bool {
        kinds.iter().all(|k| match k {
            FactorKind::Euclid(_) => true,
            FactorKind::S3 => matches!(self, AdapterMode::Grl | AdapterMode::Normalize),
            FactorKind::Spd(_) => matches!(
                self,
                AdapterMode::Grl | AdapterMode::Cholesky | AdapterMode::Mandel
            ),
        })
    }
}

/// The baseline adapters applicable to a layout, in comparison order.
pub fn applicable_baselines(kinds: &[FactorKind]) -> Vec<AdapterMode> {
    [AdapterMode::Normalize, AdapterMode::Cholesky, AdapterMode::Mandel]
        .into_iter()
        .filter(|m| m.supports(kinds))
        .collect()
}

/// Repair bookkeeping for one action mapping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MapStats {
    /// Invocations of a repair operation (normalization or nearest-SPD).
    pub repair_calls: u64,
    /// Repair invocations that materially changed their input.
    pub repair_changed: u64,
    /// Cholesky diagonal-floor applications (reconstruction guard, not
    /// counted as repair).
    pub floor_events: u64,
}

impl MapStats {
    pub fn absorb(&mut self, other: MapStats) {
        self.repair_calls += other.repair_calls;
        self.repair_changed += other.repair_changed;
        self.floor_events += other.floor_events;
    }
}

/// The geometric action path: orthogonalize sphere segments against the
/// parameterization base, parallel-transport the tangent to the local base,
/// and project it onto the manifold. Returns the manifold action together
/// with the transported local tangent.
pub fn grl_map_action(
    frame: &TangentFrame,
    a_p: &CompositeTangent,
) -> Result<(CompositePoint, CompositeTangent), Error> {
    let base_p = frame.base_p();
    if base_p.kinds() != a_p.kinds() {
        return Err(Error::kind_mismatch(
            "tangent action layout differs from frame layout".to_string(),
        ));
    }
    // Sampled tangents live in flat coordinates; sphere segments must first
    // be made orthogonal to their base to be valid tangent vectors.
    let mut projected = a_p.clone();
    for (i, factor) in base_p.factors().iter().enumerate() {
        if let Factor::S3(q) = factor {
            let seg = projected.s3_segment(i).orthogonalized_against(q);
            projected.set_segment(i, &DVector::from_row_slice(seg.0.as_slice()));
        }
    }
    let a_l = base_p.transport(frame.base_l(), &projected)?;
    let action = frame.base_l().exp(&a_l)?;
    Ok((action, a_l))
}

/// The approximation baselines: reinterpret the flat vector as raw
/// per-factor coordinates and force each factor onto its manifold.
pub fn baseline_map_action(
    mode: AdapterMode,
    raw: &CompositeTangent,
) -> Result<(CompositePoint, MapStats), Error> {
    let kinds = raw.kinds().to_vec();
    if !mode.supports(&kinds) || mode == AdapterMode::Grl {
        return Err(Error::kind_mismatch(format!(
            "adapter {} does not support layout {kinds:?}",
            mode.name()
        )));
    }
    let mut stats = MapStats::default();
    let mut factors = Vec::with_capacity(kinds.len());
    for (i, kind) in kinds.iter().enumerate() {
        let seg = raw.segment(i);
        match kind {
            FactorKind::Euclid(_) => factors.push(Factor::Euclid(seg)),
            FactorKind::S3 => {
                let n = seg.norm();
                stats.repair_calls += 1;
                let q = UnitQuaternion::new(seg[0], seg[1], seg[2], seg[3])?;
                let canonical = q.canonicalized();
                if (n - 1.0).abs() > UNIT_NORM_TOL || canonical != q {
                    stats.repair_changed += 1;
                }
                factors.push(Factor::S3(canonical));
            }
            FactorKind::Spd(_) => match mode {
                AdapterMode::Cholesky => {
                    let (m, floored) = chol_unvec_flagged(&seg)?;
                    if floored {
                        stats.floor_events += 1;
                    }
                    factors.push(Factor::Spd(m));
                }
                AdapterMode::Mandel => {
                    let sym = mandel_unvec(&seg)?;
                    let (m, clamped) = nearest_spd(&sym);
                    stats.repair_calls += 1;
                    if clamped {
                        stats.repair_changed += 1;
                    }
                    factors.push(Factor::Spd(m));
                }
                _ => unreachable!("supports() checked above"),
            },
        }
    }
    Ok((CompositePoint::new(factors), stats))
}

/// Initial policy column for one adapter: the flat vector whose mapped action
/// is the default base point of every factor, so every comparison arm starts
/// from the same prediction.
pub fn initial_theta(mode: AdapterMode, kinds: &[FactorKind]) -> DVector<f64> {
    let dim: usize = kinds.iter().map(FactorKind::tangent_dim).sum();
    let mut flat = DVector::zeros(dim);
    if mode == AdapterMode::Grl {
        // Zero tangent maps to the base point already.
        return flat;
    }
    let mut offset = 0;
    for kind in kinds {
        let len = kind.tangent_dim();
        match (mode, kind) {
            (AdapterMode::Normalize, FactorKind::S3) => flat[offset] = 1.0,
            (AdapterMode::Cholesky, FactorKind::Spd(d)) => {
                // Factor entries of the identity: unit diagonal.
                for k in 0..*d {
                    flat[offset + k] = 1.0;
                }
            }
            (AdapterMode::Mandel, FactorKind::Spd(d)) => {
                let id = mandel_vec(SpdMatrix::identity(*d).matrix());
                flat.rows_mut(offset, len).copy_from(&id);
            }
            _ => {}
        }
        offset += len;
    }
    flat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::FactorKind::{Euclid, Spd, S3};
    use crate::seeds;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn s3_frame_at(base_p: UnitQuaternion, base_l: UnitQuaternion) -> TangentFrame {
        TangentFrame::new(
            CompositePoint::new(vec![Factor::S3(base_p)]),
            CompositePoint::new(vec![Factor::S3(base_l)]),
        )
        .unwrap()
    }

    #[test]
    fn identity_transport_equals_direct_exponential() {
        let mut rng = seeds::stream(0, &[1]);
        for _ in 0..100 {
            let base = CompositePoint::default_bases(&[S3, Spd(3)]);
            let frame = TangentFrame::at(base.clone());
            let flat = DVector::from_fn(base.tangent_dim(), |_, _| rng.gen_range(-0.5..0.5));
            let a_p = CompositeTangent::from_flat(base.kinds(), flat).unwrap();
            let (action, a_l) = grl_map_action(&frame, &a_p).unwrap();

            // Orthogonalize the sphere part the same way, then exponentiate
            // directly at the base.
            let mut proj = a_p.clone();
            if let Factor::S3(q) = &base.factors()[0] {
                let seg = proj.s3_segment(0).orthogonalized_against(q);
                proj.set_segment(0, &DVector::from_row_slice(seg.0.as_slice()));
            }
            let direct = base.exp(&proj).unwrap();
            assert!((a_l.flat() - proj.flat()).norm() < 1e-12);
            match (&action.factors()[0], &direct.factors()[0]) {
                (Factor::S3(a), Factor::S3(b)) => {
                    assert!((a.as_vector() - b.as_vector()).norm() < 1e-12)
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn zero_tangent_lands_on_local_base() {
        let base_l = UnitQuaternion::new(0.6, 0.8, 0.0, 0.0).unwrap();
        let frame = s3_frame_at(UnitQuaternion::identity(), base_l);
        let zero = CompositeTangent::zeros(vec![S3]);
        let (action, _) = grl_map_action(&frame, &zero).unwrap();
        match &action.factors()[0] {
            Factor::S3(q) => assert!((q.as_vector() - base_l.as_vector()).norm() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn transport_preserves_norm_and_exp_distance() {
        let mut rng = seeds::stream(0, &[2]);
        for _ in 0..200 {
            let base_l = loop {
                let v = nalgebra::Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                if let Ok(q) = UnitQuaternion::from_vector(v) {
                    if q.distance(&UnitQuaternion::identity()) < 2.5 {
                        break q;
                    }
                }
            };
            let frame = s3_frame_at(UnitQuaternion::identity(), base_l);
            let flat = DVector::from_fn(4, |_, _| rng.gen_range(-0.4..0.4));
            let a_p = CompositeTangent::from_flat(vec![S3], flat).unwrap();
            let (action, a_l) = grl_map_action(&frame, &a_p).unwrap();

            let expected_norm = a_p
                .s3_segment(0)
                .orthogonalized_against(&UnitQuaternion::identity())
                .norm();
            assert_relative_eq!(a_l.norm(), expected_norm, epsilon = 1e-9);
            match &action.factors()[0] {
                Factor::S3(q) => {
                    assert_relative_eq!(base_l.distance(q), expected_norm, epsilon = 1e-9)
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn grl_outputs_satisfy_invariants_without_repair() {
        let mut rng = seeds::stream(0, &[3]);
        let kinds = vec![S3, Spd(3), Euclid(2)];
        let base = CompositePoint::default_bases(&kinds);
        let frame = TangentFrame::at(base.clone());
        for _ in 0..2000 {
            let flat = DVector::from_fn(base.tangent_dim(), |_, _| rng.gen_range(-1.5..1.5));
            let a_p = CompositeTangent::from_flat(kinds.clone(), flat).unwrap();
            let (action, _) = grl_map_action(&frame, &a_p).unwrap();
            for f in action.factors() {
                match f {
                    Factor::S3(q) => {
                        assert_relative_eq!(q.as_vector().norm(), 1.0, epsilon = 1e-12)
                    }
                    Factor::Spd(m) => assert!(m.min_eigenvalue() > 0.0),
                    Factor::Euclid(_) => {}
                }
            }
        }
    }

    #[test]
    fn normalize_baseline_examples() {
        let raw =
            CompositeTangent::from_flat(vec![S3], DVector::from_row_slice(&[2.0, 0.0, 0.0, 0.0]))
                .unwrap();
        let (action, stats) = baseline_map_action(AdapterMode::Normalize, &raw).unwrap();
        match &action.factors()[0] {
            Factor::S3(q) => {
                assert!((q.as_vector() - UnitQuaternion::identity().as_vector()).norm() < 1e-15)
            }
            _ => unreachable!(),
        }
        assert_eq!(stats.repair_calls, 1);
        assert_eq!(stats.repair_changed, 1);

        let zero = CompositeTangent::zeros(vec![S3]);
        assert!(matches!(
            baseline_map_action(AdapterMode::Normalize, &zero),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn mandel_baseline_identity_passthrough() {
        let raw = CompositeTangent::from_flat(
            vec![Spd(3)],
            DVector::from_row_slice(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]),
        )
        .unwrap();
        let (action, stats) = baseline_map_action(AdapterMode::Mandel, &raw).unwrap();
        match &action.factors()[0] {
            Factor::Spd(m) => {
                assert!((m.matrix() - nalgebra::DMatrix::identity(3, 3)).norm() < 1e-14)
            }
            _ => unreachable!(),
        }
        assert_eq!(stats.repair_calls, 1);
        assert_eq!(stats.repair_changed, 0);
    }

    #[test]
    fn baseline_outputs_satisfy_invariants_on_random_raw() {
        let mut rng = seeds::stream(0, &[4]);
        for _ in 0..2000 {
            let raw = CompositeTangent::from_flat(
                vec![S3],
                DVector::from_fn(4, |_, _| rng.gen_range(-2.0..2.0)),
            )
            .unwrap();
            if raw.norm() < 1e-9 {
                continue;
            }
            let (action, stats) = baseline_map_action(AdapterMode::Normalize, &raw).unwrap();
            match &action.factors()[0] {
                Factor::S3(q) => {
                    assert_relative_eq!(q.as_vector().norm(), 1.0, epsilon = 1e-12);
                    assert!(q.is_canonical());
                }
                _ => unreachable!(),
            }
            assert_eq!(stats.repair_calls, 1);

            let raw = CompositeTangent::from_flat(
                vec![Spd(3)],
                DVector::from_fn(6, |_, _| rng.gen_range(-2.0..2.0)),
            )
            .unwrap();
            for mode in [AdapterMode::Cholesky, AdapterMode::Mandel] {
                let (action, _) = baseline_map_action(mode, &raw).unwrap();
                match &action.factors()[0] {
                    Factor::Spd(m) => {
                        let floor = -1e-12 * (1.0 + m.matrix().norm());
                        assert!(m.min_eigenvalue() > floor);
                    }
                    _ => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn applicability_rules() {
        assert_eq!(
            applicable_baselines(&[S3, S3]),
            vec![AdapterMode::Normalize]
        );
        assert_eq!(
            applicable_baselines(&[Spd(3)]),
            vec![AdapterMode::Cholesky, AdapterMode::Mandel]
        );
        assert!(applicable_baselines(&[S3, Spd(3)]).is_empty());
        assert!(AdapterMode::Grl.supports(&[S3, Spd(3), Euclid(5)]));
    }

    #[test]
    fn initial_theta_maps_to_base_point() {
        let kinds = vec![S3, S3];
        let raw = CompositeTangent::from_flat(
            kinds.clone(),
            initial_theta(AdapterMode::Normalize, &kinds),
        )
        .unwrap();
        let (action, _) = baseline_map_action(AdapterMode::Normalize, &raw).unwrap();
        assert_eq!(action, CompositePoint::default_bases(&kinds));

        let kinds = vec![Spd(3)];
        for mode in [AdapterMode::Cholesky, AdapterMode::Mandel] {
            let raw =
                CompositeTangent::from_flat(kinds.clone(), initial_theta(mode, &kinds)).unwrap();
            let (action, _) = baseline_map_action(mode, &raw).unwrap();
            match &action.factors()[0] {
                Factor::Spd(m) => {
                    assert!((m.matrix() - nalgebra::DMatrix::identity(3, 3)).norm() < 1e-12)
                }
                _ => unreachable!(),
            }
        }
    }
}
