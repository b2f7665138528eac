//! State/time feature maps for linear policies.

use nalgebra::DVector;

use crate::error::Error;
use crate::manifold::CompositePoint;

/// Maps the episode step (and optionally the state) to a feature vector.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMap {
    /// A single constant feature `[1]`; the policy matrix itself is the
    /// action. The natural choice for single-step tasks.
    Constant,
    /// Normalized Gaussian bumps over normalized episode time, the usual
    /// basis for trajectory tasks. Features sum to one at every step.
    TimeRbf { centers: Vec<f64>, width: f64 },
    /// The state's tangent coordinates at the parameterization base.
    StateLinear,
}

impl FeatureMap {
    /// Evenly spaced centers on `[0, 1]` with width equal to the spacing.
    pub fn time_rbf(n_basis: usize) -> Self {
        assert!(n_basis >= 1, "time-rbf needs at least one basis function");
        if n_basis == 1 {
            return FeatureMap::TimeRbf {
                centers: vec![0.5],
                width: 0.5,
            };
        }
        let spacing = 1.0 / (n_basis - 1) as f64;
        FeatureMap::TimeRbf {
            centers: (0..n_basis).map(|i| i as f64 * spacing).collect(),
            width: spacing,
        }
    }

    pub fn dim(&self, tangent_dim: usize) -> usize {
        match self {
            FeatureMap::Constant => 1,
            FeatureMap::TimeRbf { centers, .. } => centers.len(),
            FeatureMap::StateLinear => tangent_dim,
        }
    }

    /// Evaluates the features for step `t` of an episode with the given
    /// horizon.
    pub fn eval(
        &self,
        t: usize,
        horizon: usize,
        state: &CompositePoint,
        base_p: &CompositePoint,
    ) -> Result<DVector<f64>, Error> {
        match self {
            FeatureMap::Constant => Ok(DVector::from_element(1, 1.0)),
            FeatureMap::TimeRbf { centers, width } => {
                let u = if horizon <= 1 {
                    0.0
                } else {
                    t as f64 / (horizon - 1) as f64
                };
                let mut phi = DVector::from_iterator(
                    centers.len(),
                    centers
                        .iter()
                        .map(|c| (-0.5 * ((u - c) / width).powi(2)).exp()),
                );
                let total: f64 = phi.iter().sum();
                phi /= total;
                Ok(phi)
            }
            FeatureMap::StateLinear => Ok(base_p.log(state)?.flat().clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Factor, FactorKind, UnitQuaternion};
    use approx::assert_relative_eq;

    fn dummy_state() -> CompositePoint {
        CompositePoint::new(vec![Factor::S3(UnitQuaternion::identity())])
    }

    #[test]
    fn constant_feature_is_one() {
        let phi = FeatureMap::Constant
            .eval(0, 1, &dummy_state(), &dummy_state())
            .unwrap();
        assert_eq!(phi.len(), 1);
        assert_eq!(phi[0], 1.0);
    }

    #[test]
    fn time_rbf_normalized_at_every_step() {
        let f = FeatureMap::time_rbf(10);
        for t in 0..50 {
            let phi = f.eval(t, 50, &dummy_state(), &dummy_state()).unwrap();
            assert_eq!(phi.len(), 10);
            let total: f64 = phi.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            assert!(phi.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn time_rbf_peaks_track_time() {
        let f = FeatureMap::time_rbf(5);
        let first = f.eval(0, 50, &dummy_state(), &dummy_state()).unwrap();
        let last = f.eval(49, 50, &dummy_state(), &dummy_state()).unwrap();
        assert_eq!(first.imax(), 0);
        assert_eq!(last.imax(), 4);
    }

    #[test]
    fn state_linear_returns_log_coordinates() {
        let base = CompositePoint::default_bases(&[FactorKind::S3]);
        let state = CompositePoint::new(vec![Factor::S3(
            UnitQuaternion::new(0.0, 1.0, 0.0, 0.0).unwrap(),
        )]);
        let phi = FeatureMap::StateLinear.eval(0, 1, &state, &base).unwrap();
        assert_eq!(phi.len(), 4);
        assert_relative_eq!(phi[1], std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }
}
