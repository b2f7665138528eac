//! Linear-Gaussian policy parameters with parameter-space exploration.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::manifold::{CompositeTangent, FactorKind};

/// Exploration covariance over the flattened parameter matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ExplorationCov {
    /// Independent per-parameter standard deviations.
    Diagonal(DVector<f64>),
    /// Full SPD covariance over all `tangent_dim · feature_dim` parameters.
    Full(DMatrix<f64>),
}

/// Parameters of a linear policy `a = θ·φ(s, t)` with Gaussian exploration
/// applied to `θ` (state-dependent exploration: the induced action noise is
/// `εᵀφ`, which varies with the features).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    theta: DMatrix<f64>,
    sigma: ExplorationCov,
}

impl PolicyParams {
    pub fn new(theta: DMatrix<f64>, sigma: ExplorationCov) -> Result<Self, Error> {
        let n = theta.nrows() * theta.ncols();
        match &sigma {
            ExplorationCov::Diagonal(stds) => {
                if stds.len() != n {
                    return Err(Error::dimension_mismatch(format!(
                        "diagonal exploration has {} entries for {} parameters",
                        stds.len(),
                        n
                    )));
                }
                if stds.iter().any(|s| *s < 0.0 || !s.is_finite()) {
                    return Err(Error::dimension_mismatch(
                        "diagonal exploration stds must be finite and non-negative".to_string(),
                    ));
                }
            }
            ExplorationCov::Full(cov) => {
                if cov.nrows() != n || cov.ncols() != n {
                    return Err(Error::dimension_mismatch(format!(
                        "full exploration covariance is {}x{} for {} parameters",
                        cov.nrows(),
                        cov.ncols(),
                        n
                    )));
                }
                if cov.clone().cholesky().is_none() {
                    return Err(Error::NotPositiveDefinite { min_eig: f64::NAN });
                }
            }
        }
        Ok(PolicyParams { theta, sigma })
    }

    /// Zero parameters with uniform diagonal exploration.
    pub fn zeros(tangent_dim: usize, feature_dim: usize, std: f64) -> Self {
        PolicyParams {
            theta: DMatrix::zeros(tangent_dim, feature_dim),
            sigma: ExplorationCov::Diagonal(DVector::from_element(tangent_dim * feature_dim, std)),
        }
    }

    /// Replaces θ, keeping the exploration covariance.
    pub fn with_theta(&self, theta: DMatrix<f64>) -> Self {
        PolicyParams {
            theta,
            sigma: self.sigma.clone(),
        }
    }

    pub fn theta(&self) -> &DMatrix<f64> {
        &self.theta
    }

    pub fn sigma(&self) -> &ExplorationCov {
        &self.sigma
    }

    pub fn tangent_dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.theta.ncols()
    }

    pub fn n_params(&self) -> usize {
        self.theta.nrows() * self.theta.ncols()
    }

    /// θ flattened column-major, the layout used by flat-vector optimizers.
    pub fn flat_theta(&self) -> DVector<f64> {
        DVector::from_column_slice(self.theta.as_slice())
    }

    pub fn with_flat_theta(&self, flat: &DVector<f64>) -> Result<Self, Error> {
        if flat.len() != self.n_params() {
            return Err(Error::dimension_mismatch(format!(
                "flat parameter vector has {} entries, expected {}",
                flat.len(),
                self.n_params()
            )));
        }
        Ok(self.with_theta(DMatrix::from_column_slice(
            self.theta.nrows(),
            self.theta.ncols(),
            flat.as_slice(),
        )))
    }

    /// The deterministic action `θ·φ` as a flat vector.
    pub fn mean_action(&self, features: &DVector<f64>) -> Result<DVector<f64>, Error> {
        if features.len() != self.feature_dim() {
            return Err(Error::dimension_mismatch(format!(
                "feature vector has {} entries, theta expects {}",
                features.len(),
                self.feature_dim()
            )));
        }
        Ok(&self.theta * features)
    }

    /// Draws a parameter perturbation `ε ~ N(0, Σ)` shaped like θ.
    pub fn sample_noise(&self, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let n = self.n_params();
        let flat: DVector<f64> = match &self.sigma {
            ExplorationCov::Diagonal(stds) => DVector::from_iterator(
                n,
                stds.iter()
                    .map(|s| s * rng.sample::<f64, _>(StandardNormal)),
            ),
            ExplorationCov::Full(cov) => {
                let z = DVector::from_iterator(
                    n,
                    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)),
                );
                let chol = cov
                    .clone()
                    .cholesky()
                    .expect("covariance validated at construction");
                chol.l() * z
            }
        };
        DMatrix::from_column_slice(self.theta.nrows(), self.theta.ncols(), flat.as_slice())
    }

    /// The policy with perturbed parameters `θ + ε`.
    pub fn perturbed(&self, eps: &DMatrix<f64>) -> Self {
        PolicyParams {
            theta: &self.theta + eps,
            sigma: self.sigma.clone(),
        }
    }

    /// Scales the exploration (stds by `factor`, covariance by `factor²`).
    pub fn decay_sigma(&mut self, factor: f64) {
        match &mut self.sigma {
            ExplorationCov::Diagonal(stds) => *stds *= factor,
            ExplorationCov::Full(cov) => *cov *= factor * factor,
        }
    }
}

/// The deterministic tangent action `θ·φ` in the given composite layout.
pub fn policy_mean(
    params: &PolicyParams,
    features: &DVector<f64>,
    kinds: &[FactorKind],
) -> Result<CompositeTangent, Error> {
    CompositeTangent::from_flat(kinds.to_vec(), params.mean_action(features)?)
}

/// One stochastic draw: perturbs θ in parameter space and applies the
/// features. Identical seeds give identical samples.
pub fn policy_sample(
    params: &PolicyParams,
    features: &DVector<f64>,
    kinds: &[FactorKind],
    rng: &mut ChaCha8Rng,
) -> Result<CompositeTangent, Error> {
    let eps = params.sample_noise(rng);
    policy_mean(&params.perturbed(&eps), features, kinds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn kinds() -> Vec<FactorKind> {
        vec![FactorKind::S3]
    }

    #[test]
    fn zero_theta_gives_zero_tangent() {
        let p = PolicyParams::zeros(4, 1, 0.3);
        let phi = DVector::from_element(1, 1.0);
        let t = policy_mean(&p, &phi, &kinds()).unwrap();
        assert_eq!(t.norm(), 0.0);
    }

    #[test]
    fn constant_feature_returns_theta_column() {
        let theta = DMatrix::from_column_slice(4, 1, &[0.1, -0.2, 0.3, 0.4]);
        let p = PolicyParams::new(theta, ExplorationCov::Diagonal(DVector::from_element(4, 0.0)))
            .unwrap();
        let phi = DVector::from_element(1, 1.0);
        let t = policy_mean(&p, &phi, &kinds()).unwrap();
        assert_eq!(t.flat().as_slice(), &[0.1, -0.2, 0.3, 0.4]);
    }

    #[test]
    fn mean_matches_matrix_vector_product() {
        let mut rng = seeds::stream(5, &[99]);
        for _ in 0..20 {
            let theta = DMatrix::from_fn(6, 3, |_, _| rng.gen_range(-1.0..1.0));
            let phi = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let p = PolicyParams::new(
                theta.clone(),
                ExplorationCov::Diagonal(DVector::from_element(18, 0.1)),
            )
            .unwrap();
            let direct = &theta * &phi;
            let via = p.mean_action(&phi).unwrap();
            assert_relative_eq!(via, direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_sigma_sample_equals_mean() {
        let theta = DMatrix::from_column_slice(4, 1, &[0.5, 0.0, -0.5, 0.2]);
        let p = PolicyParams::new(theta, ExplorationCov::Diagonal(DVector::zeros(4))).unwrap();
        let phi = DVector::from_element(1, 1.0);
        let mut rng = seeds::stream(1, &[1]);
        let s = policy_sample(&p, &phi, &kinds(), &mut rng).unwrap();
        let m = policy_mean(&p, &phi, &kinds()).unwrap();
        assert_eq!(s.flat(), m.flat());
    }

    #[test]
    fn identical_seeds_identical_samples() {
        let p = PolicyParams::zeros(4, 2, 0.4);
        let phi = DVector::from_column_slice(&[0.3, 0.7]);
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let s1 = policy_sample(&p, &phi, &kinds(), &mut r1).unwrap();
        let s2 = policy_sample(&p, &phi, &kinds(), &mut r2).unwrap();
        assert_eq!(s1.flat(), s2.flat());
    }

    #[test]
    fn sample_mean_converges_to_policy_mean() {
        // Law of large numbers over 1e5 draws: each coordinate of the sample
        // mean stays within 3σ/√N of the deterministic mean.
        let theta = DMatrix::from_column_slice(4, 1, &[0.2, -0.1, 0.4, 0.0]);
        let std = 0.3;
        let p = PolicyParams::new(
            theta,
            ExplorationCov::Diagonal(DVector::from_element(4, std)),
        )
        .unwrap();
        let phi = DVector::from_element(1, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2025);
        let n = 100_000;
        let mut acc = DVector::zeros(4);
        for _ in 0..n {
            acc += policy_sample(&p, &phi, &kinds(), &mut rng).unwrap().flat();
        }
        acc /= n as f64;
        let mean = p.mean_action(&phi).unwrap();
        let bound = 3.0 * std / (n as f64).sqrt();
        for i in 0..4 {
            assert!(
                (acc[i] - mean[i]).abs() < bound,
                "coordinate {i}: {} vs {} (bound {bound})",
                acc[i],
                mean[i]
            );
        }
    }

    #[test]
    fn full_covariance_sampling_works() {
        let mut cov = DMatrix::identity(4, 4) * 0.04;
        cov[(0, 1)] = 0.01;
        cov[(1, 0)] = 0.01;
        let p = PolicyParams::new(DMatrix::zeros(4, 1), ExplorationCov::Full(cov)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let eps = p.sample_noise(&mut rng);
        assert_eq!(eps.nrows(), 4);
        assert!(eps.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let p = PolicyParams::zeros(4, 2, 0.1);
        let phi = DVector::from_element(3, 1.0);
        assert!(matches!(
            p.mean_action(&phi),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
