//! Covariance matrix adaptation evolution strategy, (μ/μ_w, λ) with rank-1
//! and rank-μ updates and cumulative step-size adaptation, in the
//! maximization convention (higher return is better).
//!
//! Hyperparameters follow the canonical defaults: λ = 4 + ⌊3 ln n⌋,
//! log-rank recombination weights over the best μ = ⌊λ/2⌋ candidates, and
//! the usual cumulation/damping constants.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Error;

/// Canonical population size for dimension `n`.
pub fn default_lambda(n: usize) -> usize {
    4 + (3.0 * (n as f64).ln()).floor() as usize
}

#[derive(Debug, Clone)]
pub struct CmaesState {
    dim: usize,
    lambda: usize,
    mu: usize,
    weights: DVector<f64>,
    mu_eff: f64,
    c_c: f64,
    c_s: f64,
    c_1: f64,
    c_mu: f64,
    damps: f64,
    chi_n: f64,

    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    path_c: DVector<f64>,
    path_s: DVector<f64>,
    generation: u64,

    // Eigen basis of the covariance, refreshed at each ask.
    eig_basis: DMatrix<f64>,
    eig_scale: DVector<f64>,
}

impl CmaesState {
    pub fn new(mean: DVector<f64>, sigma0: f64, lambda: Option<usize>) -> Self {
        let n = mean.len();
        assert!(n >= 1);
        assert!(sigma0 > 0.0);
        let lambda = lambda.unwrap_or_else(|| default_lambda(n));
        assert!(lambda >= 2);
        let mu = lambda / 2;
        let raw: Vec<f64> = (0..mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights = DVector::from_iterator(mu, raw.into_iter().map(|w| w / total));
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let nf = n as f64;
        let c_s = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let damps = 1.0 + 2.0 * (0.0f64).max(((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0) + c_s;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let c_mu = (1.0 - c_1)
            .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

        CmaesState {
            dim: n,
            lambda,
            mu,
            weights,
            mu_eff,
            c_c,
            c_s,
            c_1,
            c_mu,
            damps,
            chi_n,
            mean,
            sigma: sigma0,
            cov: DMatrix::identity(n, n),
            path_c: DVector::zeros(n),
            path_s: DVector::zeros(n),
            generation: 0,
            eig_basis: DMatrix::identity(n, n),
            eig_scale: DVector::from_element(n, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    fn refresh_eigen(&mut self) {
        let (vals, vecs) = crate::linalg::sym_eigen(&self.cov);
        self.eig_scale = vals.map(|v| v.max(1e-30).sqrt());
        self.eig_basis = vecs;
    }

    /// Samples λ candidates from `N(mean, σ²C)`.
    pub fn ask(&mut self, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
        self.refresh_eigen();
        (0..self.lambda)
            .map(|_| {
                let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let scaled = self.eig_scale.component_mul(&z);
                &self.mean + (&self.eig_basis * scaled) * self.sigma
            })
            .collect()
    }

    /// Consumes λ evaluated candidates and updates mean, evolution paths,
    /// step size, and covariance. Higher return ranks better.
    pub fn tell(&mut self, evaluated: &[(DVector<f64>, f64)]) -> Result<(), Error> {
        if evaluated.len() != self.lambda {
            return Err(Error::dimension_mismatch(format!(
                "expected {} evaluated candidates, got {}",
                self.lambda,
                evaluated.len()
            )));
        }
        if evaluated.iter().any(|(_, r)| !r.is_finite()) {
            return Err(Error::NonFiniteReturn);
        }
        let mut order: Vec<usize> = (0..evaluated.len()).collect();
        order.sort_by(|&a, &b| evaluated[b].1.total_cmp(&evaluated[a].1));

        let old_mean = self.mean.clone();
        let mut new_mean = DVector::zeros(self.dim);
        for (rank, &idx) in order.iter().take(self.mu).enumerate() {
            new_mean += &evaluated[idx].0 * self.weights[rank];
        }
        self.mean = new_mean;

        let y_w = (&self.mean - &old_mean) / self.sigma;

        // C^{-1/2} y_w through the eigen basis of the sampling covariance.
        let inv_sqrt_y = {
            let projected = self.eig_basis.transpose() * &y_w;
            let scaled = DVector::from_fn(self.dim, |i, _| projected[i] / self.eig_scale[i]);
            &self.eig_basis * scaled
        };
        self.path_s = &self.path_s * (1.0 - self.c_s)
            + inv_sqrt_y * (self.c_s * (2.0 - self.c_s) * self.mu_eff).sqrt();

        let gen1 = self.generation + 1;
        let expected_decay = 1.0 - (1.0 - self.c_s).powi(2 * gen1 as i32);
        let h_sig = self.path_s.norm() / expected_decay.sqrt()
            < (1.4 + 2.0 / (self.dim as f64 + 1.0)) * self.chi_n;
        let h = if h_sig { 1.0 } else { 0.0 };

        self.path_c = &self.path_c * (1.0 - self.c_c)
            + &y_w * (h * (self.c_c * (2.0 - self.c_c) * self.mu_eff).sqrt());

        let mut rank_mu = DMatrix::zeros(self.dim, self.dim);
        for (rank, &idx) in order.iter().take(self.mu).enumerate() {
            let y_i = (&evaluated[idx].0 - &old_mean) / self.sigma;
            rank_mu += (&y_i * y_i.transpose()) * self.weights[rank];
        }
        let delta_h = (1.0 - h) * self.c_c * (2.0 - self.c_c);
        self.cov = &self.cov * (1.0 - self.c_1 - self.c_mu)
            + (&self.path_c * self.path_c.transpose() + &self.cov * delta_h) * self.c_1
            + rank_mu * self.c_mu;
        self.cov = (&self.cov + self.cov.transpose()) * 0.5;

        self.sigma *=
            ((self.c_s / self.damps) * (self.path_s.norm() / self.chi_n - 1.0)).exp();
        self.generation = gen1;
        Ok(())
    }
}
