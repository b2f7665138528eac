//! Gaussian log-density on a Riemannian manifold.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::manifold::composite::{gaussian_dim_check, CompositePoint};

/// Log-density of a manifold Gaussian with the given mean and covariance over
/// the flat tangent coordinates at the mean:
///
/// ```text
/// log N(q | mean, Σ) = -½ (d·ln 2π + ln|Σ| + Log_mean(q)ᵀ Σ⁻¹ Log_mean(q))
/// ```
///
/// `d` is the flat tangent dimension of the composite layout. Maximal at
/// `q = mean`.
pub fn riemannian_gaussian_logpdf(
    mean: &CompositePoint,
    cov: &DMatrix<f64>,
    q: &CompositePoint,
) -> Result<f64, Error> {
    let dim = mean.tangent_dim();
    gaussian_dim_check(cov, dim)?;
    let chol = cov.clone().cholesky().ok_or(Error::NotPositiveDefinite {
        min_eig: f64::NAN,
    })?;
    let v = mean.log(q)?.flat().clone();
    let log_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
    let maha = v.dot(&chol.solve(&v));
    Ok(-0.5 * (dim as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + maha))
}
