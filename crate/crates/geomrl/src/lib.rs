//! Policy search with non-Euclidean actions.
//!
//! This crate learns actions that live on Riemannian manifolds (unit
//! quaternions on the 3-sphere, symmetric positive-definite matrices) by
//! parameterizing policies in a fixed tangent space, parallel-transporting
//! sampled tangent actions to a local tangent space anchored at the current
//! state, and projecting them onto the manifold with the exponential map.
//! Approximation baselines (vector normalization, Cholesky and Mandel
//! parameterizations) are provided for comparison, together with episodic
//! optimizers (reward-weighted policy search and CMA-ES), simulated
//! benchmarks, and a reproducible experiment harness.

pub mod config;
pub mod env;
pub mod error;
mod linalg;
pub mod manifold;
pub mod optim;
pub mod policy;
pub mod runner;
pub mod seeds;
pub mod selftest;

pub use error::Error;
