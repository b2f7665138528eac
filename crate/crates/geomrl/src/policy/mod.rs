//! Tangent-space policies and action adapters.
//!
//! A policy is a linear map from state features to a flat tangent (or raw)
//! action vector, with Gaussian exploration in parameter space. The action
//! adapter turns that flat vector into a manifold point: the geometric path
//! transports it from the fixed parameterization tangent space to the local
//! tangent space and applies the exponential map, while the baseline paths
//! reinterpret it as raw coordinates and repair them onto the manifold
//! (normalization, Cholesky reconstruction, nearest-SPD projection).
//!
//! Policies and frames are value types; exploration requires an owned random
//! stream per rollout, so parallel rollouts never share mutable state.

mod adapter;
mod features;
mod frame;
mod params;

pub use adapter::{
    applicable_baselines, baseline_map_action, grl_map_action, initial_theta, AdapterMode,
    MapStats,
};
pub use features::FeatureMap;
pub use frame::{FrameMode, TangentFrame};
pub use params::{policy_mean, policy_sample, ExplorationCov, PolicyParams};
