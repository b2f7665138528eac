//! Simulated benchmarks: rotation-fitting and stiffness-fitting problems
//! (one prediction per episode over a product of factors) and orientation /
//! stiffness-profile trajectory tracking.
//!
//! Environment instances are owned by a single rollout at a time; cloning an
//! environment duplicates all target data, so parallel rollouts never share
//! state.

mod generate;
mod quat_wahba;
mod spd_traj;
mod spd_wahba;
mod traj_io;

pub use generate::{gen_quat_traj, gen_spd_traj};
pub use quat_wahba::{wahba_cost, QuatWahbaEnv, RewardKind};
pub use spd_traj::SpdTrajEnv;
pub use spd_wahba::SpdWahbaEnv;
pub use traj_io::{read_quat_traj, read_spd_traj, write_quat_traj, write_spd_traj};

mod quat_traj;
pub use quat_traj::QuatTrajEnv;

use crate::error::Error;
use crate::manifold::{CompositePoint, FactorKind};
use crate::policy::FrameMode;

/// Result of one environment step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub reward: f64,
    pub done: bool,
    pub next_state: CompositePoint,
}

/// A benchmark with a fixed episode horizon and a composite action space.
pub trait Environment: Send {
    /// Stable identifier used in logs and curve metadata.
    fn id(&self) -> String;

    /// Factor layout of the action (and manifold state) space.
    fn kinds(&self) -> &[FactorKind];

    /// Steps per episode.
    fn horizon(&self) -> usize;

    /// Whether the local tangent base follows the state or stays pinned.
    fn frame_mode(&self) -> FrameMode;

    /// Restarts the episode and returns the initial state.
    fn reset(&mut self) -> CompositePoint;

    /// Applies an action; `done` is true after the final step.
    fn step(&mut self, action: &CompositePoint) -> Result<StepOutcome, Error>;

    /// Mean per-step distance between the given action sequence and the
    /// environment's targets, for tracking tasks. `None` elsewhere.
    fn tracking_error(&self, actions: &[CompositePoint]) -> Option<f64> {
        let _ = actions;
        None
    }
}
