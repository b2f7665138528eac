//! Orientation-trajectory tracking.
//!
//! The state is the current orientation; the policy's prediction becomes the
//! next state. Step `t` (0-based) is rewarded by `exp(-d)` against target
//! `t + 1`, so an episode over a target list of length `T + 1` yields `T`
//! rewards and a return in `(0, T]`. The local tangent base follows the
//! state.

use crate::error::Error;
use crate::manifold::{CompositePoint, Factor, FactorKind, UnitQuaternion};
use crate::policy::FrameMode;

use super::{Environment, StepOutcome};

#[derive(Debug, Clone)]
pub struct QuatTrajEnv {
    targets: Vec<UnitQuaternion>,
    kinds: Vec<FactorKind>,
    index: usize,
}

impl QuatTrajEnv {
    /// `targets[0]` is the initial state; each later entry is one step's
    /// target. Needs at least two points.
    pub fn new(targets: Vec<UnitQuaternion>) -> Self {
        assert!(targets.len() >= 2, "need an initial state plus targets");
        QuatTrajEnv {
            kinds: vec![FactorKind::S3],
            targets,
            index: 0,
        }
    }

    pub fn targets(&self) -> &[UnitQuaternion] {
        &self.targets
    }
}

impl Environment for QuatTrajEnv {
    fn id(&self) -> String {
        format!("quat_traj(T={})", self.horizon())
    }

    fn kinds(&self) -> &[FactorKind] {
        &self.kinds
    }

    fn horizon(&self) -> usize {
        self.targets.len() - 1
    }

    fn frame_mode(&self) -> FrameMode {
        FrameMode::Trajectory
    }

    fn reset(&mut self) -> CompositePoint {
        self.index = 0;
        CompositePoint::new(vec![Factor::S3(self.targets[0])])
    }

    fn step(&mut self, action: &CompositePoint) -> Result<StepOutcome, Error> {
        if action.kinds() != self.kinds {
            return Err(Error::kind_mismatch("trajectory action layout".to_string()));
        }
        let q = match &action.factors()[0] {
            Factor::S3(q) => q,
            _ => unreachable!(),
        };
        let target = &self.targets[self.index + 1];
        let reward = (-target.distance(q)).exp();
        self.index += 1;
        Ok(StepOutcome {
            reward,
            done: self.index >= self.horizon(),
            next_state: action.clone(),
        })
    }

    fn tracking_error(&self, actions: &[CompositePoint]) -> Option<f64> {
        if actions.is_empty() {
            return None;
        }
        let mut total = 0.0;
        for (t, action) in actions.iter().enumerate().take(self.horizon()) {
            match &action.factors()[0] {
                Factor::S3(q) => total += self.targets[t + 1].distance(q),
                _ => return None,
            }
        }
        Some(total / actions.len().min(self.horizon()) as f64)
    }
}
