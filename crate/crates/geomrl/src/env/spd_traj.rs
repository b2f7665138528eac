//! Stiffness/manipulability-profile tracking: the SPD counterpart of the
//! orientation-trajectory benchmark, with per-step reward `exp(-d)` under the
//! affine-invariant distance.

use crate::error::Error;
use crate::manifold::{CompositePoint, Factor, FactorKind, SpdMatrix};
use crate::policy::FrameMode;

use super::{Environment, StepOutcome};

#[derive(Debug, Clone)]
pub struct SpdTrajEnv {
    targets: Vec<SpdMatrix>,
    kinds: Vec<FactorKind>,
    index: usize,
}

impl SpdTrajEnv {
    /// `targets[0]` is the initial state; each later entry is one step's
    /// target.
    pub fn new(targets: Vec<SpdMatrix>) -> Self {
        assert!(targets.len() >= 2, "need an initial state plus targets");
        let dim = targets[0].dim();
        assert!(targets.iter().all(|m| m.dim() == dim));
        SpdTrajEnv {
            kinds: vec![FactorKind::Spd(dim)],
            targets,
            index: 0,
        }
    }

    pub fn targets(&self) -> &[SpdMatrix] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.targets[0].dim()
    }
}

impl Environment for SpdTrajEnv {
    fn id(&self) -> String {
        format!("spd_traj(T={},d={})", self.horizon(), self.dim())
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
        CompositePoint::new(vec![Factor::Spd(self.targets[0].clone())])
    }

    fn step(&mut self, action: &CompositePoint) -> Result<StepOutcome, Error> {
        if action.kinds() != self.kinds {
            return Err(Error::kind_mismatch("spd trajectory action layout".to_string()));
        }
        let w = match &action.factors()[0] {
            Factor::Spd(w) => w,
            _ => unreachable!(),
        };
        let target = &self.targets[self.index + 1];
        let reward = (-target.distance(w)?).exp();
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
                Factor::Spd(w) => total += self.targets[t + 1].distance(w).ok()?,
                _ => return None,
            }
        }
        Some(total / actions.len().min(self.horizon()) as f64)
    }
}
