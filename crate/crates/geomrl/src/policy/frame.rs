//! The pair of tangent-space anchors used by the geometric action path.

use crate::error::Error;
use crate::manifold::CompositePoint;

/// How the local base moves during an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    /// Independent predictions: the local base stays at the parameterization
    /// base for the whole episode.
    SingleStep,
    /// Consecutive predictions are local to one another: the local base
    /// follows the state reached after each step.
    Trajectory,
}

/// A fixed parameterization base `P` (where the policy's parameters live)
/// and a moving local base `L` (where actions are projected onto the
/// manifold). `P` never changes after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    base_p: CompositePoint,
    base_l: CompositePoint,
}

impl TangentFrame {
    pub fn new(base_p: CompositePoint, base_l: CompositePoint) -> Result<Self, Error> {
        if base_p.kinds() != base_l.kinds() {
            return Err(Error::kind_mismatch(
                "frame bases must share factor kinds".to_string(),
            ));
        }
        Ok(TangentFrame { base_p, base_l })
    }

    /// Both bases at the same point.
    pub fn at(base: CompositePoint) -> Self {
        TangentFrame {
            base_p: base.clone(),
            base_l: base,
        }
    }

    pub fn base_p(&self) -> &CompositePoint {
        &self.base_p
    }

    pub fn base_l(&self) -> &CompositePoint {
        &self.base_l
    }

    /// The frame after the environment reached `new_state`. In trajectory
    /// mode the local base moves there; in single-step mode it stays pinned
    /// to the parameterization base.
    pub fn updated(&self, new_state: &CompositePoint, mode: FrameMode) -> Result<Self, Error> {
        match mode {
            FrameMode::SingleStep => Ok(TangentFrame {
                base_p: self.base_p.clone(),
                base_l: self.base_p.clone(),
            }),
            FrameMode::Trajectory => {
                if new_state.kinds() != self.base_p.kinds() {
                    return Err(Error::kind_mismatch(
                        "frame update state kinds differ from frame kinds".to_string(),
                    ));
                }
                Ok(TangentFrame {
                    base_p: self.base_p.clone(),
                    base_l: new_state.clone(),
                })
            }
        }
    }
}
