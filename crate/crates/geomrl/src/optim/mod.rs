//! Episodic policy improvement and the rollout loop tying policy, adapter,
//! and environment together.
//!
//! Within one optimizer step the candidate rollouts are independent (each
//! owns its environment and random stream); optimizer state updates are
//! strictly sequential. Runs for different experiment seeds are entirely
//! independent.

mod cmaes;
mod curve;
mod episode;
mod power;
mod train;

pub use cmaes::{default_lambda, CmaesState};
pub use curve::{CurveRecord, LearningCurve, RepairTotals, SeedOutcome, TrainOutcome};
pub use episode::{run_episode, NoiseMode, Rollout, StepRecord};
pub use power::PowerState;
pub use train::{train, train_seed, AlgorithmSpec, TrainSetup};
