//! Learning-curve records and per-run summaries.

use crate::optim::episode::Rollout;
use crate::policy::PolicyParams;

/// One CSV row: a training rollout, an evaluation point, or both.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub seed: u64,
    pub rollout_index: u64,
    /// Return of the training rollout with this index; absent for the
    /// initial evaluation row (index 0).
    pub train_return: Option<f64>,
    /// Noise-free evaluation return; present every evaluation interval.
    pub eval_return: Option<f64>,
}

/// Aggregated repair bookkeeping across every mapped action of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RepairTotals {
    /// Mapped actions (environment steps).
    pub actions: u64,
    /// Actions whose mapping invoked a repair operation at least once.
    pub actions_repaired: u64,
    /// Total repair invocations (normalization, nearest-SPD).
    pub repair_calls: u64,
    /// Repair invocations that materially changed their input.
    pub repair_changed: u64,
    /// Cholesky diagonal-floor applications.
    pub floor_events: u64,
}

impl RepairTotals {
    pub fn absorb(&mut self, rollout: &Rollout) {
        self.actions += rollout.steps.len() as u64;
        self.actions_repaired += rollout.repaired_steps;
        self.repair_calls += rollout.repair.repair_calls;
        self.repair_changed += rollout.repair.repair_changed;
        self.floor_events += rollout.repair.floor_events;
    }

    pub fn repaired_fraction(&self) -> f64 {
        if self.actions == 0 {
            0.0
        } else {
            self.actions_repaired as f64 / self.actions as f64
        }
    }

    pub fn merge(&mut self, other: &RepairTotals) {
        self.actions += other.actions;
        self.actions_repaired += other.actions_repaired;
        self.repair_calls += other.repair_calls;
        self.repair_changed += other.repair_changed;
        self.floor_events += other.floor_events;
    }
}

/// Everything produced by training one seed.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub records: Vec<CurveRecord>,
    pub final_params: PolicyParams,
    pub repair: RepairTotals,
    pub initial_eval: f64,
    pub final_eval: f64,
    /// Mean per-step tracking error of the final evaluation episode
    /// (trajectory environments only).
    pub tracking_error: Option<f64>,
}

/// The harness's primary output: per-rollout records across all seeds plus
/// run metadata.
#[derive(Debug, Clone)]
pub struct LearningCurve {
    pub algorithm: String,
    pub adapter: String,
    pub env_id: String,
    pub config_hash: u64,
    pub records: Vec<CurveRecord>,
}

/// A full multi-seed run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub curve: LearningCurve,
    pub seeds: Vec<SeedOutcome>,
}

impl TrainOutcome {
    pub fn final_evals(&self) -> Vec<f64> {
        self.seeds.iter().map(|s| s.final_eval).collect()
    }

    pub fn repair(&self) -> RepairTotals {
        let mut total = RepairTotals::default();
        for s in &self.seeds {
            total.merge(&s.repair);
        }
        total
    }
}
