//! The outer learning loop: exploration rollouts, optimizer updates, and
//! periodic noise-free evaluation episodes.

use rayon::prelude::*;

use crate::env::Environment;
use crate::error::Error;
use crate::manifold::CompositePoint;
use crate::optim::cmaes::CmaesState;
use crate::optim::curve::{
    CurveRecord, LearningCurve, RepairTotals, SeedOutcome, TrainOutcome,
};
use crate::optim::episode::{run_episode, NoiseMode, Rollout};
use crate::optim::power::PowerState;
use crate::policy::{initial_theta, AdapterMode, FeatureMap, PolicyParams};
use crate::seeds;

/// Which optimizer drives the run, with its exploration settings.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Power {
        init_std: f64,
        std_decay: f64,
        elites: usize,
    },
    Cmaes {
        sigma0: f64,
        lambda: Option<usize>,
    },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Power { .. } => "power",
            AlgorithmSpec::Cmaes { .. } => "cmaes",
        }
    }
}

/// Everything a run needs besides the environment and the seed.
#[derive(Debug, Clone)]
pub struct TrainSetup {
    pub adapter: AdapterMode,
    pub features: FeatureMap,
    pub base_p: CompositePoint,
    pub algorithm: AlgorithmSpec,
    pub budget: u64,
    pub eval_interval: u64,
    pub master_seed: u64,
    pub config_hash: u64,
}

/// Geometric edge cases (antipodal transport, indefinite distances) abort a
/// rollout; the optimizer receives this penalty instead of crashing.
fn penalty_return(worst: Option<f64>) -> f64 {
    worst.map_or(-1.0, |w| w - 1.0)
}

fn is_geometric(err: &Error) -> bool {
    matches!(
        err,
        Error::Antipodal | Error::NotPositiveDefinite { .. } | Error::ZeroNorm
    )
}

struct Loop<'a> {
    env: &'a mut dyn Environment,
    setup: &'a TrainSetup,
    seed: u64,
    records: Vec<CurveRecord>,
    repair: RepairTotals,
    worst: Option<f64>,
    final_eval_rollout: Option<Rollout>,
}

impl<'a> Loop<'a> {
    /// Runs one noise-free evaluation episode and returns its value.
    fn eval_value(&mut self, params: &PolicyParams) -> Result<f64, Error> {
        let result = run_episode(
            self.env,
            params,
            self.setup.adapter,
            &self.setup.features,
            &self.setup.base_p,
            NoiseMode::Deterministic,
        );
        match result {
            Ok(rollout) => {
                self.repair.absorb(&rollout);
                let v = rollout.total_return;
                self.final_eval_rollout = Some(rollout);
                Ok(v)
            }
            Err(e) if is_geometric(&e) => Ok(penalty_return(self.worst)),
            Err(e) => Err(e),
        }
    }

    fn record_training(&mut self, index: u64, ret: f64) {
        self.worst = Some(self.worst.map_or(ret, |w| w.min(ret)));
        self.records.push(CurveRecord {
            seed: self.seed,
            rollout_index: index,
            train_return: Some(ret),
            eval_return: None,
        });
    }

    /// Folds an evaluation value into the row of the same index (the initial
    /// evaluation gets its own row).
    fn attach_eval(&mut self, index: u64, value: f64) {
        match self
            .records
            .iter_mut()
            .rev()
            .find(|r| r.rollout_index == index)
        {
            Some(rec) => rec.eval_return = Some(value),
            None => self.records.push(CurveRecord {
                seed: self.seed,
                rollout_index: index,
                train_return: None,
                eval_return: Some(value),
            }),
        }
    }
}

/// Trains one seed and returns its records, final parameters, and repair
/// totals. Fully determined by `(setup, env, seed)`.
pub fn train_seed(
    env: &mut dyn Environment,
    setup: &TrainSetup,
    seed: u64,
) -> Result<SeedOutcome, Error> {
    let kinds = env.kinds().to_vec();
    let tangent_dim: usize = kinds.iter().map(|k| k.tangent_dim()).sum();
    let feature_dim = setup.features.dim(tangent_dim);
    let theta0_col = initial_theta(setup.adapter, &kinds);
    let mut theta0 = nalgebra::DMatrix::zeros(tangent_dim, feature_dim);
    for c in 0..feature_dim {
        theta0.set_column(c, &theta0_col);
    }

    let mut state = Loop {
        env,
        setup,
        seed,
        records: Vec::new(),
        repair: RepairTotals::default(),
        worst: None,
        final_eval_rollout: None,
    };

    let final_params = match &setup.algorithm {
        AlgorithmSpec::Power {
            init_std,
            std_decay,
            elites,
        } => {
            let params = PolicyParams::zeros(tangent_dim, feature_dim, *init_std)
                .with_theta(theta0);
            let mut power = PowerState::new(params, *elites, *std_decay);
            let initial = state.eval_value(power.params())?;
            state.attach_eval(0, initial);
            for index in 1..=setup.budget {
                let mut rng = seeds::stream(
                    setup.master_seed,
                    &[seeds::domain::ROLLOUT, seed, index],
                );
                let ret = match run_episode(
                    state.env,
                    power.params(),
                    setup.adapter,
                    &setup.features,
                    &setup.base_p,
                    NoiseMode::Explore(&mut rng),
                ) {
                    Ok(rollout) => {
                        state.repair.absorb(&rollout);
                        let candidate = power.params().theta()
                            + rollout.noise.as_ref().expect("exploration rollout");
                        let ret = rollout.total_return;
                        power.update(candidate, ret);
                        ret
                    }
                    Err(e) if is_geometric(&e) => {
                        let ret = penalty_return(state.worst);
                        // The candidate still joins the buffer so repeated
                        // failures push the policy away from the edge.
                        power.update(power.params().theta().clone(), ret);
                        ret
                    }
                    Err(e) => return Err(e),
                };
                state.record_training(index, ret);
                if index % setup.eval_interval == 0 {
                    let value = state.eval_value(power.params())?;
                    state.attach_eval(index, value);
                }
            }
            power.params().clone()
        }
        AlgorithmSpec::Cmaes { sigma0, lambda } => {
            let params = PolicyParams::zeros(tangent_dim, feature_dim, 0.0).with_theta(theta0);
            let mut es = CmaesState::new(params.flat_theta(), *sigma0, *lambda);
            let initial = state.eval_value(&params.with_flat_theta(es.mean())?)?;
            state.attach_eval(0, initial);
            let mut index = 0u64;
            let mut generation = 0u64;
            while index < setup.budget {
                let mut rng = seeds::stream(
                    setup.master_seed,
                    &[seeds::domain::OPTIMIZER, seed, generation],
                );
                let candidates = es.ask(&mut rng);
                let mut scored = Vec::with_capacity(candidates.len());
                for x in candidates {
                    index += 1;
                    let cand_params = params.with_flat_theta(&x)?;
                    let ret = match run_episode(
                        state.env,
                        &cand_params,
                        setup.adapter,
                        &setup.features,
                        &setup.base_p,
                        NoiseMode::Deterministic,
                    ) {
                        Ok(rollout) => {
                            state.repair.absorb(&rollout);
                            rollout.total_return
                        }
                        Err(e) if is_geometric(&e) => penalty_return(state.worst),
                        Err(e) => return Err(e),
                    };
                    state.record_training(index, ret);
                    if index % setup.eval_interval == 0 && index <= setup.budget {
                        let value = state.eval_value(&params.with_flat_theta(es.mean())?)?;
                        state.attach_eval(index, value);
                    }
                    scored.push((x, ret));
                }
                es.tell(&scored)?;
                generation += 1;
            }
            params.with_flat_theta(es.mean())?
        }
    };

    // Final evaluation with the trained parameters, unless the last row
    // already carries one.
    let final_eval = {
        let last_index = state
            .records
            .iter()
            .map(|r| r.rollout_index)
            .max()
            .unwrap_or(0);
        match state
            .records
            .iter()
            .rev()
            .find(|r| r.eval_return.is_some() && r.rollout_index == last_index)
        {
            Some(rec) => rec.eval_return.unwrap(),
            None => {
                let value = state.eval_value(&final_params)?;
                state.attach_eval(last_index, value);
                value
            }
        }
    };

    let initial_eval = state.records[0].eval_return.expect("initial evaluation");
    let tracking_error = state
        .final_eval_rollout
        .as_ref()
        .and_then(|r| state.env.tracking_error(&r.actions()));

    Ok(SeedOutcome {
        seed,
        records: state.records,
        final_params,
        repair: state.repair,
        initial_eval,
        final_eval,
        tracking_error,
    })
}

/// Trains every seed (in parallel when a rayon pool is active) and stitches
/// the per-seed records into one curve, ordered by the seeds list.
pub fn train(
    setup: &TrainSetup,
    env_factory: &(dyn Fn() -> Box<dyn Environment> + Sync),
    run_seeds: &[u64],
) -> Result<TrainOutcome, Error> {
    let outcomes: Result<Vec<SeedOutcome>, Error> = run_seeds
        .par_iter()
        .map(|&seed| {
            let mut env = env_factory();
            train_seed(env.as_mut(), setup, seed)
        })
        .collect();
    let outcomes = outcomes?;

    let env_id = env_factory().id();
    let mut records = Vec::new();
    for outcome in &outcomes {
        records.extend(outcome.records.iter().cloned());
    }
    Ok(TrainOutcome {
        curve: LearningCurve {
            algorithm: setup.algorithm.name().to_string(),
            adapter: setup.adapter.name().to_string(),
            env_id,
            config_hash: setup.config_hash,
            records,
        },
        seeds: outcomes,
    })
}
