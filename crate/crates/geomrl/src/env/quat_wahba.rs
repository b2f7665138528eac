//! Rotation fitting: recover the unit quaternions that align observed vector
//! sets with their rotated images.
//!
//! An instance of size `s` bundles `s` independent single-prediction
//! sub-problems into one product action space `(S³)^s`; the whole episode is
//! a single simultaneous prediction, and the reward averages the per-factor
//! terms so its range does not depend on `s`.

use nalgebra::{DVector, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::manifold::{CompositePoint, Factor, FactorKind, UnitQuaternion};
use crate::policy::FrameMode;
use crate::seeds;

use super::{Environment, StepOutcome};

/// Per-factor reward shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    /// `-d(Q*, Q̂)`, in `[-π, 0]`.
    NegDist,
    /// `exp(-d(Q*, Q̂))`, in `(0, 1]`.
    ExpNegDist,
}

/// One target rotation with its observation set.
#[derive(Debug, Clone)]
struct TargetBlock {
    target: UnitQuaternion,
    /// Unit observation vectors.
    observations: Vec<Vector3<f64>>,
    /// Rotated observations, optionally with additive noise.
    rotated: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub struct QuatWahbaEnv {
    blocks: Vec<TargetBlock>,
    kinds: Vec<FactorKind>,
    reward_kind: RewardKind,
    done: bool,
}

impl QuatWahbaEnv {
    /// Builds an instance with `size` independent targets, `n_obs` unit
    /// observation vectors each, and optional Gaussian observation noise on
    /// the rotated set. Fully determined by `(master_seed, env_seed)`.
    pub fn new(
        size: usize,
        n_obs: usize,
        reward_kind: RewardKind,
        noise_std: f64,
        master_seed: u64,
        env_seed: u64,
    ) -> Self {
        assert!(size >= 1 && n_obs >= 1);
        let mut rng = seeds::stream(master_seed, &[seeds::domain::ENV, env_seed]);
        let mut blocks = Vec::with_capacity(size);
        for _ in 0..size {
            let target = random_canonical_quaternion(&mut rng);
            let observations: Vec<Vector3<f64>> = (0..n_obs)
                .map(|_| random_unit_vector(&mut rng))
                .collect();
            let rotated = observations
                .iter()
                .map(|y| {
                    let mut z = target.rotate_vector(y);
                    if noise_std > 0.0 {
                        for k in 0..3 {
                            z[k] += noise_std * rng.sample::<f64, _>(StandardNormal);
                        }
                    }
                    z
                })
                .collect();
            blocks.push(TargetBlock {
                target,
                observations,
                rotated,
            });
        }
        QuatWahbaEnv {
            kinds: vec![FactorKind::S3; size],
            blocks,
            reward_kind,
            done: false,
        }
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn reward_kind(&self) -> RewardKind {
        self.reward_kind
    }

    pub fn target(&self, index: usize) -> &UnitQuaternion {
        &self.blocks[index].target
    }

    /// The flattened `(Y, Z)` observation pairs; with a constant-feature
    /// policy this only matters for logging.
    pub fn observation_vector(&self) -> DVector<f64> {
        let n: usize = self.blocks.iter().map(|b| b.observations.len() * 6).sum();
        let mut flat = DVector::zeros(n);
        let mut k = 0;
        for block in &self.blocks {
            for (y, z) in block.observations.iter().zip(block.rotated.iter()) {
                for i in 0..3 {
                    flat[k + i] = y[i];
                    flat[k + 3 + i] = z[i];
                }
                k += 6;
            }
        }
        flat
    }

    /// Replaces one target with a known rotation, regenerating the rotated
    /// observations consistently (noise-free). Useful for controlled
    /// instances.
    pub fn set_target(&mut self, index: usize, target: UnitQuaternion) {
        let block = &mut self.blocks[index];
        block.target = target.canonicalized();
        block.rotated = block
            .observations
            .iter()
            .map(|y| block.target.rotate_vector(y))
            .collect();
    }

    /// Least-squares alignment cost of a candidate rotation for one target
    /// block: `½ Σ_k ‖z_k − R(Q)·y_k‖²` with unit weights.
    pub fn alignment_cost(&self, index: usize, q: &UnitQuaternion) -> f64 {
        let block = &self.blocks[index];
        0.5 * block
            .observations
            .iter()
            .zip(block.rotated.iter())
            .map(|(y, z)| (z - q.rotate_vector(y)).norm_squared())
            .sum::<f64>()
    }
}

/// Least-squares alignment cost of a candidate rotation for the first target
/// of the instance. See [`QuatWahbaEnv::alignment_cost`].
pub fn wahba_cost(q: &UnitQuaternion, env: &QuatWahbaEnv) -> f64 {
    env.alignment_cost(0, q)
}

fn random_unit_vector(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

fn random_canonical_quaternion(rng: &mut impl Rng) -> UnitQuaternion {
    loop {
        let v = nalgebra::Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(q) = UnitQuaternion::from_vector(v) {
            return q.canonicalized();
        }
    }
}

impl Environment for QuatWahbaEnv {
    fn id(&self) -> String {
        format!("quat_wahba(size={})", self.size())
    }

    fn kinds(&self) -> &[FactorKind] {
        &self.kinds
    }

    fn horizon(&self) -> usize {
        1
    }

    fn frame_mode(&self) -> FrameMode {
        FrameMode::SingleStep
    }

    fn reset(&mut self) -> CompositePoint {
        self.done = false;
        CompositePoint::default_bases(&self.kinds)
    }

    fn step(&mut self, action: &CompositePoint) -> Result<StepOutcome, Error> {
        if action.kinds() != self.kinds {
            return Err(Error::kind_mismatch("wahba action layout".to_string()));
        }
        let mut total = 0.0;
        for (block, factor) in self.blocks.iter().zip(action.factors()) {
            let q = match factor {
                Factor::S3(q) => q,
                _ => unreachable!("layout checked above"),
            };
            let d = block.target.distance(q);
            total += match self.reward_kind {
                RewardKind::NegDist => -d,
                RewardKind::ExpNegDist => (-d).exp(),
            };
        }
        self.done = true;
        Ok(StepOutcome {
            reward: total / self.blocks.len() as f64,
            done: true,
            next_state: action.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn single_env(reward: RewardKind) -> QuatWahbaEnv {
        QuatWahbaEnv::new(1, 10, reward, 0.0, 42, 7)
    }

    fn act(env: &mut QuatWahbaEnv, q: UnitQuaternion) -> f64 {
        env.reset();
        let action = CompositePoint::new(vec![Factor::S3(q)]);
        env.step(&action).unwrap().reward
    }

    #[test]
    fn perfect_action_scores_zero_or_one() {
        let mut env = single_env(RewardKind::NegDist);
        let target = *env.target(0);
        assert_relative_eq!(act(&mut env, target), 0.0, epsilon = 1e-12);

        let mut env = single_env(RewardKind::ExpNegDist);
        let target = *env.target(0);
        assert_relative_eq!(act(&mut env, target), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_action_scores_quarter_turn() {
        let mut env = single_env(RewardKind::NegDist);
        let t = *env.target(0);
        // A point at geodesic distance π/2 from the target.
        let ortho = orthogonal_to(&t);
        assert_relative_eq!(act(&mut env, ortho), -FRAC_PI_2, epsilon = 1e-9);

        let mut env = single_env(RewardKind::ExpNegDist);
        let t = *env.target(0);
        let ortho = orthogonal_to(&t);
        assert_relative_eq!(act(&mut env, ortho), (-FRAC_PI_2).exp(), epsilon = 1e-9);
    }

    fn orthogonal_to(q: &UnitQuaternion) -> UnitQuaternion {
        let mut rng = seeds::stream(1, &[50]);
        loop {
            let raw = nalgebra::Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let v = raw - q.as_vector() * q.as_vector().dot(&raw);
            if v.norm() > 1e-3 {
                return UnitQuaternion::from_vector(v).unwrap();
            }
        }
    }

    #[test]
    fn reward_invariant_under_action_sign_flip_after_canonicalization() {
        // Q and -Q describe the same rotation; the alignment cost must agree.
        let env = single_env(RewardKind::NegDist);
        let t = *env.target(0);
        let minus = UnitQuaternion::from_vector(-t.as_vector()).unwrap();
        assert_relative_eq!(
            wahba_cost(&t, &env),
            wahba_cost(&minus, &env),
            epsilon = 1e-12
        );
    }

    #[test]
    fn alignment_cost_hand_rotation() {
        // Candidate identity, target 90° about z, single observation e_x:
        // J = ½‖e_y − e_x‖² = 1.
        let mut env = single_env(RewardKind::NegDist);
        let half = FRAC_PI_2 / 2.0;
        env.blocks[0].target = UnitQuaternion::new(half.cos(), 0.0, 0.0, half.sin()).unwrap();
        env.blocks[0].observations = vec![Vector3::new(1.0, 0.0, 0.0)];
        env.blocks[0].rotated = vec![env.blocks[0]
            .target
            .rotate_vector(&env.blocks[0].observations[0])];
        let j = wahba_cost(&UnitQuaternion::identity(), &env);
        assert_relative_eq!(j, 1.0, epsilon = 1e-12);
        // Zero at the target itself.
        assert!(wahba_cost(&env.blocks[0].target.clone(), &env) < 1e-12);
    }

    #[test]
    fn target_is_unique_reward_maximizer() {
        let env = single_env(RewardKind::ExpNegDist);
        let t = *env.target(0);
        let mut rng = seeds::stream(9, &[1]);
        let mut env2 = env.clone();
        let best = act(&mut env2, t);
        for _ in 0..10_000 {
            let q = loop {
                let v = nalgebra::Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                if let Ok(q) = UnitQuaternion::from_vector(v) {
                    break q.canonicalized();
                }
            };
            if t.distance(&q) < 1e-6 {
                continue;
            }
            assert!(act(&mut env2, q) < best);
        }
    }

    #[test]
    fn rewards_bounded_and_deterministic() {
        let mut env = QuatWahbaEnv::new(4, 5, RewardKind::ExpNegDist, 0.0, 3, 3);
        let mut rng = seeds::stream(9, &[2]);
        for _ in 0..200 {
            env.reset();
            let factors = (0..4)
                .map(|_| {
                    let v = nalgebra::Vector4::from_fn(|_, _| rng.gen_range(-1.0f64..1.0));
                    Factor::S3(UnitQuaternion::from_vector(v).unwrap())
                })
                .collect();
            let action = CompositePoint::new(factors);
            let r = env.step(&action).unwrap().reward;
            assert!(r > 0.0 && r <= 1.0);
            let mut env2 = env.clone();
            env2.reset();
            assert_eq!(env2.step(&action).unwrap().reward, r);
        }
    }

    #[test]
    fn observation_vector_consistent_with_targets_when_noiseless() {
        let env = QuatWahbaEnv::new(2, 3, RewardKind::NegDist, 0.0, 11, 4);
        for (b, block) in env.blocks.iter().enumerate() {
            assert!(block.observations.iter().all(|y| (y.norm() - 1.0).abs() < 1e-12));
            for (y, z) in block.observations.iter().zip(block.rotated.iter()) {
                assert!((block.target.rotate_vector(y) - z).norm() < 1e-12, "block {b}");
            }
        }
        assert_eq!(env.observation_vector().len(), 2 * 3 * 6);
    }
}
