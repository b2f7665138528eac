//! Reward-weighted episodic policy search with an elite importance buffer.
//!
//! After every rollout the perturbed candidate parameters and their return
//! join a buffer of the best `k` rollouts seen so far. The update moves θ
//! toward the return-weighted average of the elite candidates,
//!
//! ```text
//! θ ← θ + Σ_k w_k (θ_k − θ) / Σ_k w_k,   w_k = R_k − min_buffer(R) + 1e-10,
//! ```
//!
//! and the exploration variance decays multiplicatively per rollout.

use nalgebra::DMatrix;

use crate::policy::PolicyParams;

#[derive(Debug, Clone)]
struct Elite {
    candidate: DMatrix<f64>,
    ret: f64,
}

#[derive(Debug, Clone)]
pub struct PowerState {
    params: PolicyParams,
    elites: Vec<Elite>,
    max_elites: usize,
    decay: f64,
}

const WEIGHT_FLOOR: f64 = 1e-10;

impl PowerState {
    pub fn new(params: PolicyParams, max_elites: usize, decay: f64) -> Self {
        assert!(max_elites >= 1);
        assert!(decay > 0.0 && decay <= 1.0);
        PowerState {
            params,
            elites: Vec::with_capacity(max_elites + 1),
            max_elites,
            decay,
        }
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }

    pub fn elite_returns(&self) -> Vec<f64> {
        self.elites.iter().map(|e| e.ret).collect()
    }

    /// Records one rollout (the absolute perturbed parameters it used and
    /// the return it earned) and applies the reward-weighted update plus the
    /// exploration decay.
    pub fn update(&mut self, candidate_theta: DMatrix<f64>, ret: f64) {
        self.elites.push(Elite {
            candidate: candidate_theta,
            ret,
        });
        // Descending by return; ties keep insertion order.
        self.elites.sort_by(|a, b| b.ret.total_cmp(&a.ret));
        self.elites.truncate(self.max_elites);

        let min_ret = self
            .elites
            .iter()
            .map(|e| e.ret)
            .fold(f64::INFINITY, f64::min);
        let mut weight_sum = 0.0;
        let mut step = DMatrix::zeros(
            self.params.theta().nrows(),
            self.params.theta().ncols(),
        );
        for elite in &self.elites {
            let w = elite.ret - min_ret + WEIGHT_FLOOR;
            weight_sum += w;
            step += (&elite.candidate - self.params.theta()) * w;
        }
        let theta = self.params.theta() + step / weight_sum;
        self.params = self.params.with_theta(theta);
        self.params.decay_sigma(self.decay);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::Rng;

    fn scalar_params(theta: f64, std: f64) -> PolicyParams {
        PolicyParams::new(
            DMatrix::from_element(1, 1, theta),
            crate::policy::ExplorationCov::Diagonal(DVector::from_element(1, std)),
        )
        .unwrap()
    }

    #[test]
    fn single_elite_at_current_theta_leaves_theta_unchanged() {
        let mut state = PowerState::new(scalar_params(0.5, 0.1), 10, 1.0);
        state.update(DMatrix::from_element(1, 1, 0.5), 1.0);
        assert_relative_eq!(state.params().theta()[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_elites_with_equal_returns_cancel() {
        let mut state = PowerState::new(scalar_params(0.0, 0.1), 10, 1.0);
        state.update(DMatrix::from_element(1, 1, 0.3), 2.0);
        state.update(DMatrix::from_element(1, 1, -0.3), 2.0);
        // After the second update both elites have equal weight and opposite
        // offsets from θ = ±0.3 mixed... verify exact symmetry from a fresh
        // state instead: two equal-return candidates at ±ε around θ.
        let mut fresh = PowerState::new(scalar_params(0.0, 0.1), 10, 1.0);
        fresh.elites.push(Elite {
            candidate: DMatrix::from_element(1, 1, 0.3),
            ret: 2.0,
        });
        fresh.update(DMatrix::from_element(1, 1, -0.3), 2.0);
        assert_relative_eq!(fresh.params().theta()[(0, 0)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn buffer_stays_sorted_and_bounded() {
        let mut state = PowerState::new(scalar_params(0.0, 0.1), 5, 1.0);
        let mut rng = crate::seeds::stream(1, &[77]);
        for _ in 0..100 {
            state.update(
                DMatrix::from_element(1, 1, rng.gen_range(-1.0..1.0)),
                rng.gen_range(-3.0..3.0),
            );
            let rets = state.elite_returns();
            assert!(rets.len() <= 5);
            assert!(rets.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn converges_on_scalar_quadratic() {
        // Maximize r(θ) = -(θ - 1)²: within 1e-2 of the optimum in at most
        // 200 rollouts for every seed.
        for seed in 1..=5u64 {
            let mut rng = crate::seeds::stream(seed, &[5]);
            let mut state = PowerState::new(scalar_params(0.0, 0.3), 10, 0.98);
            for _ in 0..200 {
                let eps = state.params().sample_noise(&mut rng);
                let candidate = state.params().theta() + &eps;
                let ret = -(candidate[(0, 0)] - 1.0).powi(2);
                state.update(candidate, ret);
            }
            let theta = state.params().theta()[(0, 0)];
            assert!(
                (theta - 1.0).abs() < 1e-2,
                "seed {seed}: θ = {theta} after 200 rollouts"
            );
        }
    }
}
