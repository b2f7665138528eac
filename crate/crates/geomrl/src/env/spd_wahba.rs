//! Stiffness fitting: recover the SPD matrices that map observed
//! displacements to forces, as in a spring model `z = W·y`.
//!
//! Mirrors the rotation-fitting benchmark: size `s` bundles `s` independent
//! targets into a product action space `SPD(d)^s`, one simultaneous
//! prediction per episode, reward averaged over factors. The per-factor
//! reward is the negated affine-invariant distance to the target.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::manifold::{CompositePoint, Factor, FactorKind, SpdMatrix};
use crate::policy::FrameMode;
use crate::seeds;

use super::{Environment, StepOutcome};

#[derive(Debug, Clone)]
struct TargetBlock {
    target: SpdMatrix,
    displacements: Vec<Vector3<f64>>,
    forces: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub struct SpdWahbaEnv {
    blocks: Vec<TargetBlock>,
    kinds: Vec<FactorKind>,
    dim: usize,
    done: bool,
}

impl SpdWahbaEnv {
    /// `size` independent SPD targets of side `dim` with eigenvalues in
    /// `[0.5, 2]`, each paired with `n_obs` displacement/force observations.
    pub fn new(size: usize, dim: usize, n_obs: usize, master_seed: u64, env_seed: u64) -> Self {
        assert!(size >= 1 && n_obs >= 1);
        assert!(dim == 3, "the spring model observes 3-d displacements");
        let mut rng = seeds::stream(master_seed, &[seeds::domain::ENV, env_seed]);
        let mut blocks = Vec::with_capacity(size);
        for _ in 0..size {
            let target = random_spd(&mut rng, dim);
            let displacements: Vec<Vector3<f64>> = (0..n_obs)
                .map(|_| Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal)))
                .collect();
            let forces = displacements
                .iter()
                .map(|y| {
                    let m = target.matrix();
                    Vector3::new(
                        m[(0, 0)] * y[0] + m[(0, 1)] * y[1] + m[(0, 2)] * y[2],
                        m[(1, 0)] * y[0] + m[(1, 1)] * y[1] + m[(1, 2)] * y[2],
                        m[(2, 0)] * y[0] + m[(2, 1)] * y[1] + m[(2, 2)] * y[2],
                    )
                })
                .collect();
            blocks.push(TargetBlock {
                target,
                displacements,
                forces,
            });
        }
        SpdWahbaEnv {
            kinds: vec![FactorKind::Spd(dim); size],
            blocks,
            dim,
            done: false,
        }
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn target(&self, index: usize) -> &SpdMatrix {
        &self.blocks[index].target
    }

    pub fn observation_vector(&self) -> DVector<f64> {
        let n: usize = self.blocks.iter().map(|b| b.displacements.len() * 6).sum();
        let mut flat = DVector::zeros(n);
        let mut k = 0;
        for block in &self.blocks {
            for (y, z) in block.displacements.iter().zip(block.forces.iter()) {
                for i in 0..3 {
                    flat[k + i] = y[i];
                    flat[k + 3 + i] = z[i];
                }
                k += 6;
            }
        }
        flat
    }
}

fn random_spd(rng: &mut impl Rng, d: usize) -> SpdMatrix {
    let raw = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = raw.qr().q();
    let eigs = DVector::from_fn(d, |_, _| rng.gen_range(0.5..2.0));
    SpdMatrix::new({
        let m = &q * DMatrix::from_diagonal(&eigs) * q.transpose();
        (&m + m.transpose()) * 0.5
    })
    .expect("constructed SPD")
}

impl Environment for SpdWahbaEnv {
    fn id(&self) -> String {
        format!("spd_wahba(size={},d={})", self.size(), self.dim)
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
            return Err(Error::kind_mismatch("spd wahba action layout".to_string()));
        }
        let mut total = 0.0;
        for (block, factor) in self.blocks.iter().zip(action.factors()) {
            let w = match factor {
                Factor::Spd(w) => w,
                _ => unreachable!("layout checked above"),
            };
            total -= block.target.distance(w)?;
        }
        self.done = true;
        Ok(StepOutcome {
            reward: total / self.blocks.len() as f64,
            done: true,
            next_state: action.clone(),
        })
    }
}
