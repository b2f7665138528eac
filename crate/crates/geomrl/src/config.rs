//! Experiment configuration: JSON schema, validation, and resolution into a
//! runnable plan.
//!
//! Configs are UTF-8 JSON. Unknown keys are errors, so typos in
//! hyperparameters cannot silently corrupt a comparison. Every random choice
//! derives from `master_seed` (see [`crate::seeds`]); the environment's own
//! `seed` selects the problem instance, which is shared by all run seeds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::{
    gen_quat_traj, gen_spd_traj, read_quat_traj, read_spd_traj, Environment, QuatTrajEnv,
    QuatWahbaEnv, RewardKind, SpdTrajEnv, SpdWahbaEnv,
};
use crate::manifold::{CompositePoint, Factor, FactorKind, SpdMatrix, UnitQuaternion};
use crate::optim::TrainSetup;
use crate::policy::{AdapterMode, FeatureMap};

/// A configuration or validation problem; the CLI maps this to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub algorithm: AlgorithmConfig,
    /// Required for `run`; ignored by `compare`, which runs every applicable
    /// adapter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adapter: Option<AdapterMode>,
    /// Training rollouts per seed.
    pub budget: u64,
    #[serde(default = "default_eval_interval")]
    pub eval_interval: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub policy: PolicyConfig,
    /// Output directory; the CLI `--output` flag overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_eval_interval() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvConfig {
    QuatWahba(QuatWahbaConfig),
    SpdWahba(SpdWahbaConfig),
    QuatTraj(QuatTrajConfig),
    SpdTraj(SpdTrajConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuatWahbaConfig {
    /// Number of simultaneously learned targets.
    pub size: usize,
    #[serde(default = "default_n_obs")]
    pub n_obs: usize,
    #[serde(default = "default_reward_kind")]
    pub reward_kind: RewardKind,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdWahbaConfig {
    pub size: usize,
    #[serde(default = "default_spd_dim")]
    pub dim: usize,
    #[serde(default = "default_n_obs")]
    pub n_obs: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuatTrajConfig {
    /// Steps per episode; the target list has `horizon + 1` points.
    pub horizon: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    /// Import targets from a plain-text table instead of generating them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdTrajConfig {
    pub horizon: usize,
    #[serde(default = "default_spd_dim")]
    pub dim: usize,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets_file: Option<PathBuf>,
}

fn default_n_obs() -> usize {
    10
}
fn default_spd_dim() -> usize {
    3
}
fn default_reward_kind() -> RewardKind {
    RewardKind::ExpNegDist
}
fn default_amplitude() -> f64 {
    0.03
}
fn default_spread() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmConfig {
    Power(PowerConfig),
    Cmaes(CmaesConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerConfig {
    #[serde(default = "default_init_std")]
    pub init_std: f64,
    #[serde(default = "default_std_decay")]
    pub std_decay: f64,
    #[serde(default = "default_elites")]
    pub elites: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmaesConfig {
    #[serde(default = "default_sigma0")]
    pub sigma0: f64,
    /// Population size; the canonical `4 + ⌊3 ln n⌋` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,
}

fn default_init_std() -> f64 {
    0.3
}
fn default_std_decay() -> f64 {
    0.999
}
fn default_elites() -> usize {
    10
}
fn default_sigma0() -> f64 {
    0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKindConfig {
    Constant,
    TimeRbf,
    StateLinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    /// Defaults per environment: constant features for single-prediction
    /// tasks, time-rbf for trajectories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureKindConfig>,
    #[serde(default = "default_n_basis")]
    pub n_basis: usize,
    /// Override of the parameterization base, one entry per factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_p: Option<Vec<BasePointConfig>>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            features: None,
            n_basis: default_n_basis(),
            base_p: None,
        }
    }
}

fn default_n_basis() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePointConfig {
    S3([f64; 4]),
    Spd(Vec<Vec<f64>>),
    Euclid(Vec<f64>),
}

/// Target data resolved ahead of time, so building an environment for a
/// parallel worker touches no files.
#[derive(Debug, Clone)]
pub enum EnvBuild {
    QuatWahba(QuatWahbaConfig, u64),
    SpdWahba(SpdWahbaConfig, u64),
    QuatTraj(Vec<UnitQuaternion>),
    SpdTraj(Vec<SpdMatrix>),
}

impl EnvBuild {
    pub fn build(&self) -> Box<dyn Environment> {
        match self {
            EnvBuild::QuatWahba(c, master) => Box::new(QuatWahbaEnv::new(
                c.size,
                c.n_obs,
                c.reward_kind,
                c.noise_std,
                *master,
                c.seed,
            )),
            EnvBuild::SpdWahba(c, master) => {
                Box::new(SpdWahbaEnv::new(c.size, c.dim, c.n_obs, *master, c.seed))
            }
            EnvBuild::QuatTraj(targets) => Box::new(QuatTrajEnv::new(targets.clone())),
            EnvBuild::SpdTraj(targets) => Box::new(SpdTrajEnv::new(targets.clone())),
        }
    }

    pub fn kinds(&self) -> Vec<FactorKind> {
        self.build().kinds().to_vec()
    }

    pub fn is_trajectory(&self) -> bool {
        matches!(self, EnvBuild::QuatTraj(_) | EnvBuild::SpdTraj(_))
    }
}

/// A validated, fully resolved experiment.
#[derive(Debug, Clone)]
pub struct RunPlan {
    /// The resolved config, serialized verbatim into `config.echo`.
    pub echo: ExperimentConfig,
    pub env_build: EnvBuild,
    pub features: FeatureMap,
    pub base_p: CompositePoint,
    pub adapter: Option<AdapterMode>,
    pub output: Option<PathBuf>,
    pub config_hash: u64,
}

impl RunPlan {
    pub fn setup(&self, adapter: AdapterMode) -> TrainSetup {
        TrainSetup {
            adapter,
            features: self.features.clone(),
            base_p: self.base_p.clone(),
            algorithm: match &self.echo.algorithm {
                AlgorithmConfig::Power(p) => crate::optim::AlgorithmSpec::Power {
                    init_std: p.init_std,
                    std_decay: p.std_decay,
                    elites: p.elites,
                },
                AlgorithmConfig::Cmaes(c) => crate::optim::AlgorithmSpec::Cmaes {
                    sigma0: c.sigma0,
                    lambda: c.lambda,
                },
            },
            budget: self.echo.budget,
            eval_interval: self.echo.eval_interval,
            master_seed: self.echo.master_seed,
            config_hash: self.config_hash,
        }
    }
}

/// Parses a config file. Syntax errors carry serde's line/column diagnostic.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| err(e.to_string()))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// FNV-1a over the canonical resolved-config JSON.
fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Validates a parsed config and resolves every default into a [`RunPlan`].
///
/// `require_adapter` distinguishes `run` (adapter mandatory) from `compare`
/// (adapter ignored). `cli_output` overrides the config's output directory.
pub fn resolve(
    mut cfg: ExperimentConfig,
    require_adapter: bool,
    cli_output: Option<PathBuf>,
) -> Result<RunPlan, ConfigError> {
    if cfg.budget == 0 {
        return Err(err("budget: must be at least 1"));
    }
    if cfg.eval_interval == 0 {
        return Err(err("eval_interval: must be at least 1"));
    }
    if cfg.seeds.is_empty() {
        return Err(err("seeds: must not be empty"));
    }
    {
        let mut sorted = cfg.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cfg.seeds.len() {
            return Err(err("seeds: entries must be distinct"));
        }
    }
    if cfg.policy.n_basis == 0 {
        return Err(err("policy.n_basis: must be at least 1"));
    }

    let env_build = resolve_env(&cfg)?;
    let kinds = env_build.kinds();

    let feature_kind = cfg.features_or_default();
    cfg.policy.features = Some(feature_kind.clone());
    let features = match feature_kind {
        FeatureKindConfig::Constant => FeatureMap::Constant,
        FeatureKindConfig::TimeRbf => FeatureMap::time_rbf(cfg.policy.n_basis),
        FeatureKindConfig::StateLinear => FeatureMap::StateLinear,
    };

    let base_p = match &cfg.policy.base_p {
        None => CompositePoint::default_bases(&kinds),
        Some(entries) => resolve_base_p(entries, &kinds)?,
    };

    if let Some(adapter) = cfg.adapter {
        if !adapter.supports(&kinds) {
            return Err(err(format!(
                "adapter: {} does not support this environment's factor layout",
                adapter.name()
            )));
        }
    } else if require_adapter {
        return Err(err(
            "adapter: required for `run` (one of grl, normalize, cholesky, mandel)",
        ));
    }

    let output = cli_output.or_else(|| cfg.output.clone());
    cfg.output = output.clone();

    let adapter = cfg.adapter;
    let echo_json = serde_json::to_vec(&cfg).map_err(|e| err(e.to_string()))?;
    Ok(RunPlan {
        config_hash: hash_bytes(&echo_json),
        echo: cfg,
        env_build,
        features,
        base_p,
        adapter,
        output,
    })
}

impl ExperimentConfig {
    fn features_or_default(&self) -> FeatureKindConfig {
        self.policy.features.clone().unwrap_or(match self.env {
            EnvConfig::QuatWahba(_) | EnvConfig::SpdWahba(_) => FeatureKindConfig::Constant,
            EnvConfig::QuatTraj(_) | EnvConfig::SpdTraj(_) => FeatureKindConfig::TimeRbf,
        })
    }
}

fn resolve_env(cfg: &ExperimentConfig) -> Result<EnvBuild, ConfigError> {
    match &cfg.env {
        EnvConfig::QuatWahba(c) => {
            if c.size == 0 {
                return Err(err("env.size: must be at least 1"));
            }
            if c.n_obs == 0 {
                return Err(err("env.n_obs: must be at least 1"));
            }
            if c.noise_std < 0.0 {
                return Err(err("env.noise_std: must be non-negative"));
            }
            Ok(EnvBuild::QuatWahba(c.clone(), cfg.master_seed))
        }
        EnvConfig::SpdWahba(c) => {
            if c.size == 0 {
                return Err(err("env.size: must be at least 1"));
            }
            if c.dim != 3 {
                return Err(err("env.dim: the spring model requires dim = 3"));
            }
            if c.n_obs == 0 {
                return Err(err("env.n_obs: must be at least 1"));
            }
            Ok(EnvBuild::SpdWahba(c.clone(), cfg.master_seed))
        }
        EnvConfig::QuatTraj(c) => {
            if c.horizon == 0 {
                return Err(err("env.horizon: must be at least 1"));
            }
            if !(0.0..std::f64::consts::FRAC_PI_2).contains(&c.amplitude) {
                return Err(err("env.amplitude: must lie in [0, \u{3c0}/2)"));
            }
            let targets = match &c.targets_file {
                Some(path) => {
                    let t =
                        read_quat_traj(path).map_err(|e| err(format!("env.targets_file: {e}")))?;
                    if t.len() != c.horizon + 1 {
                        return Err(err(format!(
                            "env.targets_file: contains {} points, horizon {} needs {}",
                            t.len(),
                            c.horizon,
                            c.horizon + 1
                        )));
                    }
                    t
                }
                None => gen_quat_traj(cfg.master_seed, c.seed, c.horizon + 1, c.amplitude),
            };
            Ok(EnvBuild::QuatTraj(targets))
        }
        EnvConfig::SpdTraj(c) => {
            if c.horizon == 0 {
                return Err(err("env.horizon: must be at least 1"));
            }
            if ![2usize, 3, 6].contains(&c.dim) {
                return Err(err("env.dim: supported sizes are 2, 3, 6"));
            }
            if c.spread < 0.0 {
                return Err(err("env.spread: must be non-negative"));
            }
            let targets = match &c.targets_file {
                Some(path) => {
                    let t =
                        read_spd_traj(path).map_err(|e| err(format!("env.targets_file: {e}")))?;
                    if t.len() != c.horizon + 1 {
                        return Err(err(format!(
                            "env.targets_file: contains {} points, horizon {} needs {}",
                            t.len(),
                            c.horizon,
                            c.horizon + 1
                        )));
                    }
                    if t.iter().any(|m| m.dim() != c.dim) {
                        return Err(err("env.targets_file: matrix size differs from env.dim"));
                    }
                    t
                }
                None => gen_spd_traj(cfg.master_seed, c.seed, c.horizon + 1, c.dim, c.spread),
            };
            Ok(EnvBuild::SpdTraj(targets))
        }
    }
}

fn resolve_base_p(
    entries: &[BasePointConfig],
    kinds: &[FactorKind],
) -> Result<CompositePoint, ConfigError> {
    if entries.len() != kinds.len() {
        return Err(err(format!(
            "policy.base_p: {} entries for {} factors",
            entries.len(),
            kinds.len()
        )));
    }
    let mut factors = Vec::with_capacity(entries.len());
    for (i, (entry, kind)) in entries.iter().zip(kinds.iter()).enumerate() {
        let factor = match (entry, kind) {
            (BasePointConfig::S3(v), FactorKind::S3) => Factor::S3(
                UnitQuaternion::new(v[0], v[1], v[2], v[3])
                    .map_err(|e| err(format!("policy.base_p[{i}]: {e}")))?,
            ),
            (BasePointConfig::Spd(rows), FactorKind::Spd(d)) => {
                if rows.len() != *d || rows.iter().any(|r| r.len() != *d) {
                    return Err(err(format!(
                        "policy.base_p[{i}]: expected a {d}x{d} matrix"
                    )));
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Factor::Spd(
                    SpdMatrix::new(nalgebra::DMatrix::from_row_slice(*d, *d, &flat))
                        .map_err(|e| err(format!("policy.base_p[{i}]: {e}")))?,
                )
            }
            (BasePointConfig::Euclid(v), FactorKind::Euclid(n)) => {
                if v.len() != *n {
                    return Err(err(format!("policy.base_p[{i}]: expected {n} values")));
                }
                Factor::Euclid(nalgebra::DVector::from_row_slice(v))
            }
            _ => {
                return Err(err(format!(
                    "policy.base_p[{i}]: entry kind does not match factor {kind:?}"
                )))
            }
        };
        factors.push(factor);
    }
    Ok(CompositePoint::new(factors))
}
