//! Seeded trial batches, success statistics, and sample-complexity tables.
//!
//! Every trial seed is `derive_seed(master_seed, [trial_index])`. Reports are
//! plain JSON with a `schema` field and are byte-identical for a fixed config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::Bandit;
use crate::error::{Error, Result};
use crate::geometry::min_hitting_set;
use crate::hard_instances::{decode_game_answer, gen_lb_1d, gen_lb_dd};
use crate::model::{Arm, Instance, Interval, RewardDistribution};
use crate::oracles::{verify_answers, Verdict};
use crate::range_search::{solve, Algorithm, BestMethod};
use crate::rng::{derive_seed, ArmStreams};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    #[default]
    Bernoulli,
    Constant,
}

/// Random instance: points uniform on `[0, span]`, means uniform on `[0, 1]^d`.
///
/// Without `clusters`, interval lengths are uniform on `[min_len, max_len]`.
/// With `clusters = k`, the span is cut into `k` equal blocks and interval `i`
/// lies strictly inside block `i mod k` across its centre, so the minimum
/// hitting set has exactly `min(k, q)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub q: usize,
    pub d: usize,
    pub seed: u64,
    #[serde(default = "default_span")]
    pub span: f64,
    #[serde(default = "default_min_len")]
    pub min_len: f64,
    #[serde(default = "default_max_len")]
    pub max_len: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    #[serde(default)]
    pub rewards: RewardKind,
}

fn default_span() -> f64 {
    100.0
}
fn default_min_len() -> f64 {
    5.0
}
fn default_max_len() -> f64 {
    30.0
}

impl RandomSpec {
    pub fn new(n: usize, q: usize, d: usize, seed: u64) -> Self {
        Self {
            n,
            q,
            d,
            seed,
            span: default_span(),
            min_len: default_min_len(),
            max_len: default_max_len(),
            clusters: None,
            rewards: RewardKind::default(),
        }
    }

    pub fn with_clusters(mut self, k: usize) -> Self {
        self.clusters = Some(k);
        self
    }

    pub fn generate(&self) -> Result<Instance> {
        if !(self.span > 0.0 && 0.0 < self.min_len && self.min_len <= self.max_len) {
            return Err(Error::InvalidParameter(
                "need 0 < min_len <= max_len and span > 0".into(),
            ));
        }
        if self.clusters == Some(0) {
            return Err(Error::InvalidParameter(
                "clusters must be at least 1".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let arms = (0..self.n)
            .map(|id| {
                let point = rng.random_range(0.0..=self.span);
                let w: Vec<f64> = (0..self.d).map(|_| rng.random::<f64>()).collect();
                let distribution = match self.rewards {
                    RewardKind::Bernoulli => RewardDistribution::bernoulli(w),
                    RewardKind::Constant => RewardDistribution::constant(w),
                };
                Arm {
                    id,
                    point,
                    distribution,
                }
            })
            .collect();
        let intervals = (0..self.q)
            .map(|i| match self.clusters {
                Some(k) => {
                    let width = self.span / k as f64;
                    let centre = (i % k) as f64 * width + width / 2.0;
                    let lo = rng.random_range(0.1..0.95) * width / 2.0;
                    let hi = rng.random_range(0.1..0.95) * width / 2.0;
                    Interval::new(centre - lo, centre + hi)
                }
                None => {
                    let len = rng.random_range(self.min_len..=self.max_len).min(self.span);
                    let left = rng.random_range(0.0..=self.span - len);
                    Interval::new(left, left + len)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.d, arms, intervals)
    }
}

/// Where a trial batch gets its instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InstanceSource {
    Path {
        path: String,
    },
    Random(RandomSpec),
    LowerBound1d {
        m: usize,
        eps: f64,
        tau: usize,
        seed: u64,
    },
    LowerBoundDd {
        m: usize,
        eps: f64,
        tau: usize,
        d: usize,
        seed: u64,
    },
}

impl InstanceSource {
    pub fn load(&self) -> Result<Instance> {
        match self {
            Self::Path { path } => Instance::load(path),
            Self::Random(spec) => spec.generate(),
            Self::LowerBound1d { m, eps, tau, seed } => gen_lb_1d(*m, *eps, *tau, *seed),
            Self::LowerBoundDd {
                m,
                eps,
                tau,
                d,
                seed,
            } => gen_lb_dd(*m, *eps, *tau, *d, *seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub best: BestMethod,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Tolerance used by the oracles; defaults to `eps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSource, algorithm: Algorithm, eps: f64, delta: f64) -> Self {
        Self {
            instance,
            algorithm,
            best: BestMethod::default(),
            eps,
            delta,
            trials: 1,
            master_seed: 0,
            verify_eps: None,
            output: None,
        }
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        for (name, v) in [("eps", self.eps), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    pub total_pulls: u64,
    /// `None` when the trial could not be verified; such trials are excluded
    /// from the aggregate.
    pub success: Option<bool>,
    /// Per interval; `None` for intervals holding no arm.
    pub verdicts: Vec<Option<Verdict>>,
    /// For lower-bound instances: did the decoded guess equal the hidden vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_won: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub d: usize,
    pub q: usize,
    pub tau: usize,
}

impl InstanceSummary {
    pub fn of(instance: &Instance) -> Self {
        Self {
            n: instance.num_arms(),
            d: instance.dimension(),
            q: instance.intervals().len(),
            tau: min_hitting_set(instance.intervals()).tau(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub verified_trials: usize,
    pub success_fraction: f64,
    pub mean_pulls: f64,
    /// `mean_pulls / bound_shape(...)`.
    pub bound_constant: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_win_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub instance: InstanceSummary,
    pub trials: Vec<TrialReport>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn meets(&self, min_success: f64) -> bool {
        self.aggregate.verified_trials > 0 && self.aggregate.success_fraction >= min_success
    }
}

/// `(n d / eps^2) * max(ln(tau d / (eps delta)), 1)`.
pub fn bound_shape(n: usize, d: usize, tau: usize, eps: f64, delta: f64) -> f64 {
    let log = ((tau.max(1) * d) as f64 / (eps * delta)).ln().max(1.0);
    (n * d) as f64 / (eps * eps) * log
}

fn run_trial(config: &ExperimentConfig, instance: &Instance, index: usize) -> Result<TrialReport> {
    let seed = derive_seed(config.master_seed, &[index as u64]);
    let bandit = Bandit::new(instance);
    let answers = solve(
        &bandit,
        config.algorithm,
        config.eps,
        config.delta,
        config.best,
        &ArmStreams::new(seed),
    )?;
    let verify_eps = config.verify_eps.unwrap_or(config.eps);
    let game_won = instance
        .game()
        .map(|g| decode_game_answer(&answers, instance).is_ok_and(|c| c == g.hidden_c));
    let mut trial = TrialReport {
        index,
        seed,
        total_pulls: answers.total_pulls(),
        success: None,
        verdicts: Vec::new(),
        game_won,
        note: None,
    };
    match verify_answers(instance, &answers, verify_eps) {
        Ok(v) => {
            trial.success = Some(v.all_ok);
            trial.verdicts = v.verdicts;
        }
        Err(e @ Error::OracleScaleExceeded { .. }) => {
            log::warn!("trial {index} left unverified: {e}");
            trial.note = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    Ok(trial)
}

#[cfg(feature = "parallel")]
fn run_trials(config: &ExperimentConfig, instance: &Instance) -> Result<Vec<TrialReport>> {
    use rayon::prelude::*;
    (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, instance, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_trials(config: &ExperimentConfig, instance: &Instance) -> Result<Vec<TrialReport>> {
    (0..config.trials)
        .map(|i| run_trial(config, instance, i))
        .collect()
}

/// Runs `config.trials` seeded trials on one instance and aggregates them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let instance = config.instance.load()?;
    run_experiment_on(config, &instance)
}

/// As [`run_experiment`], on an instance already in memory.
pub fn run_experiment_on(
    config: &ExperimentConfig,
    instance: &Instance,
) -> Result<ExperimentReport> {
    config.validate()?;
    let trials = run_trials(config, instance)?;
    let summary = InstanceSummary::of(instance);
    let verified: Vec<&TrialReport> = trials.iter().filter(|t| t.success.is_some()).collect();
    let successes = verified.iter().filter(|t| t.success == Some(true)).count();
    let mean_pulls = trials.iter().map(|t| t.total_pulls as f64).sum::<f64>() / trials.len() as f64;
    let games: Vec<bool> = trials.iter().filter_map(|t| t.game_won).collect();
    let aggregate = Aggregate {
        trials: trials.len(),
        verified_trials: verified.len(),
        success_fraction: if verified.is_empty() {
            0.0
        } else {
            successes as f64 / verified.len() as f64
        },
        mean_pulls,
        bound_constant: mean_pulls
            / bound_shape(summary.n, summary.d, summary.tau, config.eps, config.delta),
        game_win_fraction: (!games.is_empty())
            .then(|| games.iter().filter(|&&w| w).count() as f64 / games.len() as f64),
    };
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA,
        config: config.clone(),
        instance: summary,
        trials,
        aggregate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: Algorithm,
    pub best: BestMethod,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub mean_pulls: f64,
    pub bound_constant: f64,
    pub success_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub schema: u32,
    pub instance: InstanceSummary,
    pub rows: Vec<ComparisonRow>,
}

/// Runs every config on their shared instance and tabulates mean pulls.
pub fn compare_sample_complexity(configs: &[ExperimentConfig]) -> Result<ComparisonTable> {
    let first = configs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no configs".into()))?;
    if configs.iter().any(|c| c.instance != first.instance) {
        return Err(Error::ConfigMismatch);
    }
    let instance = first.instance.load()?;
    let rows = configs
        .iter()
        .map(|c| {
            let r = run_experiment_on(c, &instance)?;
            Ok(ComparisonRow {
                algorithm: c.algorithm,
                best: c.best,
                eps: c.eps,
                delta: c.delta,
                trials: c.trials,
                mean_pulls: r.aggregate.mean_pulls,
                bound_constant: r.aggregate.bound_constant,
                success_fraction: r.aggregate.success_fraction,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTable {
        schema: REPORT_SCHEMA,
        instance: InstanceSummary::of(&instance),
        rows,
    })
}
