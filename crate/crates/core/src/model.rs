//! Problem-instance data model: arms on the real line with hidden reward
//! distributions, and the query intervals to answer.
//!
//! An [`Instance`] is trusted ground truth. It carries the analytic mean of
//! every arm, which only the [`oracles`](crate::oracles) read. Algorithms never
//! see an `Instance` directly; they work through a [`Bandit`](crate::Bandit).

use std::path::Path;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hard_instances::GameRecord;

pub type ArmId = usize;

/// Tolerance used when comparing a stored mean against its analytic value.
const MEAN_TOLERANCE: f64 = 1e-9;

/// A point of `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInstance(
                "weight vector must have d >= 1".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInstance(format!(
                "weight component {v} outside [0,1]"
            )));
        }
        Ok(Self(values))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Reward distribution of a single arm. Every kind is supported on `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RewardDistribution {
    /// Independent Bernoulli coordinates.
    BernoulliVector { probabilities: Vec<f64> },
    /// Deterministic reward.
    Constant { values: Vec<f64> },
    /// One shared `Ber(base)` draw `a` plus independent `Ber(shifts[k])` draws
    /// `b_k`, reported as `((a + b_1) / 2, ..., (a + b_d) / 2)`.
    ShiftedBernoulliSum { base: f64, shifts: Vec<f64> },
}

impl RewardDistribution {
    pub fn bernoulli(probabilities: Vec<f64>) -> Self {
        Self::BernoulliVector { probabilities }
    }

    pub fn constant(values: Vec<f64>) -> Self {
        Self::Constant { values }
    }

    pub fn shifted_sum(base: f64, shifts: Vec<f64>) -> Self {
        Self::ShiftedBernoulliSum { base, shifts }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::BernoulliVector { probabilities } => probabilities.len(),
            Self::Constant { values } => values.len(),
            Self::ShiftedBernoulliSum { shifts, .. } => shifts.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match self {
            Self::BernoulliVector { probabilities } => probabilities.clone(),
            Self::Constant { values } => values.clone(),
            Self::ShiftedBernoulliSum { base, shifts } => std::iter::once(*base)
                .chain(shifts.iter().copied())
                .collect(),
        };
        if self.dimension() == 0 {
            return Err(Error::InvalidInstance(
                "distribution has dimension 0".into(),
            ));
        }
        if let Some(p) = params.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidInstance(format!(
                "distribution parameter {p} outside [0,1]"
            )));
        }
        Ok(())
    }

    /// Closed-form mean.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::BernoulliVector { probabilities } => probabilities.clone(),
            Self::Constant { values } => values.clone(),
            Self::ShiftedBernoulliSum { base, shifts } => {
                shifts.iter().map(|s| (base + s) / 2.0).collect()
            }
        }
    }

    /// Closed-form per-coordinate variance.
    pub fn variance(&self) -> Vec<f64> {
        match self {
            Self::BernoulliVector { probabilities } => {
                probabilities.iter().map(|p| p * (1.0 - p)).collect()
            }
            Self::Constant { values } => vec![0.0; values.len()],
            Self::ShiftedBernoulliSum { base, shifts } => shifts
                .iter()
                .map(|s| (base * (1.0 - base) + s * (1.0 - s)) / 4.0)
                .collect(),
        }
    }

    /// One reward draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Self::BernoulliVector { probabilities } => probabilities
                .iter()
                .map(|&p| if rng.random_bool(p) { 1.0 } else { 0.0 })
                .collect(),
            Self::Constant { values } => values.clone(),
            Self::ShiftedBernoulliSum { base, shifts } => {
                let alpha = u8::from(rng.random_bool(*base));
                shifts
                    .iter()
                    .map(|&s| f64::from(alpha + u8::from(rng.random_bool(s))) / 2.0)
                    .collect()
            }
        }
    }

    /// Componentwise average of `count` independent draws.
    ///
    /// Sums of Bernoulli draws are drawn directly from the matching binomial,
    /// which has exactly the distribution of the per-draw sum. The shared
    /// `alpha` of [`ShiftedBernoulliSum`](Self::ShiftedBernoulliSum) enters every
    /// coordinate through the same binomial total.
    pub fn sample_mean<R: Rng + ?Sized>(&self, count: u64, rng: &mut R) -> Vec<f64> {
        debug_assert!(count > 0);
        let n = count as f64;
        match self {
            Self::BernoulliVector { probabilities } => probabilities
                .iter()
                .map(|&p| binomial(count, p, rng) as f64 / n)
                .collect(),
            Self::Constant { values } => values.clone(),
            Self::ShiftedBernoulliSum { base, shifts } => {
                let alpha = binomial(count, *base, rng);
                shifts
                    .iter()
                    .map(|&s| (alpha + binomial(count, s, rng)) as f64 / (2.0 * n))
                    .collect()
            }
        }
    }
}

fn binomial<R: Rng + ?Sized>(count: u64, p: f64, rng: &mut R) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        count
    } else {
        Binomial::new(count, p)
            .expect("p validated in [0,1]")
            .sample(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub id: ArmId,
    pub point: f64,
    pub distribution: RewardDistribution,
}

/// Closed query interval `[left, right]` with `left < right`.
///
/// Infinite endpoints are allowed; they appear only in slabs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    left: f64,
    right: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.left, raw.right)
    }
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if left.is_nan() || right.is_nan() || left >= right {
            return Err(Error::InvalidInstance(format!(
                "interval [{left}, {right}] must have left < right"
            )));
        }
        Ok(Self { left, right })
    }

    pub fn contains(&self, point: f64) -> bool {
        self.left <= point && point <= self.right
    }

    /// Mirror image under `p -> -p`.
    pub fn negated(&self) -> Self {
        Self {
            left: -self.right,
            right: -self.left,
        }
    }
}

/// Read access to arm positions, shared by instances and bandits.
pub trait ArmPoints {
    fn points(&self) -> &[f64];
}

/// A problem instance: arms, query intervals, and the weight dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    dimension: usize,
    arms: Vec<Arm>,
    points: Vec<f64>,
    means: Vec<Vec<f64>>,
    intervals: Vec<Interval>,
    game: Option<GameRecord>,
}

impl Instance {
    /// Builds an instance. Arms are reordered by id, and ids must be `0..n`.
    pub fn new(dimension: usize, mut arms: Vec<Arm>, intervals: Vec<Interval>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInstance("dimension must be >= 1".into()));
        }
        if arms.is_empty() {
            return Err(Error::InvalidInstance(
                "instance needs at least one arm".into(),
            ));
        }
        if intervals.is_empty() {
            return Err(Error::InvalidInstance(
                "instance needs at least one interval".into(),
            ));
        }
        arms.sort_by_key(|a| a.id);
        for (i, arm) in arms.iter().enumerate() {
            if arm.id != i {
                return Err(Error::InvalidInstance(format!(
                    "arm ids must be exactly 0..{}, found id {} at position {i}",
                    arms.len(),
                    arm.id
                )));
            }
            if !arm.point.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "arm {i} has non-finite point"
                )));
            }
            arm.distribution.validate()?;
            if arm.distribution.dimension() != dimension {
                return Err(Error::InvalidInstance(format!(
                    "arm {i} has dimension {}, instance declares {dimension}",
                    arm.distribution.dimension()
                )));
            }
        }
        for iv in &intervals {
            if !iv.left.is_finite() || !iv.right.is_finite() {
                return Err(Error::InvalidInstance(
                    "query intervals must be finite".into(),
                ));
            }
        }
        let points = arms.iter().map(|a| a.point).collect();
        let means = arms.iter().map(|a| a.distribution.mean()).collect();
        Ok(Self {
            dimension,
            arms,
            points,
            means,
            intervals,
            game: None,
        })
    }

    pub fn with_game(mut self, game: GameRecord) -> Self {
        self.game = Some(game);
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn arm(&self, id: ArmId) -> Result<&Arm> {
        self.arms.get(id).ok_or(Error::InvalidArm(id))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn game(&self) -> Option<&GameRecord> {
        self.game.as_ref()
    }

    /// Hidden true mean of an arm. Oracle-side only.
    pub fn true_mean(&self, id: ArmId) -> &[f64] {
        &self.means[id]
    }

    /// Swaps the reward distribution of one arm, keeping its id and point.
    pub fn replace_distribution(&mut self, id: ArmId, dist: RewardDistribution) -> Result<()> {
        dist.validate()?;
        if dist.dimension() != self.dimension {
            return Err(Error::InvalidInstance(
                "replacement has the wrong dimension".into(),
            ));
        }
        let arm = self.arms.get_mut(id).ok_or(Error::InvalidArm(id))?;
        self.means[id] = dist.mean();
        arm.distribution = dist;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

impl ArmPoints for Instance {
    fn points(&self) -> &[f64] {
        &self.points
    }
}

/// On-disk layout of an instance.
#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    dimension: usize,
    arms: Vec<ArmRecord>,
    intervals: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hidden: Option<GameRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ArmRecord {
    id: ArmId,
    point: f64,
    distribution: RewardDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<Vec<f64>>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        Self {
            dimension: inst.dimension,
            arms: inst
                .arms
                .iter()
                .map(|a| ArmRecord {
                    id: a.id,
                    point: a.point,
                    distribution: a.distribution.clone(),
                    mean: Some(inst.means[a.id].clone()),
                })
                .collect(),
            intervals: inst.intervals.clone(),
            hidden: inst.game.clone(),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let mut stored = Vec::with_capacity(file.arms.len());
        let arms = file
            .arms
            .into_iter()
            .map(|r| {
                stored.push((r.id, r.mean));
                Arm {
                    id: r.id,
                    point: r.point,
                    distribution: r.distribution,
                }
            })
            .collect();
        let mut inst = Instance::new(file.dimension, arms, file.intervals)?;
        for (id, mean) in stored {
            let Some(mean) = mean else { continue };
            let analytic = inst.true_mean(id);
            let matches = mean.len() == analytic.len()
                && mean
                    .iter()
                    .zip(analytic)
                    .all(|(a, b)| (a - b).abs() <= MEAN_TOLERANCE);
            if !matches {
                return Err(Error::InvalidInstance(format!(
                    "stored mean of arm {id} disagrees with its distribution"
                )));
            }
        }
        inst.game = file.hidden;
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arm(id: usize, point: f64, dist: RewardDistribution) -> Arm {
        Arm {
            id,
            point,
            distribution: dist,
        }
    }

    #[test]
    fn shifted_sum_mean_is_halved_sum() {
        let d = RewardDistribution::shifted_sum(0.25, vec![0.0, 0.5]);
        assert_eq!(d.mean(), vec![0.125, 0.375]);
    }

    #[test]
    fn rejects_bad_intervals_and_ids() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        let arms = vec![arm(1, 0.0, RewardDistribution::constant(vec![0.5]))];
        let iv = vec![Interval::new(0.0, 1.0).unwrap()];
        assert!(Instance::new(1, arms, iv).is_err());
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let arms = vec![
            arm(0, 0.0, RewardDistribution::constant(vec![0.5])),
            arm(1, 1.0, RewardDistribution::constant(vec![0.5, 0.2])),
        ];
        let iv = vec![Interval::new(0.0, 1.0).unwrap()];
        assert!(Instance::new(1, arms, iv).is_err());
    }

    #[test]
    fn json_round_trip_and_mean_check() {
        let arms = vec![
            arm(0, 0.5, RewardDistribution::bernoulli(vec![0.25, 0.75])),
            arm(
                1,
                1.5,
                RewardDistribution::shifted_sum(0.5, vec![0.25, 0.0]),
            ),
        ];
        let inst = Instance::new(2, arms, vec![Interval::new(0.0, 2.0).unwrap()]).unwrap();
        let text = inst.to_json().unwrap();
        assert!(text.contains("\"kind\": \"bernoulli_vector\""));
        assert_eq!(Instance::from_json(&text).unwrap(), inst);

        let tampered = text.replacen("0.375", "0.9", 1);
        assert!(matches!(
            Instance::from_json(&tampered),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn interval_file_rejects_empty_interior() {
        let text = r#"{"dimension":1,"arms":[{"id":0,"point":0.0,"distribution":{"kind":"constant","values":[0.5]}}],
            "intervals":[{"left":1.0,"right":1.0}]}"#;
        assert!(Instance::from_json(text).is_err());
    }
}
