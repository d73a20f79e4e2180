//! The sampling oracle seen by algorithms.
//!
//! A [`Bandit`] wraps an [`Instance`] and exposes only arm positions, the
//! query intervals, and sample access. True means stay behind this type, so
//! any algorithm written against `Bandit` cannot read them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::SampleLedger;
use crate::model::{ArmId, ArmPoints, Instance, Interval, WeightVector};
use crate::rng::ArmStreams;

/// Empirical mean of one arm, tagged with the accuracy its producer guarantees
/// on that producer's success event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub arm_id: ArmId,
    pub mean: Vec<f64>,
    pub accuracy: f64,
    pub pulls: u64,
}

impl Estimate {
    pub fn with_accuracy(mut self, accuracy: f64) -> Self {
        self.accuracy = accuracy;
        self
    }

    /// Strict componentwise dominance `self < other`.
    pub fn strictly_below(&self, other: &Estimate) -> bool {
        self.mean.iter().zip(&other.mean).all(|(a, b)| a < b)
    }
}

pub struct Bandit<'a> {
    instance: &'a Instance,
    ledger: SampleLedger,
}

impl<'a> Bandit<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Self {
            instance,
            ledger: SampleLedger::new(instance.num_arms()),
        }
    }

    pub fn dimension(&self) -> usize {
        self.instance.dimension()
    }

    pub fn num_arms(&self) -> usize {
        self.instance.num_arms()
    }

    pub fn point(&self, arm: ArmId) -> f64 {
        self.instance.points()[arm]
    }

    pub fn intervals(&self) -> &[Interval] {
        self.instance.intervals()
    }

    pub fn ledger(&self) -> &SampleLedger {
        &self.ledger
    }

    /// One independent draw from `arm`; the ledger grows by exactly one.
    pub fn sample_arm(&self, arm: ArmId, rng: &mut ArmStreams) -> Result<WeightVector> {
        let dist = &self.instance.arm(arm)?.distribution;
        let draw = dist.sample(rng.stream(arm));
        self.ledger.record(arm, 1);
        WeightVector::new(draw)
    }

    /// Componentwise average of `pull_count` draws, clamped to `[0, 1]`.
    ///
    /// The returned accuracy tag is the trivial bound 1; callers that hold a
    /// concentration guarantee replace it with [`Estimate::with_accuracy`].
    pub fn estimate_mean(
        &self,
        arm: ArmId,
        pull_count: u64,
        rng: &mut ArmStreams,
    ) -> Result<Estimate> {
        if pull_count == 0 {
            return Err(Error::InvalidBudget);
        }
        let dist = &self.instance.arm(arm)?.distribution;
        let mean = dist
            .sample_mean(pull_count, rng.stream(arm))
            .into_iter()
            .map(|v| v.clamp(0.0, 1.0))
            .collect();
        self.ledger.record(arm, pull_count);
        Ok(Estimate {
            arm_id: arm,
            mean,
            accuracy: 1.0,
            pulls: pull_count,
        })
    }
}

impl ArmPoints for Bandit<'_> {
    fn points(&self) -> &[f64] {
        self.instance.points()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Arm, RewardDistribution};

    fn single(dist: RewardDistribution) -> Instance {
        let d = dist.dimension();
        Instance::new(
            d,
            vec![Arm {
                id: 0,
                point: 0.0,
                distribution: dist,
            }],
            vec![Interval::new(-1.0, 1.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn constant_arm_always_returns_its_value() {
        let inst = single(RewardDistribution::constant(vec![0.7]));
        let bandit = Bandit::new(&inst);
        let mut rng = ArmStreams::new(1);
        for _ in 0..10 {
            assert_eq!(bandit.sample_arm(0, &mut rng).unwrap().values(), &[0.7]);
        }
        assert_eq!(bandit.ledger().total(), 10);
    }

    #[test]
    fn degenerate_bernoulli_is_deterministic() {
        let inst = single(RewardDistribution::bernoulli(vec![1.0, 0.0]));
        let bandit = Bandit::new(&inst);
        let mut rng = ArmStreams::new(2);
        for _ in 0..50 {
            assert_eq!(
                bandit.sample_arm(0, &mut rng).unwrap().values(),
                &[1.0, 0.0]
            );
        }
    }

    #[test]
    fn bernoulli_law_of_large_numbers() {
        let inst = single(RewardDistribution::bernoulli(vec![0.25]));
        let bandit = Bandit::new(&inst);
        let mut rng = ArmStreams::new(42);
        let sum: f64 = (0..100_000)
            .map(|_| bandit.sample_arm(0, &mut rng).unwrap()[0])
            .sum();
        assert!((sum / 100_000.0 - 0.25).abs() < 0.01);
    }

    #[test]
    fn estimate_mean_of_constant_and_ledger_delta() {
        let inst = single(RewardDistribution::constant(vec![0.3, 0.9]));
        let bandit = Bandit::new(&inst);
        let mut rng = ArmStreams::new(3);
        let est = bandit.estimate_mean(0, 5, &mut rng).unwrap();
        assert_eq!(est.mean, vec![0.3, 0.9]);
        assert_eq!(bandit.ledger().total(), 5);
        bandit.estimate_mean(0, 17, &mut rng).unwrap();
        assert_eq!(bandit.ledger().pulls(0), 22);
    }

    #[test]
    fn estimate_mean_bernoulli_half() {
        let inst = single(RewardDistribution::bernoulli(vec![0.5]));
        let bandit = Bandit::new(&inst);
        let est = bandit
            .estimate_mean(0, 10_000, &mut ArmStreams::new(11))
            .unwrap();
        assert!((est.mean[0] - 0.5).abs() < 0.02);
    }

    #[test]
    fn errors() {
        let inst = single(RewardDistribution::constant(vec![0.5]));
        let bandit = Bandit::new(&inst);
        let mut rng = ArmStreams::new(0);
        assert!(matches!(
            bandit.estimate_mean(0, 0, &mut rng),
            Err(Error::InvalidBudget)
        ));
        assert!(matches!(
            bandit.sample_arm(3, &mut rng),
            Err(Error::InvalidArm(3))
        ));
        assert!(matches!(
            bandit.estimate_mean(3, 1, &mut rng),
            Err(Error::InvalidArm(3))
        ));
        assert_eq!(bandit.ledger().total(), 0);
    }
}
