use serde::{Deserialize, Serialize};

use crate::bandit::{Bandit, Estimate};
use crate::error::{Error, Result};
use crate::geometry::arms_in_interval;
use crate::model::{ArmId, Interval};
use crate::rng::ArmStreams;

/// Implementation of the single-interval best-arm subroutine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BestMethod {
    /// Uniform sampling, then empirical argmax.
    Naive,
    /// Median elimination.
    #[default]
    MedianElim,
}

impl std::str::FromStr for BestMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "median-elim" | "median_elimination" => Ok(Self::MedianElim),
            other => Err(Error::InvalidParameter(format!(
                "unknown best-arm method {other:?}"
            ))),
        }
    }
}

/// Pulls per arm for uniform sampling: `ceil(2 / eps^2 * ln(2 n / delta))`.
pub fn naive_best_pulls(eps: f64, delta: f64, n: usize) -> u64 {
    (2.0 / (eps * eps) * (2.0 * n as f64 / delta).ln())
        .ceil()
        .max(1.0) as u64
}

/// Pulls per surviving arm in median-elimination round with `(eps_l, delta_l)`.
pub fn median_elim_pulls(eps_l: f64, delta_l: f64) -> u64 {
    (4.0 / (eps_l * eps_l) * (3.0 / delta_l).ln())
        .ceil()
        .max(1.0) as u64
}

/// Pulls of the fresh estimate taken of the median-elimination winner:
/// Hoeffding at accuracy `eps` and failure `delta / 2`.
pub fn winner_estimate_pulls(eps: f64, delta: f64) -> u64 {
    ((4.0 / delta).ln() / (2.0 * eps * eps)).ceil().max(1.0) as u64
}

/// Returns an `eps`-optimal arm of `interval` with an `eps`-accurate estimate,
/// both with probability at least `1 - delta`.
pub fn best_arm(
    bandit: &Bandit<'_>,
    interval: &Interval,
    eps: f64,
    delta: f64,
    rng: &mut ArmStreams,
    method: BestMethod,
) -> Result<(ArmId, Estimate)> {
    if bandit.dimension() != 1 {
        return Err(Error::WrongDimension {
            expected: 1,
            found: bandit.dimension(),
        });
    }
    best_of_arms(
        bandit,
        &arms_in_interval(bandit, interval),
        eps,
        delta,
        rng,
        method,
    )
}

pub(crate) fn best_of_arms(
    bandit: &Bandit<'_>,
    arms: &[ArmId],
    eps: f64,
    delta: f64,
    rng: &mut ArmStreams,
    method: BestMethod,
) -> Result<(ArmId, Estimate)> {
    if arms.is_empty() {
        return Err(Error::EmptyArmSet);
    }
    match method {
        BestMethod::Naive => {
            let pulls = naive_best_pulls(eps, delta, arms.len());
            let mut best: Option<Estimate> = None;
            for &a in arms {
                let est = bandit.estimate_mean(a, pulls, rng)?;
                if best.as_ref().is_none_or(|b| est.mean[0] > b.mean[0]) {
                    best = Some(est);
                }
            }
            let best = best.expect("arms is non-empty").with_accuracy(eps);
            Ok((best.arm_id, best))
        }
        BestMethod::MedianElim => {
            // Half the failure budget selects the arm, half certifies its estimate.
            let winner = median_elimination(bandit, arms, eps, delta / 2.0, rng)?;
            let est = bandit
                .estimate_mean(winner, winner_estimate_pulls(eps, delta), rng)?
                .with_accuracy(eps);
            Ok((winner, est))
        }
    }
}

/// Median elimination: returns an `eps`-optimal arm with probability `1 - delta`.
///
/// Round `l` runs at `eps_l = (3/4)^(l-1) eps / 4` and `delta_l = delta / 2^l`,
/// and keeps the better half of the survivors (ties to the lower id).
pub fn median_elimination(
    bandit: &Bandit<'_>,
    arms: &[ArmId],
    eps: f64,
    delta: f64,
    rng: &mut ArmStreams,
) -> Result<ArmId> {
    let mut survivors: Vec<ArmId> = arms.to_vec();
    survivors.sort_unstable();
    survivors.dedup();
    if survivors.is_empty() {
        return Err(Error::EmptyArmSet);
    }
    let mut eps_l = eps / 4.0;
    let mut delta_l = delta / 2.0;
    while survivors.len() > 1 {
        let pulls = median_elim_pulls(eps_l, delta_l);
        let mut scored = survivors
            .iter()
            .map(|&a| bandit.estimate_mean(a, pulls, rng).map(|e| (a, e.mean[0])))
            .collect::<Result<Vec<_>>>()?;
        scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        scored.truncate(scored.len().div_ceil(2));
        survivors = scored.into_iter().map(|(a, _)| a).collect();
        eps_l *= 0.75;
        delta_l /= 2.0;
    }
    Ok(survivors[0])
}
