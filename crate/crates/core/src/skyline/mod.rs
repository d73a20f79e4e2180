//! PAC skylines over arms on a line with `d`-dimensional weights.
//!
//! [`d_lsky`] returns, with probability at least `1 - delta`, a set `L` of arms
//! of an interval `J = [l, r]` such that
//!
//! 1. every arm `b` of `J` has some `beta` in `L` with `p_beta >= p_b` and
//!    `mu_beta >= mu_b - eps` componentwise, and
//! 2. no arm of `L` is beaten by `eps` in every coordinate by an arm at or to
//!    its right.
//!
//! The elimination loop buckets arm estimates into cubes of side `eps_t / 4`
//! and, in every crowded cube, drops the half of the arms that sit furthest
//! left. Once few arms remain they are sampled to accuracy `eps_T` and the
//! ones dominated (in estimate) by an arm to their right are pruned.
//! [`d_rsky`] is the mirror image, obtained by negating positions.

mod lattice;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use lattice::{cube_of, snapped_ceil, CubeIndex, Lattice};

use crate::bandit::{Bandit, Estimate};
use crate::error::{Error, Result};
use crate::geometry::arms_in_interval;
use crate::model::{ArmId, Interval};
use crate::rng::ArmStreams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn orient(self, p: f64) -> f64 {
        match self {
            Side::Left => p,
            Side::Right => -p,
        }
    }
}

/// `eps_t = (3/4)^(t-1) * eps / 5`.
pub fn epsilon_at(eps: f64, t: u32) -> f64 {
    0.75f64.powi(t as i32 - 1) * eps / 5.0
}

/// `delta_t = (1/2)^(t-1) * delta / 2`.
pub fn delta_at(delta: f64, t: u32) -> f64 {
    0.5f64.powi(t as i32 - 1) * delta / 2.0
}

/// Cubes per axis at accuracy `eps_t`, i.e. `ceil(4 / eps_t)`.
pub fn cubes_per_axis(eps_t: f64) -> f64 {
    snapped_ceil(4.0 / eps_t)
}

/// The elimination loop runs while more than this many arms remain.
pub fn loop_threshold(eps_t: f64, d: usize) -> f64 {
    120.0 * cubes_per_axis(eps_t).powi(d as i32)
}

/// Pulls per arm in one elimination round:
/// `ceil(8 / eps_t^2 * ln(ceil(4/eps_t)^d * 50 d / delta_t))`.
pub fn iteration_pulls(eps_t: f64, delta_t: f64, d: usize) -> u64 {
    let d_f = d as f64;
    let log_arg = d_f * cubes_per_axis(eps_t).ln() + (50.0 * d_f / delta_t).ln();
    (8.0 / (eps_t * eps_t) * log_arg).ceil().max(1.0) as u64
}

/// Pulls per arm in the final stage: `ceil(1 / eps_T^2 * ln(|A_T| d / delta_T))`.
pub fn final_pulls(eps_t: f64, delta_t: f64, active: usize, d: usize) -> u64 {
    let log_arg = ((active * d) as f64 / delta_t).ln();
    (log_arg / (eps_t * eps_t)).ceil().max(1.0) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: u32,
    pub epsilon_t: f64,
    pub delta_t: f64,
    pub active: usize,
    pub cubes_per_axis: f64,
    pub pulls_per_arm: u64,
    pub occupied_cubes: usize,
    pub crowded_cubes: usize,
    pub drop_threshold: f64,
    pub dropped_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalStage {
    pub t: u32,
    pub epsilon_t: f64,
    pub delta_t: f64,
    pub active: usize,
    pub pulls_per_arm: u64,
    pub pruned_count: usize,
    pub returned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkylineRunTrace {
    pub side: Side,
    pub eps: f64,
    pub delta: f64,
    pub dimension: usize,
    pub initial_arms: usize,
    pub iterations: Vec<IterationRecord>,
    pub final_stage: FinalStage,
    pub total_pulls: u64,
}

impl SkylineRunTrace {
    /// Active-set sizes `|A_1|, ..., |A_T|`.
    pub fn active_sizes(&self) -> Vec<usize> {
        self.iterations
            .iter()
            .map(|it| it.active)
            .chain(std::iter::once(self.final_stage.active))
            .collect()
    }

    /// `|A_{t+1}| <= 11/20 |A_t|` after every executed round.
    pub fn shrink_holds(&self) -> bool {
        self.active_sizes()
            .windows(2)
            .all(|w| 20 * w[1] <= 11 * w[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkylineOutput {
    /// Returned arms in id order.
    pub arms: Vec<ArmId>,
    /// Final-stage estimates of the returned arms, in the same order.
    pub estimates: Vec<Estimate>,
    pub trace: SkylineRunTrace,
}

/// Splits arms at the median position: the `floor(k/2)` arms first in
/// `(point, id)` order are dropped, the rest kept.
pub fn median_split(arms: &[(ArmId, f64)]) -> (Vec<ArmId>, Vec<ArmId>) {
    let mut sorted = arms.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let cut = sorted.len() / 2;
    let dropped = sorted[..cut].iter().map(|a| a.0).collect();
    let kept = sorted[cut..].iter().map(|a| a.0).collect();
    (kept, dropped)
}

fn check_params(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1], got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Left skyline of the arms inside `interval`.
pub fn d_lsky(
    bandit: &Bandit<'_>,
    interval: &Interval,
    eps: f64,
    delta: f64,
    rng: &mut ArmStreams,
) -> Result<SkylineOutput> {
    skyline_of_arms(
        bandit,
        &arms_in_interval(bandit, interval),
        Side::Left,
        eps,
        delta,
        rng,
    )
}

/// Right skyline of the arms inside `interval`.
pub fn d_rsky(
    bandit: &Bandit<'_>,
    interval: &Interval,
    eps: f64,
    delta: f64,
    rng: &mut ArmStreams,
) -> Result<SkylineOutput> {
    skyline_of_arms(
        bandit,
        &arms_in_interval(bandit, interval),
        Side::Right,
        eps,
        delta,
        rng,
    )
}

/// Skyline of an explicit arm set.
pub fn skyline_of_arms(
    bandit: &Bandit<'_>,
    arms: &[ArmId],
    side: Side,
    eps: f64,
    delta: f64,
    rng: &mut ArmStreams,
) -> Result<SkylineOutput> {
    check_params(eps, delta)?;
    if arms.is_empty() {
        return Err(Error::EmptyArmSet);
    }
    if let Some(&bad) = arms.iter().find(|&&a| a >= bandit.num_arms()) {
        return Err(Error::InvalidArm(bad));
    }
    let d = bandit.dimension();
    let before = bandit.ledger().snapshot();
    let position = |a: ArmId| side.orient(bandit.point(a));

    let mut active: Vec<ArmId> = arms.to_vec();
    active.sort_unstable();
    active.dedup();
    let initial_arms = active.len();
    let mut iterations = Vec::new();
    let mut t: u32 = 1;

    while (active.len() as f64) > loop_threshold(epsilon_at(eps, t), d) {
        let eps_t = epsilon_at(eps, t);
        let delta_t = delta_at(delta, t);
        let pulls = iteration_pulls(eps_t, delta_t, d);
        let lattice = Lattice::new(eps_t / 4.0, d)?;

        let mut cubes: BTreeMap<CubeIndex, Vec<(ArmId, f64)>> = BTreeMap::new();
        for &a in &active {
            let est = bandit.estimate_mean(a, pulls, rng)?;
            cubes
                .entry(lattice.cube_of(&est.mean))
                .or_default()
                .push((a, position(a)));
        }

        let cubes_axis = cubes_per_axis(eps_t);
        let drop_threshold = active.len() as f64 / 10.0 / cubes_axis.powi(d as i32);
        let mut dropped: Vec<ArmId> = Vec::new();
        let mut crowded = 0;
        for members in cubes.values() {
            if members.len() as f64 > drop_threshold {
                crowded += 1;
                dropped.extend(median_split(members).1);
            }
        }
        dropped.sort_unstable();

        iterations.push(IterationRecord {
            t,
            epsilon_t: eps_t,
            delta_t,
            active: active.len(),
            cubes_per_axis: cubes_axis,
            pulls_per_arm: pulls,
            occupied_cubes: cubes.len(),
            crowded_cubes: crowded,
            drop_threshold,
            dropped_count: dropped.len(),
        });
        active.retain(|a| dropped.binary_search(a).is_err());
        t += 1;
    }

    let eps_t = epsilon_at(eps, t);
    let delta_t = delta_at(delta, t);
    let pulls = final_pulls(eps_t, delta_t, active.len(), d);
    let estimates = active
        .iter()
        .map(|&a| {
            bandit
                .estimate_mean(a, pulls, rng)
                .map(|e| e.with_accuracy(eps))
        })
        .collect::<Result<Vec<_>>>()?;

    // Drop z when some x at or to its right has a strictly larger estimate
    // in every coordinate.
    let keep: Vec<bool> = estimates
        .iter()
        .map(|z| {
            !estimates
                .iter()
                .any(|x| position(z.arm_id) <= position(x.arm_id) && z.strictly_below(x))
        })
        .collect();
    let pruned_count = keep.iter().filter(|k| !**k).count();
    let estimates: Vec<Estimate> = estimates
        .into_iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(e, _)| e)
        .collect();
    let arms: Vec<ArmId> = estimates.iter().map(|e| e.arm_id).collect();

    let final_stage = FinalStage {
        t,
        epsilon_t: eps_t,
        delta_t,
        active: active.len(),
        pulls_per_arm: pulls,
        pruned_count,
        returned: arms.len(),
    };
    let total_pulls = bandit.ledger().snapshot().since(&before).total;
    Ok(SkylineOutput {
        arms,
        estimates,
        trace: SkylineRunTrace {
            side,
            eps,
            delta,
            dimension: d,
            initial_arms,
            iterations,
            final_stage,
            total_pulls,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Arm, Instance, RewardDistribution};

    fn constant_instance(points_weights: &[(f64, Vec<f64>)]) -> Instance {
        let d = points_weights[0].1.len();
        let arms = points_weights
            .iter()
            .enumerate()
            .map(|(id, (p, w))| Arm {
                id,
                point: *p,
                distribution: RewardDistribution::constant(w.clone()),
            })
            .collect();
        Instance::new(d, arms, vec![Interval::new(-100.0, 100.0).unwrap()]).unwrap()
    }

    fn whole() -> Interval {
        Interval::new(-100.0, 100.0).unwrap()
    }

    #[test]
    fn median_split_examples() {
        let pts = |ps: &[f64]| {
            ps.iter()
                .enumerate()
                .map(|(i, &p)| (i, p))
                .collect::<Vec<_>>()
        };
        assert_eq!(
            median_split(&pts(&[1.0, 2.0, 3.0, 4.0])),
            (vec![2, 3], vec![0, 1])
        );
        assert_eq!(median_split(&pts(&[1.0, 2.0, 3.0])), (vec![1, 2], vec![0]));
        assert_eq!(
            median_split(&[(5, 1.0), (2, 1.0), (9, 1.0), (4, 1.0)]),
            (vec![5, 9], vec![2, 4])
        );
        assert_eq!(median_split(&[(3, 0.0)]), (vec![3], vec![]));
    }

    #[test]
    fn singleton_returns_itself_with_final_stage_pulls() {
        let inst = constant_instance(&[(0.0, vec![0.4])]);
        let bandit = Bandit::new(&inst);
        let out = d_lsky(&bandit, &whole(), 0.5, 0.1, &mut ArmStreams::new(1)).unwrap();
        assert_eq!(out.arms, vec![0]);
        let expected = final_pulls(0.1, 0.05, 1, 1);
        assert_eq!(out.trace.final_stage.pulls_per_arm, expected);
        assert_eq!(bandit.ledger().total(), expected);
        assert!(out.trace.iterations.is_empty());
    }

    #[test]
    fn decreasing_weights_all_survive() {
        let inst = constant_instance(&[(1.0, vec![0.9]), (2.0, vec![0.5]), (3.0, vec![0.1])]);
        let bandit = Bandit::new(&inst);
        let out = d_lsky(&bandit, &whole(), 0.05, 0.1, &mut ArmStreams::new(2)).unwrap();
        assert_eq!(out.arms, vec![0, 1, 2]);
    }

    #[test]
    fn dominated_left_arm_is_pruned() {
        let inst = constant_instance(&[(1.0, vec![0.1]), (2.0, vec![0.9])]);
        let bandit = Bandit::new(&inst);
        let out = d_lsky(&bandit, &whole(), 0.05, 0.1, &mut ArmStreams::new(3)).unwrap();
        assert_eq!(out.arms, vec![1]);
        assert_eq!(out.trace.final_stage.pruned_count, 1);
    }

    #[test]
    fn right_skyline_mirrors_left() {
        let inst = constant_instance(&[(1.0, vec![0.1]), (2.0, vec![0.5]), (3.0, vec![0.9])]);
        let bandit = Bandit::new(&inst);
        let right = d_rsky(&bandit, &whole(), 0.05, 0.1, &mut ArmStreams::new(4)).unwrap();
        assert_eq!(right.arms, vec![0, 1, 2]);
        let left = d_lsky(&bandit, &whole(), 0.05, 0.1, &mut ArmStreams::new(4)).unwrap();
        assert_eq!(left.arms, vec![2]);
    }

    #[test]
    fn equal_points_with_equal_weights_are_kept() {
        let inst = constant_instance(&[(1.0, vec![0.5, 0.5]), (1.0, vec![0.5, 0.5])]);
        let bandit = Bandit::new(&inst);
        let out = d_lsky(&bandit, &whole(), 0.2, 0.1, &mut ArmStreams::new(5)).unwrap();
        assert_eq!(out.arms, vec![0, 1]);
    }

    #[test]
    fn errors() {
        let inst = constant_instance(&[(0.0, vec![0.4])]);
        let bandit = Bandit::new(&inst);
        let empty = Interval::new(10.0, 11.0).unwrap();
        let mut rng = ArmStreams::new(0);
        assert!(matches!(
            d_lsky(&bandit, &empty, 0.1, 0.1, &mut rng),
            Err(Error::EmptyArmSet)
        ));
        assert!(d_lsky(&bandit, &whole(), 0.0, 0.1, &mut rng).is_err());
        assert!(d_lsky(&bandit, &whole(), 0.1, 1.0, &mut rng).is_err());
    }

    #[test]
    fn schedules() {
        assert_eq!(epsilon_at(1.0, 1), 0.2);
        assert!((epsilon_at(1.0, 3) - 0.2 * 0.5625).abs() < 1e-15);
        assert_eq!(delta_at(0.1, 1), 0.05);
        assert_eq!(delta_at(0.1, 4), 0.05 / 8.0);
        assert_eq!(loop_threshold(0.2, 1), 2400.0);
        let tail: f64 = (1..200).map(|t| epsilon_at(0.3, t)).sum();
        assert!((tail - 0.8 * 0.3).abs() < 1e-12);
    }
}
