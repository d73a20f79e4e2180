//! Brute-force verifiers over true means.
//!
//! These read hidden means through [`Instance::true_mean`] and are the ground
//! truth every algorithm is judged against. They are quadratic in the number
//! of arms and make no attempt to be clever.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{arms_in_interval, candidate_points, min_hitting_set, HittingSet};
use crate::model::{ArmId, ArmPoints, Instance, Interval};
use crate::range_search::{AnswerMode, AnswerSet};
use crate::skyline::{Lattice, Side};

/// Largest interval count [`brute_min_hitting_set`] accepts.
pub const BRUTE_HITTING_SET_MAX: usize = 14;

/// Largest arm count [`verify_answers`] accepts; the checks are quadratic.
pub const VERIFY_MAX_ARMS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    EpsOptimal,
    ParetoCoverage,
    ParetoDomination,
    SkylineCoverage,
    SkylineDomination,
    FormsDisagree,
    OutsideInterval,
    MissingAnswer,
    HittingSetSize,
    UniqueParetoOptimum,
    CannotDominate,
    Containment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: Condition,
    /// Offending arms: typically `[arm, other]`.
    pub arms: Vec<ArmId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<usize>,
}

/// Outcome of a check. `witness` is present exactly when `ok` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Self {
            ok: true,
            witness: None,
        }
    }

    pub fn fail(condition: Condition, arms: Vec<ArmId>) -> Self {
        Self {
            ok: false,
            witness: Some(Witness {
                condition,
                arms,
                interval: None,
            }),
        }
    }

    pub fn at_interval(mut self, index: usize) -> Self {
        if let Some(w) = self.witness.as_mut() {
            w.interval = Some(index);
        }
        self
    }

    pub fn and_then(self, next: impl FnOnce() -> Verdict) -> Verdict {
        if self.ok {
            next()
        } else {
            self
        }
    }
}

/// `a >= b - eps` in every coordinate.
pub fn eps_covers(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x >= y - eps)
}

/// `b >= a + eps` in every coordinate, with `b != a`.
///
/// The inequality alone already forces `b != a` for `eps > 0`; the extra
/// clause makes `eps = 0` mean ordinary Pareto domination.
pub fn eps_beats(b: &[f64], a: &[f64], eps: f64) -> bool {
    b != a && b.iter().zip(a).all(|(x, y)| *x >= y + eps)
}

fn outside(instance: &Instance, interval: &Interval, arms: &[ArmId]) -> Option<ArmId> {
    arms.iter()
        .copied()
        .find(|&a| a >= instance.num_arms() || !interval.contains(instance.points()[a]))
}

/// Is `arm` within `eps` of the best true mean in `interval`? Scalar weights.
pub fn check_eps_optimal(
    instance: &Instance,
    interval: &Interval,
    arm: ArmId,
    eps: f64,
) -> Result<Verdict> {
    if outside(instance, interval, &[arm]).is_some() {
        return Err(Error::InvalidWitness(arm));
    }
    let mine = instance.true_mean(arm)[0];
    let best = arms_in_interval(instance, interval)
        .into_iter()
        .max_by(|&a, &b| {
            instance.true_mean(a)[0]
                .total_cmp(&instance.true_mean(b)[0])
                .then(b.cmp(&a))
        })
        .expect("interval holds at least the checked arm");
    if mine >= instance.true_mean(best)[0] - eps {
        Ok(Verdict::pass())
    } else {
        Ok(Verdict::fail(Condition::EpsOptimal, vec![arm, best]))
    }
}

/// First arm `b` of `pool` not covered within `eps` by some member of `set`.
fn uncovered(instance: &Instance, pool: &[ArmId], set: &[ArmId], eps: f64) -> Option<ArmId> {
    pool.iter().copied().find(|&b| {
        !set.iter()
            .any(|&a| eps_covers(instance.true_mean(a), instance.true_mean(b), eps))
    })
}

/// First `(a, b)` with `a` in `set`, `b` in `pool`, and `b` beating `a` by `eps`.
fn beaten(instance: &Instance, pool: &[ArmId], set: &[ArmId], eps: f64) -> Option<(ArmId, ArmId)> {
    set.iter().find_map(|&a| {
        pool.iter()
            .copied()
            .find(|&b| eps_beats(instance.true_mean(b), instance.true_mean(a), eps))
            .map(|b| (a, b))
    })
}

/// Is `arm_set` an `eps`-Pareto optimal set for `interval`?
///
/// (a) every arm of the interval is covered within `eps` by some member, and
/// (b) no member is beaten by `eps` in every coordinate by an arm of the interval.
pub fn check_eps_pareto(
    instance: &Instance,
    interval: &Interval,
    arm_set: &[ArmId],
    eps: f64,
) -> Verdict {
    if let Some(a) = outside(instance, interval, arm_set) {
        return Verdict::fail(Condition::OutsideInterval, vec![a]);
    }
    let pool = arms_in_interval(instance, interval);
    if let Some(b) = uncovered(instance, &pool, arm_set, eps) {
        return Verdict::fail(Condition::ParetoCoverage, vec![b]);
    }
    if let Some((a, b)) = beaten(instance, &pool, arm_set, eps) {
        return Verdict::fail(Condition::ParetoDomination, vec![a, b]);
    }
    Verdict::pass()
}

/// Verifies a skyline two ways and insists the two agree.
///
/// The point form checks, on oriented positions `q` (`p` for the left
/// skyline, `-p` for the right):
/// (i) every arm `b` has a member `beta` with `q_beta >= q_b` covering it
/// within `eps`, and (ii) no member `beta` is beaten by `eps` by an arm with
/// `q_x >= q_beta`.
///
/// The suffix form enumerates the suffix intervals `{x : q_x >= q_b}` and asks
/// that the set contain an `eps`-Pareto optimal subset of each, and that each
/// member be admissible (pass condition (b)) in some suffix containing it.
pub fn check_skyline(
    instance: &Instance,
    interval: &Interval,
    arm_set: &[ArmId],
    eps: f64,
    side: Side,
) -> Verdict {
    if let Some(a) = outside(instance, interval, arm_set) {
        return Verdict::fail(Condition::OutsideInterval, vec![a]);
    }
    let point_form = skyline_point_form(instance, interval, arm_set, eps, side);
    let suffix_form = skyline_suffix_form(instance, interval, arm_set, eps, side);
    if point_form.ok != suffix_form.ok {
        return Verdict::fail(Condition::FormsDisagree, arm_set.to_vec());
    }
    point_form
}

fn oriented(instance: &Instance, side: Side) -> impl Fn(ArmId) -> f64 + '_ {
    move |a| match side {
        Side::Left => instance.points()[a],
        Side::Right => -instance.points()[a],
    }
}

pub fn skyline_point_form(
    instance: &Instance,
    interval: &Interval,
    arm_set: &[ArmId],
    eps: f64,
    side: Side,
) -> Verdict {
    let q = oriented(instance, side);
    let mu = |a: ArmId| instance.true_mean(a);
    let pool = arms_in_interval(instance, interval);
    for &b in &pool {
        let covered = arm_set
            .iter()
            .any(|&beta| q(beta) >= q(b) && eps_covers(mu(beta), mu(b), eps));
        if !covered {
            return Verdict::fail(Condition::SkylineCoverage, vec![b]);
        }
    }
    for &beta in arm_set {
        if let Some(&x) = pool
            .iter()
            .find(|&&x| q(x) >= q(beta) && eps_beats(mu(x), mu(beta), eps))
        {
            return Verdict::fail(Condition::SkylineDomination, vec![beta, x]);
        }
    }
    Verdict::pass()
}

pub fn skyline_suffix_form(
    instance: &Instance,
    interval: &Interval,
    arm_set: &[ArmId],
    eps: f64,
    side: Side,
) -> Verdict {
    let q = oriented(instance, side);
    let pool = arms_in_interval(instance, interval);
    let suffix =
        |b: ArmId| -> Vec<ArmId> { pool.iter().copied().filter(|&x| q(x) >= q(b)).collect() };

    for &b in &pool {
        let members = suffix(b);
        // Condition (b) is per member, so the largest admissible subset works
        // whenever any subset does.
        let admissible: Vec<ArmId> = arm_set
            .iter()
            .copied()
            .filter(|a| members.contains(a) && beaten(instance, &members, &[*a], eps).is_none())
            .collect();
        let iv = suffix_interval(instance, &members);
        if !check_eps_pareto(instance, &iv, &admissible, eps).ok {
            return Verdict::fail(Condition::SkylineCoverage, vec![b]);
        }
    }
    for &beta in arm_set {
        let somewhere = pool.iter().any(|&b| {
            let members = suffix(b);
            members.contains(&beta) && beaten(instance, &members, &[beta], eps).is_none()
        });
        if !somewhere {
            return Verdict::fail(Condition::SkylineDomination, vec![beta]);
        }
    }
    Verdict::pass()
}

/// Smallest closed interval holding exactly the given suffix of arms.
fn suffix_interval(instance: &Instance, members: &[ArmId]) -> Interval {
    let pts = members.iter().map(|&a| instance.points()[a]);
    let lo = pts.clone().fold(f64::INFINITY, f64::min);
    let hi = pts.fold(f64::NEG_INFINITY, f64::max);
    // Widen by a hair so a single-point suffix still has a non-empty interior;
    // no other arm may slip in, so widen by less than the nearest gap.
    let gap = instance
        .points()
        .iter()
        .filter(|&&p| p < lo || p > hi)
        .map(|&p| if p < lo { lo - p } else { p - hi })
        .fold(1.0, f64::min);
    Interval {
        left: lo - gap / 4.0,
        right: hi + gap / 4.0,
    }
}

/// Exact minimum hitting-set size by exhaustive search over candidate midpoints.
pub fn brute_min_hitting_set(intervals: &[Interval]) -> Result<usize> {
    if intervals.len() > BRUTE_HITTING_SET_MAX {
        return Err(Error::OracleScaleExceeded {
            found: intervals.len(),
            max: BRUTE_HITTING_SET_MAX,
        });
    }
    let candidates = candidate_points(intervals);
    // Bitmask of intervals stabbed by each candidate.
    let masks: Vec<u32> = candidates
        .iter()
        .map(|&c| {
            intervals
                .iter()
                .enumerate()
                .filter(|(_, iv)| iv.left < c && c < iv.right)
                .fold(0u32, |m, (i, _)| m | (1 << i))
        })
        .filter(|&m| m != 0)
        .collect();
    let full: u32 = if intervals.is_empty() {
        0
    } else {
        (1u32 << intervals.len()) - 1
    };
    for size in 0..=intervals.len() {
        if covers_with(&masks, 0, size, 0, full) {
            return Ok(size);
        }
    }
    unreachable!("one midpoint per interval always suffices")
}

fn covers_with(masks: &[u32], start: usize, left: usize, acc: u32, full: u32) -> bool {
    if acc == full {
        return true;
    }
    if left == 0 {
        return false;
    }
    (start..masks.len()).any(|i| covers_with(masks, i + 1, left - 1, acc | masks[i], full))
}

/// True if `hs` stabs every interval strictly inside.
pub fn is_hitting_set(hs: &HittingSet, intervals: &[Interval]) -> bool {
    intervals.iter().all(|iv| hs.hits(iv))
}

/// Size check of the greedy hitting set against the exhaustive minimum.
pub fn check_hitting_set(intervals: &[Interval]) -> Result<Verdict> {
    let hs = min_hitting_set(intervals);
    let brute = brute_min_hitting_set(intervals)?;
    if is_hitting_set(&hs, intervals) && hs.tau() == brute {
        Ok(Verdict::pass())
    } else {
        Ok(Verdict::fail(
            Condition::HittingSetSize,
            vec![hs.tau(), brute],
        ))
    }
}

/// Representative arms among `arms` for the cubes of spacing `eta`: per cube
/// of true means, the arm furthest right (ties to the higher id).
/// Instrumentation only; no algorithm decision depends on it.
pub fn representative_arms(instance: &Instance, arms: &[ArmId], eta: f64) -> Result<Vec<ArmId>> {
    let lattice = Lattice::new(eta, instance.dimension())?;
    let mut reps = std::collections::BTreeMap::new();
    for &a in arms {
        let cube = lattice.cube_of(instance.true_mean(a));
        let p = instance.points()[a];
        reps.entry(cube)
            .and_modify(|r: &mut (f64, ArmId)| {
                if (p, a) > *r {
                    *r = (p, a);
                }
            })
            .or_insert((p, a));
    }
    let mut out: Vec<ArmId> = reps.into_values().map(|(_, a)| a).collect();
    out.sort_unstable();
    Ok(out)
}

/// Per-interval verdicts of an answer set plus the conjunction over intervals
/// that hold at least one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerVerification {
    pub verdicts: Vec<Option<Verdict>>,
    pub all_ok: bool,
}

/// Checks every interval of `answers` at tolerance `eps`. Intervals holding
/// no arm get `None` and do not count against `all_ok`.
pub fn verify_answers(
    instance: &Instance,
    answers: &AnswerSet,
    eps: f64,
) -> Result<AnswerVerification> {
    if instance.num_arms() > VERIFY_MAX_ARMS {
        return Err(Error::OracleScaleExceeded {
            found: instance.num_arms(),
            max: VERIFY_MAX_ARMS,
        });
    }
    if answers.answers.len() != instance.intervals().len() {
        return Err(Error::InvalidParameter(format!(
            "answer set covers {} intervals, instance has {}",
            answers.answers.len(),
            instance.intervals().len()
        )));
    }
    let mut verdicts = Vec::with_capacity(answers.answers.len());
    for (i, (iv, ans)) in instance
        .intervals()
        .iter()
        .zip(&answers.answers)
        .enumerate()
    {
        if arms_in_interval(instance, iv).is_empty() {
            verdicts.push(None);
            continue;
        }
        let verdict = match (answers.mode, ans.as_slice()) {
            (_, []) => Verdict::fail(Condition::MissingAnswer, vec![]),
            (AnswerMode::Single, [arm]) if instance.dimension() == 1 => {
                match check_eps_optimal(instance, iv, *arm, eps) {
                    Ok(v) => v,
                    Err(_) => Verdict::fail(Condition::OutsideInterval, vec![*arm]),
                }
            }
            (_, set) => check_eps_pareto(instance, iv, set, eps),
        };
        verdicts.push(Some(verdict.at_interval(i)));
    }
    let all_ok = verdicts.iter().flatten().all(|v| v.ok);
    Ok(AnswerVerification { verdicts, all_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Arm, RewardDistribution};

    fn inst(items: &[(f64, &[f64])]) -> Instance {
        let d = items[0].1.len();
        let arms = items
            .iter()
            .enumerate()
            .map(|(id, (p, w))| Arm {
                id,
                point: *p,
                distribution: RewardDistribution::constant(w.to_vec()),
            })
            .collect();
        Instance::new(d, arms, vec![Interval::new(-10.0, 10.0).unwrap()]).unwrap()
    }

    fn all() -> Interval {
        Interval::new(-10.0, 10.0).unwrap()
    }

    #[test]
    fn eps_optimal_examples() {
        let i = inst(&[(0.0, &[0.5]), (1.0, &[0.8]), (2.0, &[0.69])]);
        assert!(check_eps_optimal(&i, &all(), 1, 0.0).unwrap().ok);
        let i = inst(&[(0.0, &[0.5]), (1.0, &[0.75])]);
        assert!(check_eps_optimal(&i, &all(), 0, 0.25).unwrap().ok);
        let v = check_eps_optimal(&i, &all(), 0, 0.24).unwrap();
        assert!(!v.ok);
        assert_eq!(v.witness.unwrap().arms, vec![0, 1]);
        let narrow = Interval::new(0.5, 2.0).unwrap();
        assert!(matches!(
            check_eps_optimal(&i, &narrow, 0, 0.1),
            Err(Error::InvalidWitness(0))
        ));
    }

    #[test]
    fn pareto_examples() {
        let i = inst(&[(0.0, &[0.9, 0.1]), (1.0, &[0.1, 0.9]), (2.0, &[0.2, 0.05])]);
        assert!(check_eps_pareto(&i, &all(), &[0, 1], 0.0).ok);
        let v = check_eps_pareto(&i, &all(), &[0], 0.05);
        assert_eq!(v.witness.unwrap().condition, Condition::ParetoCoverage);
        let v = check_eps_pareto(&i, &all(), &[0, 1, 2], 0.05);
        assert_eq!(
            v.witness.unwrap(),
            Witness {
                condition: Condition::ParetoDomination,
                arms: vec![2, 0],
                interval: None
            }
        );
        let i = inst(&[(0.0, &[0.9, 0.9]), (1.0, &[0.5, 0.5])]);
        let v = check_eps_pareto(&i, &all(), &[1], 0.1);
        assert_eq!(v.witness.unwrap().condition, Condition::ParetoCoverage);
    }

    #[test]
    fn skyline_examples() {
        let i = inst(&[(0.0, &[0.2]), (1.0, &[0.9]), (2.0, &[0.1])]);
        assert!(check_skyline(&i, &all(), &[0, 1, 2], 1.0, Side::Left).ok);
        assert!(check_skyline(&i, &all(), &[1, 2], 0.0, Side::Left).ok);
        assert!(!check_skyline(&i, &all(), &[0, 1, 2], 0.0, Side::Left).ok);
        assert!(check_skyline(&i, &all(), &[0, 1], 0.0, Side::Right).ok);
        let single = inst(&[(3.0, &[0.4, 0.6])]);
        assert!(check_skyline(&single, &all(), &[0], 0.01, Side::Left).ok);
    }

    #[test]
    fn brute_hitting_set_examples() {
        let nested = [
            Interval::new(0.0, 10.0).unwrap(),
            Interval::new(2.0, 3.0).unwrap(),
        ];
        assert_eq!(brute_min_hitting_set(&nested).unwrap(), 1);
        let disjoint: Vec<_> = (0..5)
            .map(|i| Interval::new(i as f64 * 2.0, i as f64 * 2.0 + 1.0).unwrap())
            .collect();
        assert_eq!(brute_min_hitting_set(&disjoint).unwrap(), 5);
        let many: Vec<_> = (0..15)
            .map(|i| Interval::new(i as f64, i as f64 + 0.5).unwrap())
            .collect();
        assert!(matches!(
            brute_min_hitting_set(&many),
            Err(Error::OracleScaleExceeded { .. })
        ));
    }

    #[test]
    fn representatives_pick_rightmost_per_cube() {
        let i = inst(&[(0.0, &[0.5]), (1.0, &[0.51]), (2.0, &[0.9])]);
        assert_eq!(
            representative_arms(&i, &[0, 1, 2], 0.1).unwrap(),
            vec![1, 2]
        );
    }
}
