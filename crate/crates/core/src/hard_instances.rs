//! Hard instances built from the many-groups best-arm game.
//!
//! Group `t` holds `m` arms at one point; one hidden arm per group sits `2 eps`
//! above its siblings. A correct range-search answer reveals every hidden arm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{arms_in_interval, min_hitting_set};
use crate::model::{Arm, ArmId, ArmPoints, Instance, Interval, RewardDistribution};
use crate::oracles::{
    brute_min_hitting_set, check_eps_pareto, eps_beats, eps_covers, Condition, Verdict,
    BRUTE_HITTING_SET_MAX,
};
use crate::range_search::AnswerSet;
use crate::rng::derive_seed;

/// Oracle-only description of the game behind a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub m: usize,
    /// Gap parameter of the game: hidden arms sit `2 game_eps` above siblings.
    pub game_eps: f64,
    /// Tolerance at which the instance should be solved and certified. Differs
    /// from `game_eps` when sample values were rescaled into `[0, 1]`.
    pub effective_eps: f64,
    pub tau: usize,
    pub dimension: usize,
    pub groups_per_copy: usize,
    /// Arms of each group, copies in order, groups in order within a copy.
    pub group_arms: Vec<Vec<ArmId>>,
    /// Index of the hidden arm within each group.
    pub hidden_c: Vec<usize>,
}

impl GameRecord {
    pub fn copy_of(&self, group: usize) -> usize {
        group / self.groups_per_copy
    }

    pub fn special_arm(&self, group: usize) -> ArmId {
        self.group_arms[group][self.hidden_c[group]]
    }
}

/// `1 / (8 eps)` when it is a positive integer.
fn groups_base(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 0.125) {
        return Err(Error::InvalidEps(eps));
    }
    let k = 1.0 / (8.0 * eps);
    let r = k.round();
    if (k - r).abs() > 1e-9 * r.max(1.0) {
        return Err(Error::InvalidEps(eps));
    }
    Ok(r as usize)
}

fn hidden_vector(seed: u64, m: usize, groups: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x6869_6464_656e]));
    (0..groups).map(|_| rng.random_range(0..m)).collect()
}

/// Shared layout of both constructions. `dist(local_t, special)` gives the
/// distribution of an arm of local group `local_t` (1-based).
#[allow(clippy::too_many_arguments)]
fn build(
    m: usize,
    tau: usize,
    dimension: usize,
    groups_per_copy: usize,
    seed: u64,
    game_eps: f64,
    effective_eps: f64,
    dist: impl Fn(usize, bool) -> RewardDistribution,
) -> Result<Instance> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if tau == 0 {
        return Err(Error::InvalidParameter("tau must be at least 1".into()));
    }
    let groups = tau * groups_per_copy;
    let hidden_c = hidden_vector(seed, m, groups);
    let shift = 1.0 + groups_per_copy as f64;
    let mut arms = Vec::with_capacity(groups * m);
    let mut group_arms = Vec::with_capacity(groups);
    let mut intervals = Vec::with_capacity(groups);
    for copy in 0..tau {
        let offset = copy as f64 * shift;
        for local in 1..=groups_per_copy {
            let g = copy * groups_per_copy + local - 1;
            let point = local as f64 + offset;
            let mut ids = Vec::with_capacity(m);
            for i in 0..m {
                let id = arms.len();
                arms.push(Arm {
                    id,
                    point,
                    distribution: dist(local, i == hidden_c[g]),
                });
                ids.push(id);
            }
            group_arms.push(ids);
            intervals.push(Interval::new(offset, point)?);
        }
    }
    let record = GameRecord {
        m,
        game_eps,
        effective_eps,
        tau,
        dimension,
        groups_per_copy,
        group_arms,
        hidden_c,
    };
    Ok(Instance::new(dimension, arms, intervals)?.with_game(record))
}

/// One-dimensional construction with `tau` translated copies.
///
/// Arms of local group `t` have mean `1/4 + 4 eps (t - 1)`; the hidden arm gets
/// `+2 eps`. Rewards are single Bernoulli draws with that mean.
pub fn gen_lb_1d(m: usize, eps: f64, tau: usize, seed: u64) -> Result<Instance> {
    let t1 = groups_base(eps)?;
    build(m, tau, 1, t1, seed, eps, eps, |t, special| {
        let bump = if special { 2.0 * eps } else { 0.0 };
        RewardDistribution::bernoulli(vec![0.25 + bump + 4.0 * eps * (t - 1) as f64])
    })
}

/// Base-`base` digits of `x`, most significant first, padded to `d` digits.
pub fn digits(mut x: usize, base: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for slot in out.iter_mut().rev() {
        *slot = x % base;
        x /= base;
    }
    out
}

/// `d`-dimensional construction with `tau` translated copies.
///
/// Local group `t` takes the digits `k` of `t - 1` in base `1/(8 eps)`. A
/// reward is `(alpha + beta_j) / 2` where `alpha` is the game draw and `beta_j`
/// is Bernoulli(`4 eps k_j`); halving keeps rewards in `[0, 1]`, so the
/// instance is solved and certified at `eps / 2`.
pub fn gen_lb_dd(m: usize, eps: f64, tau: usize, d: usize, seed: u64) -> Result<Instance> {
    let base = groups_base(eps)?;
    if base < 2 {
        return Err(Error::InvalidEps(eps));
    }
    if d == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    let t1 = base
        .checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidParameter("too many groups".into()))?;
    build(m, tau, d, t1, seed, eps, eps / 2.0, |t, special| {
        let alpha = if special { 0.25 + 2.0 * eps } else { 0.25 };
        let shifts = digits(t - 1, base, d)
            .into_iter()
            .map(|k| 4.0 * eps * k as f64)
            .collect();
        RewardDistribution::shifted_sum(alpha, shifts)
    })
}

fn game_of(instance: &Instance) -> Result<&GameRecord> {
    instance
        .game()
        .ok_or_else(|| Error::InvalidInstance("instance carries no game record".into()))
}

/// Checks the four structural properties the reduction relies on, using true
/// means, the supplied hidden vector, and tolerance `eps`:
///
/// 1. the minimum hitting set has size `tau`;
/// 2. each group's only `eps`-Pareto optimal arm is its hidden arm;
/// 3. within a copy, no arm of an earlier group `eps`-dominates a later hidden arm;
/// 4. interval `j` of a copy holds exactly groups `1..=j` of that copy.
pub fn certify_lb_instance(instance: &Instance, hidden_c: &[usize], eps: f64) -> Result<Verdict> {
    let game = game_of(instance)?;
    if hidden_c.len() != game.group_arms.len() || hidden_c.iter().any(|&c| c >= game.m) {
        return Err(Error::InvalidParameter(
            "hidden vector does not fit the game".into(),
        ));
    }
    let special = |g: usize| game.group_arms[g][hidden_c[g]];
    let mu = |a: ArmId| instance.true_mean(a);

    let ivs = instance.intervals();
    let tau = if ivs.len() <= BRUTE_HITTING_SET_MAX {
        brute_min_hitting_set(ivs)?
    } else {
        min_hitting_set(ivs).tau()
    };
    if tau != game.tau {
        return Ok(Verdict::fail(
            Condition::HittingSetSize,
            vec![tau, game.tau],
        ));
    }

    for (g, arms) in game.group_arms.iter().enumerate() {
        let s = special(g);
        let p = instance.points()[s];
        let around = Interval::new(p - 0.5, p + 0.5)?;
        let pareto = check_eps_pareto(instance, &around, &[s], eps);
        if !pareto.ok {
            return Ok(Verdict::fail(Condition::UniqueParetoOptimum, vec![s]).at_interval(g));
        }
        for &a in arms.iter().filter(|&&a| a != s) {
            // `a` is excluded by the hidden arm and cannot stand in for it.
            if !eps_beats(mu(s), mu(a), eps) || eps_covers(mu(a), mu(s), eps) {
                return Ok(Verdict::fail(Condition::UniqueParetoOptimum, vec![s, a]).at_interval(g));
            }
        }
    }

    for g in 0..game.group_arms.len() {
        let s = special(g);
        let first = game.copy_of(g) * game.groups_per_copy;
        for earlier in first..g {
            if let Some(&a) = game.group_arms[earlier]
                .iter()
                .find(|&&a| eps_covers(mu(a), mu(s), eps))
            {
                return Ok(Verdict::fail(Condition::CannotDominate, vec![a, s]).at_interval(g));
            }
        }
    }

    for (j, iv) in ivs.iter().enumerate() {
        let first = game.copy_of(j) * game.groups_per_copy;
        let mut expected: Vec<ArmId> = game.group_arms[first..=j]
            .iter()
            .flatten()
            .copied()
            .collect();
        expected.sort_unstable();
        if arms_in_interval(instance, iv) != expected {
            return Ok(Verdict::fail(Condition::Containment, vec![]).at_interval(j));
        }
    }
    Ok(Verdict::pass())
}

/// Reads the game guess off an answer set: interval `g` must contain exactly
/// one arm of group `g`, whose within-group index is the guess for `c_g`.
pub fn decode_game_answer(answers: &AnswerSet, instance: &Instance) -> Result<Vec<usize>> {
    let game = game_of(instance)?;
    if answers.answers.len() != game.group_arms.len() {
        return Err(Error::InvalidParameter(
            "answer set does not match the instance".into(),
        ));
    }
    game.group_arms
        .iter()
        .zip(&answers.answers)
        .enumerate()
        .map(|(g, (arms, ans))| {
            let mut hits = arms.iter().enumerate().filter(|(_, a)| ans.contains(a));
            match (hits.next(), hits.next()) {
                (Some((i, _)), None) => Ok(i),
                _ => Err(Error::DecodeFailure { group: g }),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::LedgerSnapshot;
    use crate::range_search::{Algorithm, AnswerMode};

    #[test]
    fn one_group_means() {
        let inst = gen_lb_1d(3, 0.125, 1, 7).unwrap();
        let game = inst.game().unwrap().clone();
        assert_eq!(game.group_arms.len(), 1);
        for (i, &a) in game.group_arms[0].iter().enumerate() {
            let expected = if i == game.hidden_c[0] { 0.5 } else { 0.25 };
            assert!((inst.true_mean(a)[0] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn second_group_ordinary_mean() {
        let inst = gen_lb_1d(2, 1.0 / 16.0, 1, 3).unwrap();
        let game = inst.game().unwrap();
        assert_eq!(game.group_arms.len(), 2);
        let ordinary = game.group_arms[1]
            .iter()
            .find(|&&a| a != game.special_arm(1))
            .unwrap();
        assert!((inst.true_mean(*ordinary)[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn digits_most_significant_first() {
        assert_eq!(digits(2, 2, 2), vec![1, 0]);
        assert_eq!(digits(5, 3, 3), vec![0, 1, 2]);
    }

    #[test]
    fn dd_group_three_mean() {
        let eps = 1.0 / 16.0;
        let inst = gen_lb_dd(2, eps, 1, 2, 11).unwrap();
        let game = inst.game().unwrap();
        let ordinary = game.group_arms[2]
            .iter()
            .find(|&&a| a != game.special_arm(2))
            .unwrap();
        // Before halving: (1/4 + 4 eps, 1/4).
        let mu = inst.true_mean(*ordinary);
        assert!((mu[0] - (0.25 + 4.0 * eps) / 2.0).abs() < 1e-12);
        assert!((mu[1] - 0.25 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn dd_with_one_dimension_has_1d_layout() {
        let a = gen_lb_1d(3, 1.0 / 16.0, 2, 5).unwrap();
        let b = gen_lb_dd(3, 1.0 / 16.0, 2, 1, 5).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.intervals(), b.intervals());
        assert_eq!(a.game().unwrap().group_arms, b.game().unwrap().group_arms);
        assert_eq!(a.game().unwrap().hidden_c, b.game().unwrap().hidden_c);
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(matches!(gen_lb_1d(2, 0.1, 1, 0), Err(Error::InvalidEps(_))));
        assert!(matches!(
            gen_lb_dd(2, 0.125, 1, 2, 0),
            Err(Error::InvalidEps(_))
        ));
    }

    #[test]
    fn generated_instances_certify() {
        for inst in [
            gen_lb_1d(3, 0.125, 1, 1).unwrap(),
            gen_lb_1d(3, 1.0 / 16.0, 2, 2).unwrap(),
            gen_lb_1d(2, 1.0 / 32.0, 3, 2).unwrap(),
            gen_lb_dd(2, 1.0 / 16.0, 1, 2, 3).unwrap(),
            gen_lb_dd(2, 1.0 / 16.0, 2, 3, 4).unwrap(),
        ] {
            let game = inst.game().unwrap().clone();
            let v = certify_lb_instance(&inst, &game.hidden_c, game.effective_eps).unwrap();
            assert!(v.ok, "{v:?}");
        }
    }

    #[test]
    fn corrupted_special_arm_fails_uniqueness() {
        let mut inst = gen_lb_1d(3, 1.0 / 16.0, 1, 9).unwrap();
        let game = inst.game().unwrap().clone();
        let s = game.special_arm(0);
        inst.replace_distribution(s, RewardDistribution::bernoulli(vec![0.25]))
            .unwrap();
        let v = certify_lb_instance(&inst, &game.hidden_c, game.effective_eps).unwrap();
        assert_eq!(v.witness.unwrap().condition, Condition::UniqueParetoOptimum);
    }

    fn answers_for(answers: Vec<Vec<ArmId>>) -> AnswerSet {
        AnswerSet {
            algorithm: Algorithm::AlgDRs,
            mode: AnswerMode::Pareto,
            eps: 0.1,
            delta: 0.1,
            pruned: vec![Vec::new(); answers.len()],
            answers,
            candidates: Vec::new(),
            estimates: Vec::new(),
            hitting_set: Vec::new(),
            slabs: Vec::new(),
            subroutine_calls: 0,
            call_delta: None,
            ledger: LedgerSnapshot::default(),
        }
    }

    #[test]
    fn decode_true_answer_and_failures() {
        let inst = gen_lb_1d(3, 1.0 / 16.0, 2, 4).unwrap();
        let game = inst.game().unwrap().clone();
        let truth: Vec<Vec<ArmId>> = (0..4).map(|g| vec![game.special_arm(g)]).collect();
        assert_eq!(
            decode_game_answer(&answers_for(truth.clone()), &inst).unwrap(),
            game.hidden_c
        );

        let mut missing = truth;
        missing[3].clear();
        assert!(matches!(
            decode_game_answer(&answers_for(missing), &inst),
            Err(Error::DecodeFailure { group: 3 })
        ));
    }
}
