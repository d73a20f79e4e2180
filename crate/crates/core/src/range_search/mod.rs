//! PAC range searching: one answer per query interval.
//!
//! Both [`alg_rs`] and [`alg_d_rs`] cut the line into slabs at a minimum
//! hitting set of the queries, run skyline (and, for scalar weights, best-arm)
//! subroutines inside every slab, and pool the returned arms into a candidate
//! set. Each query is then answered from the candidates it contains. Because
//! every query spans at least two slabs, the left skyline of its leftmost
//! slab, the right skyline of its rightmost slab, and the subroutines of the
//! slabs in between together cover every arm of the query.

mod best;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use best::{
    best_arm, median_elim_pulls, median_elimination, naive_best_pulls, winner_estimate_pulls,
    BestMethod,
};

use crate::bandit::{Bandit, Estimate};
use crate::error::{Error, Result};
use crate::geometry::{arms_in_interval, build_slabs, min_hitting_set};
use crate::ledger::LedgerSnapshot;
use crate::model::ArmId;
use crate::rng::ArmStreams;
use crate::skyline::{skyline_of_arms, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    AlgRs,
    AlgDRs,
    Naive,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::AlgRs => "alg-rs",
            Self::AlgDRs => "alg-d-rs",
            Self::Naive => "naive",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alg-rs" => Ok(Self::AlgRs),
            "alg-d-rs" => Ok(Self::AlgDRs),
            "naive" => Ok(Self::Naive),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?}"
            ))),
        }
    }
}

/// Whether each interval is answered by one arm or by a set of arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerMode {
    Single,
    Pareto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabReport {
    pub index: usize,
    /// `None` stands for an infinite end.
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub arms: usize,
    pub calls: usize,
    pub pulls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSet {
    pub algorithm: Algorithm,
    pub mode: AnswerMode,
    pub eps: f64,
    pub delta: f64,
    /// Per interval: the selected arm (single mode, at most one) or arm set.
    /// Empty exactly when the interval holds no arm.
    pub answers: Vec<Vec<ArmId>>,
    /// Pooled candidates `C`, in id order.
    pub candidates: Vec<ArmId>,
    /// Per interval: candidates dropped as dominated in estimate (`D_i`).
    pub pruned: Vec<Vec<ArmId>>,
    /// One estimate per candidate, in id order.
    pub estimates: Vec<Estimate>,
    pub hitting_set: Vec<f64>,
    pub slabs: Vec<SlabReport>,
    pub subroutine_calls: usize,
    /// Confidence handed to every subroutine call.
    pub call_delta: Option<f64>,
    pub ledger: LedgerSnapshot,
}

impl AnswerSet {
    pub fn tau(&self) -> usize {
        self.hitting_set.len()
    }

    pub fn total_pulls(&self) -> u64 {
        self.ledger.total
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
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

/// Candidates with one estimate each. When an arm is returned by several
/// subroutines the estimate backed by the most pulls is kept.
#[derive(Default)]
struct CandidatePool(BTreeMap<ArmId, Estimate>);

impl CandidatePool {
    fn offer(&mut self, est: Estimate) {
        match self.0.get(&est.arm_id) {
            Some(old) if old.pulls >= est.pulls => {}
            _ => {
                self.0.insert(est.arm_id, est);
            }
        }
    }
}

struct SlabRun {
    pool: CandidatePool,
    hitting_set: Vec<f64>,
    slabs: Vec<SlabReport>,
    calls: usize,
    call_delta: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Subroutine {
    Best(BestMethod),
    LeftSkyline,
    RightSkyline,
}

impl Subroutine {
    fn tag(self) -> u64 {
        match self {
            Self::Best(_) => 0,
            Self::LeftSkyline => 1,
            Self::RightSkyline => 2,
        }
    }
}

/// Runs `subroutines` on every slab at `(eps / 3, delta / (k (tau + 1)))`.
fn run_slabs(
    bandit: &Bandit<'_>,
    eps: f64,
    delta: f64,
    subroutines: &[Subroutine],
    rng: &ArmStreams,
) -> Result<SlabRun> {
    let hs = min_hitting_set(bandit.intervals());
    let decomposition = build_slabs(&hs)?;
    if !decomposition.satisfies_property_p(bandit.intervals()) {
        return Err(Error::InvalidHittingSet(
            "slabs violate the two-slab cover property".into(),
        ));
    }
    let call_eps = eps / 3.0;
    let call_delta = delta / (subroutines.len() * decomposition.len()) as f64;

    let mut pool = CandidatePool::default();
    let mut reports = Vec::with_capacity(decomposition.len());
    let mut calls = 0;
    for slab in &decomposition.slabs {
        let arms = arms_in_interval(bandit, &slab.as_interval());
        let before = bandit.ledger().snapshot();
        for &sub in subroutines {
            calls += 1;
            // An empty slab has nothing to report; the call is counted all the same.
            if arms.is_empty() {
                continue;
            }
            let mut streams = rng.child(&[slab.index as u64, sub.tag()]);
            match sub {
                Subroutine::Best(method) => {
                    let (_, est) = best::best_of_arms(
                        bandit,
                        &arms,
                        call_eps,
                        call_delta,
                        &mut streams,
                        method,
                    )?;
                    pool.offer(est);
                }
                Subroutine::LeftSkyline | Subroutine::RightSkyline => {
                    let side = if sub == Subroutine::LeftSkyline {
                        Side::Left
                    } else {
                        Side::Right
                    };
                    let out =
                        skyline_of_arms(bandit, &arms, side, call_eps, call_delta, &mut streams)?;
                    out.estimates.into_iter().for_each(|e| pool.offer(e));
                }
            }
        }
        reports.push(SlabReport {
            index: slab.index,
            left: Some(slab.left).filter(|v| v.is_finite()),
            right: Some(slab.right).filter(|v| v.is_finite()),
            arms: arms.len(),
            calls: subroutines.len(),
            pulls: bandit.ledger().snapshot().since(&before).total,
        });
    }
    Ok(SlabRun {
        pool,
        hitting_set: hs.points,
        slabs: reports,
        calls,
        call_delta,
    })
}

/// Range searching with scalar weights. Answers every interval with an
/// `eps`-optimal arm, for all intervals at once with probability `1 - delta`.
pub fn alg_rs(
    bandit: &Bandit<'_>,
    eps: f64,
    delta: f64,
    best: BestMethod,
    rng: &ArmStreams,
) -> Result<AnswerSet> {
    check_params(eps, delta)?;
    if bandit.dimension() != 1 {
        return Err(Error::WrongDimension {
            expected: 1,
            found: bandit.dimension(),
        });
    }
    let run = run_slabs(
        bandit,
        eps,
        delta,
        &[
            Subroutine::Best(best),
            Subroutine::LeftSkyline,
            Subroutine::RightSkyline,
        ],
        rng,
    )?;
    let candidates = &run.pool.0;
    let answers = bandit
        .intervals()
        .iter()
        .map(|iv| {
            let mut best: Option<&Estimate> = None;
            for a in arms_in_interval(bandit, iv) {
                if let Some(e) = candidates.get(&a) {
                    if best.is_none_or(|b| e.mean[0] > b.mean[0]) {
                        best = Some(e);
                    }
                }
            }
            best.map(|e| vec![e.arm_id]).unwrap_or_default()
        })
        .collect();
    Ok(finish(
        bandit,
        Algorithm::AlgRs,
        AnswerMode::Single,
        eps,
        delta,
        run,
        answers,
        None,
    ))
}

/// Range searching with `d`-dimensional weights. Answers every interval with
/// an `eps`-Pareto optimal set, for all intervals at once with probability
/// `1 - delta`.
pub fn alg_d_rs(bandit: &Bandit<'_>, eps: f64, delta: f64, rng: &ArmStreams) -> Result<AnswerSet> {
    check_params(eps, delta)?;
    let run = run_slabs(
        bandit,
        eps,
        delta,
        &[Subroutine::LeftSkyline, Subroutine::RightSkyline],
        rng,
    )?;
    let mut answers = Vec::new();
    let mut pruned = Vec::new();
    for iv in bandit.intervals() {
        let local: Vec<&Estimate> = arms_in_interval(bandit, iv)
            .into_iter()
            .filter_map(|a| run.pool.0.get(&a))
            .collect();
        let (keep, drop): (Vec<&Estimate>, Vec<&Estimate>) = local
            .iter()
            .partition(|x| !local.iter().any(|y| x.strictly_below(y)));
        answers.push(keep.iter().map(|e| e.arm_id).collect());
        pruned.push(drop.iter().map(|e| e.arm_id).collect());
    }
    Ok(finish(
        bandit,
        Algorithm::AlgDRs,
        AnswerMode::Pareto,
        eps,
        delta,
        run,
        answers,
        Some(pruned),
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    bandit: &Bandit<'_>,
    algorithm: Algorithm,
    mode: AnswerMode,
    eps: f64,
    delta: f64,
    run: SlabRun,
    answers: Vec<Vec<ArmId>>,
    pruned: Option<Vec<Vec<ArmId>>>,
) -> AnswerSet {
    let q = answers.len();
    AnswerSet {
        algorithm,
        mode,
        eps,
        delta,
        answers,
        candidates: run.pool.0.keys().copied().collect(),
        pruned: pruned.unwrap_or_else(|| vec![Vec::new(); q]),
        estimates: run.pool.0.into_values().collect(),
        hitting_set: run.hitting_set,
        slabs: run.slabs,
        subroutine_calls: run.calls,
        call_delta: Some(run.call_delta),
        ledger: bandit.ledger().snapshot(),
    }
}

/// Pulls per arm of the uniform baseline: `ceil(2 / eps^2 * ln(2 n d / delta))`.
pub fn naive_range_pulls(eps: f64, delta: f64, n: usize, d: usize) -> u64 {
    (2.0 / (eps * eps) * (2.0 * (n * d) as f64 / delta).ln())
        .ceil()
        .max(1.0) as u64
}

/// Baseline: sample every arm the same number of times and answer each
/// interval from the estimates alone (argmax for `d = 1`, Pareto front otherwise).
pub fn naive_range_search(
    bandit: &Bandit<'_>,
    eps: f64,
    delta: f64,
    rng: &ArmStreams,
) -> Result<AnswerSet> {
    check_params(eps, delta)?;
    let n = bandit.num_arms();
    let d = bandit.dimension();
    let pulls = naive_range_pulls(eps, delta, n, d);
    let mut streams = rng.child(&[u64::MAX]);
    let estimates = (0..n)
        .map(|a| {
            bandit
                .estimate_mean(a, pulls, &mut streams)
                .map(|e| e.with_accuracy(eps / 2.0))
        })
        .collect::<Result<Vec<_>>>()?;

    let mode = if d == 1 {
        AnswerMode::Single
    } else {
        AnswerMode::Pareto
    };
    let mut answers = Vec::new();
    let mut pruned = Vec::new();
    for iv in bandit.intervals() {
        let local: Vec<&Estimate> = arms_in_interval(bandit, iv)
            .into_iter()
            .map(|a| &estimates[a])
            .collect();
        match mode {
            AnswerMode::Single => {
                let mut best: Option<&Estimate> = None;
                for e in &local {
                    if best.is_none_or(|b| e.mean[0] > b.mean[0]) {
                        best = Some(e);
                    }
                }
                answers.push(best.map(|e| vec![e.arm_id]).unwrap_or_default());
                pruned.push(Vec::new());
            }
            AnswerMode::Pareto => {
                let (keep, drop): (Vec<&Estimate>, Vec<&Estimate>) = local
                    .iter()
                    .partition(|x| !local.iter().any(|y| x.strictly_below(y)));
                answers.push(keep.iter().map(|e| e.arm_id).collect());
                pruned.push(drop.iter().map(|e| e.arm_id).collect());
            }
        }
    }
    Ok(AnswerSet {
        algorithm: Algorithm::Naive,
        mode,
        eps,
        delta,
        answers,
        candidates: (0..n).collect(),
        pruned,
        estimates,
        hitting_set: Vec::new(),
        slabs: Vec::new(),
        subroutine_calls: 0,
        call_delta: None,
        ledger: bandit.ledger().snapshot(),
    })
}

/// Dispatches on [`Algorithm`].
pub fn solve(
    bandit: &Bandit<'_>,
    algorithm: Algorithm,
    eps: f64,
    delta: f64,
    best: BestMethod,
    rng: &ArmStreams,
) -> Result<AnswerSet> {
    match algorithm {
        Algorithm::AlgRs => alg_rs(bandit, eps, delta, best, rng),
        Algorithm::AlgDRs => alg_d_rs(bandit, eps, delta, rng),
        Algorithm::Naive => naive_range_search(bandit, eps, delta, rng),
    }
}
