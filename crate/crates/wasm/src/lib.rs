//! Browser bindings: generate an instance, look at its slabs, run a skyline,
//! and answer every interval. Everything crosses the boundary as JSON text.

use bandit_range::geometry::{arms_in_interval, build_slabs, min_hitting_set};
use bandit_range::harness::RandomSpec;
use bandit_range::oracles::verify_answers;
use bandit_range::skyline::skyline_of_arms;
use bandit_range::{solve, Algorithm, ArmStreams, Bandit, BestMethod, Instance, Interval, Side};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Outcome = Result<String, String>;

fn to_json(value: &impl Serialize) -> Outcome {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn parse(instance_json: &str) -> Result<Instance, String> {
    Instance::from_json(instance_json).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ArmView {
    id: usize,
    point: f64,
    mean: Vec<f64>,
}

#[derive(Serialize)]
struct SlabView {
    left: Option<f64>,
    right: Option<f64>,
    arms: usize,
}

#[derive(Serialize)]
struct Geometry {
    tau: usize,
    points: Vec<f64>,
    slabs: Vec<SlabView>,
    arms: Vec<ArmView>,
    intervals: Vec<[f64; 2]>,
}

pub fn random_instance_json(n: usize, q: usize, d: usize, clusters: usize, seed: u64) -> Outcome {
    let mut spec = RandomSpec::new(n, q, d, seed);
    if clusters > 0 {
        spec = spec.with_clusters(clusters);
    }
    spec.generate()
        .and_then(|i| i.to_json())
        .map_err(|e| e.to_string())
}

/// Hitting set, slabs, and a drawable view of the instance. The page shows
/// true means so the user can judge answers by eye.
pub fn geometry_json(instance_json: &str) -> Outcome {
    let inst = parse(instance_json)?;
    let hs = min_hitting_set(inst.intervals());
    let slabs = build_slabs(&hs).map_err(|e| e.to_string())?;
    to_json(&Geometry {
        tau: hs.tau(),
        slabs: slabs
            .slabs
            .iter()
            .map(|s| SlabView {
                left: s.left.is_finite().then_some(s.left),
                right: s.right.is_finite().then_some(s.right),
                arms: arms_in_interval(&inst, &s.as_interval()).len(),
            })
            .collect(),
        points: hs.points,
        arms: inst
            .arms()
            .iter()
            .map(|a| ArmView {
                id: a.id,
                point: a.point,
                mean: inst.true_mean(a.id).to_vec(),
            })
            .collect(),
        intervals: inst
            .intervals()
            .iter()
            .map(|iv| [iv.left, iv.right])
            .collect(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn skyline_json(
    instance_json: &str,
    left: f64,
    right: f64,
    right_side: bool,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Outcome {
    let inst = parse(instance_json)?;
    let iv = Interval::new(left, right).map_err(|e| e.to_string())?;
    let bandit = Bandit::new(&inst);
    let side = if right_side { Side::Right } else { Side::Left };
    let arms = arms_in_interval(&bandit, &iv);
    let out = skyline_of_arms(&bandit, &arms, side, eps, delta, &mut ArmStreams::new(seed))
        .map_err(|e| e.to_string())?;
    to_json(&out)
}

#[derive(Serialize)]
struct SolveView<'a> {
    answers: &'a [Vec<usize>],
    candidates: &'a [usize],
    total_pulls: u64,
    verdicts: Vec<Option<bool>>,
    all_ok: bool,
}

pub fn solve_json(
    instance_json: &str,
    algorithm: &str,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Outcome {
    let inst = parse(instance_json)?;
    let algorithm: Algorithm = algorithm
        .parse()
        .map_err(|e: bandit_range::Error| e.to_string())?;
    let bandit = Bandit::new(&inst);
    let ans = solve(
        &bandit,
        algorithm,
        eps,
        delta,
        BestMethod::MedianElim,
        &ArmStreams::new(seed),
    )
    .map_err(|e| e.to_string())?;
    let check = verify_answers(&inst, &ans, eps).map_err(|e| e.to_string())?;
    to_json(&SolveView {
        answers: &ans.answers,
        candidates: &ans.candidates,
        total_pulls: ans.total_pulls(),
        verdicts: check
            .verdicts
            .iter()
            .map(|v| v.as_ref().map(|v| v.ok))
            .collect(),
        all_ok: check.all_ok,
    })
}

fn js(outcome: Outcome) -> Result<String, JsError> {
    outcome.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = randomInstance)]
pub fn random_instance(
    n: usize,
    q: usize,
    d: usize,
    clusters: usize,
    seed: u32,
) -> Result<String, JsError> {
    js(random_instance_json(n, q, d, clusters, u64::from(seed)))
}

#[wasm_bindgen]
pub fn geometry(instance_json: &str) -> Result<String, JsError> {
    js(geometry_json(instance_json))
}

#[wasm_bindgen]
pub fn skyline(
    instance_json: &str,
    left: f64,
    right: f64,
    right_side: bool,
    eps: f64,
    delta: f64,
    seed: u32,
) -> Result<String, JsError> {
    js(skyline_json(
        instance_json,
        left,
        right,
        right_side,
        eps,
        delta,
        u64::from(seed),
    ))
}

#[wasm_bindgen(js_name = solveAll)]
pub fn solve_all(
    instance_json: &str,
    algorithm: &str,
    eps: f64,
    delta: f64,
    seed: u32,
) -> Result<String, JsError> {
    js(solve_json(
        instance_json,
        algorithm,
        eps,
        delta,
        u64::from(seed),
    ))
}
