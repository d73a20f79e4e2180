use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandit-range"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = run(
        d,
        &[
            "gen",
            "--type",
            "random",
            "--n",
            "40",
            "--q",
            "5",
            "--d",
            "2",
            "--seed",
            "4",
            "--out",
            "inst.json",
        ],
    );
    assert!(
        gen.status.success(),
        "{}",
        String::from_utf8_lossy(&gen.stderr)
    );

    let solve = run(
        d,
        &[
            "solve",
            "--instance",
            "inst.json",
            "--algo",
            "alg-d-rs",
            "--eps",
            "0.2",
            "--delta",
            "0.1",
            "--seed",
            "1",
            "--out",
            "answers.json",
        ],
    );
    assert!(solve.status.success());
    let answers: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("answers.json")).unwrap()).unwrap();
    assert_eq!(answers["answers"].as_array().unwrap().len(), 5);
    assert!(answers["ledger"]["total"].as_u64().unwrap() > 0);
    assert!(!answers["slabs"].as_array().unwrap().is_empty());

    let verify = run(
        d,
        &[
            "verify",
            "--instance",
            "inst.json",
            "--answers",
            "answers.json",
            "--eps",
            "0.2",
        ],
    );
    assert!(verify.status.success());
    assert_eq!(json(&verify)["all_ok"], true);
}

#[test]
fn verify_rejects_a_wrong_answer() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "gen", "--type", "lb1d", "--m", "3", "--eps", "0.125", "--tau", "1", "--seed", "2",
            "--out", "lb.json",
        ],
    );
    run(
        d,
        &[
            "solve",
            "--instance",
            "lb.json",
            "--algo",
            "naive",
            "--eps",
            "0.125",
            "--delta",
            "0.1",
            "--out",
            "a.json",
        ],
    );
    let mut answers: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("a.json")).unwrap()).unwrap();
    let inst: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("lb.json")).unwrap()).unwrap();
    let hidden = inst["hidden"]["hidden_c"][0].as_u64().unwrap();
    let wrong = (hidden + 1) % 3;
    answers["answers"] = serde_json::json!([[wrong]]);
    std::fs::write(d.join("a.json"), answers.to_string()).unwrap();
    let verify = run(
        d,
        &[
            "verify",
            "--instance",
            "lb.json",
            "--answers",
            "a.json",
            "--eps",
            "0.125",
        ],
    );
    assert_eq!(verify.status.code(), Some(1));
    assert_eq!(json(&verify)["all_ok"], false);
}

#[test]
fn geom_reports_tau() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "gen",
            "--type",
            "random",
            "--n",
            "30",
            "--q",
            "9",
            "--clusters",
            "3",
            "--out",
            "c.json",
        ],
    );
    let out = run(d, &["geom", "hitting-set", "--instance", "c.json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["tau"], 3);
    assert_eq!(v["slabs"].as_array().unwrap().len(), 4);
    assert!(v["slabs"][0]["left"].is_null());
}

#[test]
fn skyline_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "gen", "--type", "random", "--n", "30", "--q", "2", "--out", "s.json",
        ],
    );
    let out = run(
        d,
        &[
            "skyline",
            "--instance",
            "s.json",
            "--interval",
            "-1,101",
            "--eps",
            "0.3",
            "--delta",
            "0.1",
            "--side",
            "right",
            "--seed",
            "5",
            "--trace",
            "trace.json",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let trace: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["side"], "right");
    assert_eq!(trace["initial_arms"], 30);
    assert_eq!(json(&out)["total_pulls"], trace["total_pulls"]);
}

#[test]
fn bench_exit_code_follows_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        d,
        &[
            "gen",
            "--type",
            "random",
            "--n",
            "30",
            "--q",
            "4",
            "--constant",
            "--out",
            "b.json",
        ],
    );
    let args = [
        "bench",
        "--instance",
        "b.json",
        "--algo",
        "alg-rs",
        "--eps",
        "0.2",
        "--trials",
        "3",
        "--out",
        "r.json",
    ];
    let ok = run(d, &[&args[..], &["--min-success", "1.0"]].concat());
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["trials"].as_array().unwrap().len(), 3);

    let strict = run(d, &[&args[..], &["--min-success", "1.01"]].concat());
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn bench_config_file_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = serde_json::json!({
        "instance": { "type": "lower_bound1d", "m": 3, "eps": 0.125, "tau": 2, "seed": 1 },
        "algorithm": "alg-d-rs",
        "eps": 0.125,
        "delta": 0.1,
        "trials": 5,
        "master_seed": 3
    });
    std::fs::write(d.join("cfg.json"), config.to_string()).unwrap();
    let out = run(
        d,
        &["bench", "--config", "cfg.json", "--min-success", "0.8"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(json(&out)["aggregate"]["game_win_fraction"]
        .as_f64()
        .is_some());

    let bad = run(d, &["gen", "--type", "lb1d", "--eps", "0.1"]);
    assert_eq!(bad.status.code(), Some(2));
}
