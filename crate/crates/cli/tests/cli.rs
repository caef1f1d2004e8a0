use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_gencol");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn gencol(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, doc: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path.display().to_string()
}

/// A deterministic `n x n` instance with uneven marginals.
fn grid_problem(n: usize) -> Value {
    let total: f64 = (1..=n).map(|i| i as f64).sum();
    let a: Vec<f64> = (1..=n).map(|i| i as f64 / total).collect();
    let b: Vec<f64> = a.iter().rev().copied().collect();
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| ((i * 7 + j * 13 + i * j) % 17) as f64 / 4.0).collect())
        .collect();
    json!({ "marginals": [a, b], "cost": cost })
}

fn objective(v: &Value) -> f64 {
    v["objective"].as_f64().expect("objective")
}

#[test]
fn solve_matches_oracle_on_ten_by_ten() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &grid_problem(10));
    let solved = gencol(&["solve", &p, "--beta", "3", "--seed", "11"]);
    assert_eq!(code(&solved), 0);
    let oracle = gencol(&["oracle", &p]);
    assert_eq!(code(&oracle), 0);
    let (s, o) = (stdout_json(&solved), stdout_json(&oracle));
    assert!((objective(&s) - objective(&o)).abs() <= 1e-9 * (1.0 + 16.0 / 4.0));
    assert_eq!(s["termination"], "exhausted_proposals");
    assert_eq!(s["certificate"], "certified_optimal");
    assert_eq!(s["seed"], 11);
}

#[test]
fn oracle_matches_golden_value() {
    let out = gencol(&["oracle", data("random_5x5.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let golden: Value = serde_json::from_str(&std::fs::read_to_string(data("random_5x5.golden.json")).unwrap()).unwrap();
    assert!((objective(&stdout_json(&out)) - objective(&golden)).abs() <= 1e-12);

    let solved = gencol(&["solve", data("random_5x5.json").to_str().unwrap(), "--seed", "2"]);
    assert!((objective(&stdout_json(&solved)) - objective(&golden)).abs() <= 2e-9);
}

#[test]
fn tiny_problem_has_single_cell_plan() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "tiny.json", &json!({ "marginals": [[1.0], [1.0]], "cost": [[2.5]] }));
    let out = gencol(&["solve", &p]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["plan"], json!([[[0, 0], 1.0]]));
}

#[test]
fn zero_cost_oracle_is_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "zero.json",
        &json!({ "marginals": [[0.2, 0.8], [0.5, 0.25, 0.25]], "cost": [[0, 0, 0], [0, 0, 0]] }),
    );
    let out = gencol(&["oracle", &p]);
    assert_eq!(code(&out), 0);
    assert_eq!(objective(&stdout_json(&out)), 0.0);
}

#[test]
fn counterexample_stalls_under_single_entry_and_fails_dual_certificate() {
    let dir = TempDir::new().unwrap();
    let cx = dir.path().join("cx.json").display().to_string();
    let summary = gencol(&["counterexample", "--seed", "1", "--write-problem", &cx]);
    assert_eq!(code(&summary), 0);
    let s = stdout_json(&summary);
    assert_eq!(s["one_entry_mutations"], 18);
    assert_eq!(s["listed_proposals"], 16);
    assert_eq!(s["stationary"], true);
    assert_eq!(s["oracle_objective"], 0.0);
    assert_eq!(s["runs"][0]["objective"], 1.0);
    assert_eq!(s["runs"][1]["objective"], 0.0);

    let result = dir.path().join("r.json").display().to_string();
    let solved = gencol(&["solve", &cx, "--rule", "single-entry", "--beta", "3", "--seed", "7", "--out", &result]);
    assert_eq!(code(&solved), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(objective(&r), 1.0);
    assert_eq!(r["termination"], "exhausted_proposals");
    assert_eq!(r["certificate"], "stationary_under_rule");

    let verified = gencol(&["verify", &result, &cx, "--dual-cert"]);
    assert_eq!(code(&verified), 4);
    let v = stdout_json(&verified);
    let cert = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "dual_certificate").unwrap();
    assert_eq!(cert["passed"], false);
    assert!(cert["detail"].as_str().unwrap().contains("(0,0,0)"));

    let oracle = gencol(&["oracle", &cx]);
    assert_eq!(objective(&stdout_json(&oracle)), 0.0);
}

#[test]
fn verify_passes_on_oracle_result() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &grid_problem(6));
    let result = dir.path().join("o.json").display().to_string();
    assert_eq!(code(&gencol(&["oracle", &p, "--out", &result])), 0);
    let out = gencol(&["verify", &result, &p, "--ccm-k", "3", "--dual-cert"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_flags_product_plan_as_not_sparse() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "p.json",
        &json!({ "marginals": [[0.5, 0.25, 0.25], [0.5, 0.25, 0.25]], "cost": [[0, 1, 1], [1, 0, 1], [1, 1, 0]] }),
    );
    let w = [0.5, 0.25, 0.25];
    let plan: Vec<Value> = (0..3)
        .flat_map(|i| (0..3).map(move |j| json!([[i, j], w[i] * w[j]])))
        .collect();
    let r = write(&dir, "r.json", &json!({ "solver": "hand", "objective": 0.625, "plan": plan }));
    let out = gencol(&["verify", &r, &p]);
    assert_eq!(code(&out), 4);
    let v = stdout_json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks[0]["name"], "sparsity");
    assert_eq!(checks[0]["passed"], false);
    assert_eq!(checks[1]["passed"], true);
}

#[test]
fn iteration_cap_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &grid_problem(10));
    let out = gencol(&["solve", &p, "--max-iter", "1"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["termination"], "max_iterations");
}

#[test]
fn malformed_input_is_line_anchored() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"marginals\": [[1.0], [1.0]],\n  \"cost\": [[1.0]]\n  \"x\": 1\n}\n").unwrap();
    let out = gencol(&["solve", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with(&format!("error: {}:4:", path.display())), "{err}");

    std::fs::write(&path, "{\n  \"marginals\": [[0.5, 0.6], [1.0]],\n  \"cost\": [[1.0], [1.0]]\n}\n").unwrap();
    let out = gencol(&["solve", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with(&format!("error: {}:2:3:", path.display())), "{err}");

    let out = gencol(&["solve", "/nonexistent/problem.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn oracle_guard_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let n = 1001;
    let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / n as f64]).collect();
    let doc = json!({
        "marginals": [vec![1.0 / n as f64; n], vec![1.0 / n as f64; n]],
        "cost": { "builtin": "quadratic", "points": [pts.clone(), pts] },
    });
    let p = write(&dir, "big.json", &doc);
    let out = gencol(&["oracle", &p]);
    assert_eq!(code(&out), 3);
}

#[test]
fn identical_runs_differ_only_in_timestamp() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &grid_problem(8));
    let traj = dir.path().join("t.csv");
    let run = || {
        let out = gencol(&["solve", &p, "--seed", "5", "--beta", "2", "--trajectory-out", traj.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let mut v = stdout_json(&out);
        v.as_object_mut().unwrap().remove("timestamp");
        (v, std::fs::read_to_string(&traj).unwrap())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    assert!(ta.starts_with("iter,objective,omega_size\n"));
    assert_eq!(ta.lines().count(), a["trajectory"].as_array().unwrap().len() + 1);
}

#[test]
fn result_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &grid_problem(7));
    let result = dir.path().join("r.json");
    let out = gencol(&["solve", &p, "--seed", "3", "--out", result.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&result).unwrap();
    let r: Value = serde_json::from_str(&text).unwrap();
    let masses: f64 = r["plan"].as_array().unwrap().iter().map(|e| e[1].as_f64().unwrap()).sum();
    assert!((masses - 1.0).abs() < 1e-12);
    let v = gencol(&["verify", result.to_str().unwrap(), &p, "--ccm-k", "2", "--dual-cert"]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stdout));
}

#[test]
fn init_modes() {
    let dir = TempDir::new().unwrap();
    let mut doc = grid_problem(3);
    let p = write(&dir, "p.json", &doc);
    assert_eq!(code(&gencol(&["solve", &p, "--init", "file"])), 1);
    doc["initial_set"] = json!([[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2], [2, 0], [2, 1], [2, 2]]);
    let p = write(&dir, "q.json", &doc);
    let out = gencol(&["solve", &p, "--init", "file"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["config"]["init"], "file");
    let out = gencol(&["solve", &p, "--init", "northwest"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn unknown_rule_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &grid_problem(3));
    let out = gencol(&["solve", &p, "--rule", "grid"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown search rule"));
}
