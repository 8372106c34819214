//! End-to-end runs of the `schreier` binary: generate instances, run each
//! pipeline, verify the artifacts, execute a plan twice and compare bytes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schreier"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_koenig_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bip.txt");
    let artifact = dir.path().join("koenig.json");
    assert_ok(&run(&[
        "gen",
        "--family",
        "bipartite-regular",
        "--params",
        "n_side=200,d=3",
        "--seed",
        "11",
        "--out",
        path_str(&graph),
    ]));
    assert_ok(&run(&[
        "koenig",
        "--graph",
        path_str(&graph),
        "--measure",
        "uniform",
        "--epsilon",
        "0.1",
        "--out",
        path_str(&artifact),
    ]));
    let body = std::fs::read_to_string(&artifact).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert!(parsed["corr_mass"].as_f64().unwrap() > 0.9);
    assert_eq!(parsed["palette"].as_u64().unwrap(), 3);
    assert_ok(&run(&[
        "verify",
        "--graph",
        path_str(&graph),
        "--artifact",
        path_str(&artifact),
        "--kind",
        "koenig",
    ]));
}

#[test]
fn koenig_rejects_odd_cycles_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k3.txt");
    std::fs::write(&graph, "3 3 2\n0 1\n1 2\n2 0\n").unwrap();
    let out = run(&[
        "koenig",
        "--graph",
        path_str(&graph),
        "--epsilon",
        "0.3",
        "--out",
        path_str(&dir.path().join("x.json")),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("odd cycle"), "stderr: {}", stderr);
}

#[test]
fn orient_truncated_tree_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tree.json");
    let artifact = dir.path().join("orient.json");
    assert_ok(&run(&[
        "gen",
        "--family",
        "truncated-tree",
        "--params",
        "branching=4,depth=5",
        "--out",
        path_str(&graph),
    ]));
    assert_ok(&run(&[
        "orient",
        "--graph",
        path_str(&graph),
        "--epsilon",
        "0.95",
        "--truncation",
        "--stages",
        "16",
        "--out",
        path_str(&artifact),
    ]));
    assert_ok(&run(&[
        "verify",
        "--graph",
        path_str(&graph),
        "--artifact",
        path_str(&artifact),
        "--kind",
        "orient",
    ]));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&artifact).unwrap()).unwrap();
    let stages = parsed["stages"].as_array().unwrap();
    assert!(stages.len() > 1);
    // Per-stage deep masses are non-decreasing.
    let deeps: Vec<f64> = stages
        .iter()
        .map(|s| s["deep_corr_mass"].as_f64().unwrap())
        .collect();
    assert!(deeps.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn decorate_torus_with_skewed_measure_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("torus.json");
    let artifact = dir.path().join("dec.json");
    assert_ok(&run(&[
        "gen",
        "--family",
        "torus",
        "--params",
        "dims=12x12",
        "--out",
        path_str(&graph),
    ]));
    // The JSON variant carries dims, so the exponential preset resolves.
    assert_ok(&run(&[
        "decorate",
        "--graph",
        path_str(&graph),
        "--measure",
        "exp:0,0.1",
        "--epsilon",
        "0.1",
        "--out",
        path_str(&artifact),
    ]));
    assert_ok(&run(&[
        "verify",
        "--graph",
        path_str(&graph),
        "--artifact",
        path_str(&artifact),
        "--kind",
        "decorate",
    ]));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&artifact).unwrap()).unwrap();
    assert!(parsed["total_deficiency"].as_f64().unwrap() < 0.1);
    for row in parsed["label_actions"].as_array().unwrap() {
        assert!(row["injective_on_corr"].as_bool().unwrap());
    }
}

#[test]
fn bench_plan_runs_and_reruns_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("plan.json");
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let plan = serde_json::json!({
        "seed": 3,
        "generators": [
            {"family": "bipartite-regular", "params": {"n_side": "60", "d": "3"}, "seed": 2},
            {"family": "torus", "params": {"dims": "6x6"}, "seed": 0}
        ],
        "measures": ["uniform", "random:5"],
        "epsilons": [0.1, 0.5],
        "algorithms": ["koenig", "orient", "decorate"],
        "repetitions": 2,
        "output": "overridden"
    });
    std::fs::write(&plan_path, serde_json::to_string_pretty(&plan).unwrap()).unwrap();
    let first = run(&[
        "bench",
        "--plan",
        path_str(&plan_path),
        "--out",
        path_str(&out_a),
    ]);
    // Some cells fail by design (koenig on the torus); exit code reflects it.
    assert!(!first.status.success());
    let second = run(&[
        "--threads",
        "4",
        "bench",
        "--plan",
        path_str(&plan_path),
        "--out",
        path_str(&out_b),
    ]);
    assert!(!second.status.success());
    let csv_a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let csv_b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "fixed-seed reruns must be byte-identical");
    assert!(dir.path().join("a.json").exists());

    // All-passing plan exits 0.
    let plan = serde_json::json!({
        "seed": 3,
        "generators": [
            {"family": "torus", "params": {"dims": "6x6"}, "seed": 0}
        ],
        "measures": ["uniform"],
        "epsilons": [0.25],
        "algorithms": ["orient", "decorate"],
        "repetitions": 1,
        "output": path_str(&dir.path().join("ok"))
    });
    std::fs::write(&plan_path, serde_json::to_string_pretty(&plan).unwrap()).unwrap();
    let third = run(&["bench", "--plan", path_str(&plan_path)]);
    assert_ok(&third);
    let stdout = String::from_utf8_lossy(&third.stdout);
    assert!(stdout.lines().count() >= 3, "summary rows expected:\n{}", stdout);
}

#[test]
fn measure_from_file_weights() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("weighted.json");
    let artifact = dir.path().join("k.json");
    // A 4-cycle with embedded non-uniform weights.
    let file = serde_json::json!({
        "version": 1,
        "n": 4,
        "edges": [[0, 1], [1, 2], [2, 3], [3, 0]],
        "max_degree": 2,
        "weights": [0.4, 0.1, 0.1, 0.4]
    });
    std::fs::write(&graph, serde_json::to_string(&file).unwrap()).unwrap();
    assert_ok(&run(&[
        "koenig",
        "--graph",
        path_str(&graph),
        "--measure",
        "file",
        "--epsilon",
        "0.5",
        "--out",
        path_str(&artifact),
    ]));
    assert_ok(&run(&[
        "verify",
        "--graph",
        path_str(&graph),
        "--artifact",
        path_str(&artifact),
        "--kind",
        "koenig",
    ]));
    // A text graph has no weights to use.
    let plain = dir.path().join("plain.txt");
    std::fs::write(&plain, "3 2 2\n0 1\n1 2\n").unwrap();
    let out = run(&[
        "koenig",
        "--graph",
        path_str(&plain),
        "--measure",
        "file",
        "--epsilon",
        "0.5",
        "--out",
        path_str(&artifact),
    ]);
    assert!(!out.status.success());
}

#[test]
fn text_format_round_trips_through_gen() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("g1.txt");
    assert_ok(&run(&[
        "gen",
        "--family",
        "rotation",
        "--params",
        "n=89,steps=1x34",
        "--out",
        path_str(&a),
    ]));
    let body = std::fs::read_to_string(&a).unwrap();
    let header = body.lines().next().unwrap();
    assert_eq!(header, "89 178 4");
}
