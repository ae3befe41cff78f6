use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn minirat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minirat")).args(args).output().expect("run minirat")
}

fn solve_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    minirat(&args)
}

/// Rows of a CSV file with a header, parsed as floats.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

const SMALL: &[&str] = &["--func", "f1", "--scheme", "equispaced:-1:1:200", "--deg", "3", "3"];

#[test]
fn solve_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve_into(dir.path(), SMALL);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "iter,sqrt_d2,max_err,gap,active_nodes");
    let curve = rows(&dir.path().join("error_curve.csv"));
    assert_eq!(curve.len(), 200);
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certificate.json")).unwrap())
            .unwrap();
    for key in ["gap", "sqrt_d2", "max_err", "lambda_min", "satisfied", "support"] {
        assert!(cert.get(key).is_some(), "missing {key}");
    }
    let max_err = curve.iter().map(|r| r[6]).fold(0.0, f64::max);
    assert!((max_err - cert["max_err"].as_f64().unwrap()).abs() <= 1e-10);
    let approx: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("approximant.json")).unwrap())
            .unwrap();
    assert_eq!(approx["source_nodes_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(solve_into(a.path(), SMALL).status.success());
    assert!(solve_into(b.path(), SMALL).status.success());
    for f in ["trace.csv", "error_curve.csv", "certificate.json", "approximant.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn too_few_nodes_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve_into(
        dir.path(),
        &["--func", "f1", "--scheme", "equispaced:-1:1:7", "--deg", "3", "3"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("trace.csv").exists());
}

#[test]
fn bad_arguments_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [
        &["--func", "f9", "--deg", "1", "1"][..],
        &["--func", "f1", "--scheme", "spiral:10", "--deg", "1", "1"],
        &["--func", "f1", "--deg", "1", "1", "--beta", "2"],
        &["--func", "f1", "--deg", "1", "1", "--method", "remez"],
    ] {
        assert_eq!(solve_into(dir.path(), extra).status.code(), Some(1), "{extra:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_minirat"))
        .args(["table", "t1"])
        .env("MINIRAT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(minirat(&["table", "t9"]).status.code(), Some(1));
}

#[test]
fn eval_round_trips_and_reproduces_residuals() {
    let dir = tempfile::tempdir().unwrap();
    assert!(solve_into(dir.path(), SMALL).status.success());
    // Original nodes as an evaluation file.
    let curve = rows(&dir.path().join("error_curve.csv"));
    let nodes: String = std::iter::once("y_re,y_im".to_string())
        .chain(curve.iter().map(|r| format!("{:.17e},{:.17e}", r[0], r[1])))
        .collect::<Vec<_>>()
        .join("\n");
    let nodes_path = dir.path().join("nodes.csv");
    fs::write(&nodes_path, nodes).unwrap();
    let eval_path = dir.path().join("eval_out.csv");
    let out = minirat(&[
        "eval",
        "--approx",
        dir.path().join("approximant.json").to_str().unwrap(),
        "--nodes",
        nodes_path.to_str().unwrap(),
        "--out",
        eval_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&eval_path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "y_re,y_im,xi_re,xi_im");
    let ev = rows(&eval_path);
    for (c, e) in curve.iter().zip(&ev) {
        // Same approximant, loaded from JSON: bit-identical values.
        assert_eq!(c[4].to_bits(), e[2].to_bits());
        assert_eq!(c[5].to_bits(), e[3].to_bits());
        let r = ((c[2] - e[2]).powi(2) + (c[3] - e[3]).powi(2)).sqrt();
        assert!((r - c[6]).abs() <= 1e-10);
    }
}

#[test]
fn solve_with_eval_nodes_and_polynomial_type() {
    let dir = tempfile::tempdir().unwrap();
    let nodes = dir.path().join("y.csv");
    fs::write(&nodes, "y_re,y_im\n-5,0\n0.3,2\n7,-1\n").unwrap();
    let out = solve_into(
        dir.path(),
        &[
            "--func",
            "f2",
            "--scheme",
            "equispaced:1e-8:1:100",
            "--deg",
            "4",
            "0",
            "--eval",
            nodes.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ev = rows(&dir.path().join("eval.csv"));
    assert_eq!(ev.len(), 3);
    assert!(ev.iter().all(|r| r[2].is_finite() && r[3].is_finite()));
}

#[test]
fn eval_rejects_inconsistent_approximant() {
    let dir = tempfile::tempdir().unwrap();
    assert!(solve_into(dir.path(), SMALL).status.success());
    let path = dir.path().join("approximant.json");
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["hat_a"].as_array_mut().unwrap().pop();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, v.to_string()).unwrap();
    let mut v2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v2["n1"] = serde_json::json!(1);
    let bad2 = dir.path().join("bad2.json");
    fs::write(&bad2, v2.to_string()).unwrap();
    let nodes = dir.path().join("y.csv");
    fs::write(&nodes, "0.5,0\n").unwrap();
    for b in [&bad, &bad2] {
        let out =
            minirat(&["eval", "--approx", b.to_str().unwrap(), "--nodes", nodes.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3));
    }
}

#[test]
fn file_scheme_and_seed_weights() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let mut text = String::from("x_re,x_im,f_re,f_im\n");
    for j in 0..40 {
        let x = -1.0 + 2.0 * j as f64 / 39.0;
        text.push_str(&format!("{x},0,{},0\n", (2.0 * x).exp()));
    }
    fs::write(&data, text).unwrap();
    let scheme = format!("file:{}", data.display());
    let out = solve_into(dir.path(), &["--scheme", &scheme, "--deg", "2", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let seed = dir.path().join("w.csv");
    let uniform: String = (0..40).map(|_| format!("{}\n", 1.0 / 40.0)).collect();
    fs::write(&seed, &uniform).unwrap();
    let seeded = tempfile::tempdir().unwrap();
    let out = solve_into(
        seeded.path(),
        &["--scheme", &scheme, "--deg", "2", "2", "--seed-weights", seed.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(dir.path().join("trace.csv")).unwrap(),
        fs::read(seeded.path().join("trace.csv")).unwrap()
    );

    // Not on the simplex.
    fs::write(&seed, "1\n".repeat(40)).unwrap();
    let out = solve_into(
        seeded.path(),
        &["--scheme", &scheme, "--deg", "2", "2", "--seed-weights", seed.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solver_abort_writes_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("w.csv");
    let mut w = vec!["0"; 20];
    w[0] = "1";
    fs::write(&seed, w.join("\n")).unwrap();
    let out = solve_into(
        dir.path(),
        &[
            "--func",
            "f1",
            "--scheme",
            "equispaced:-1:1:20",
            "--deg",
            "2",
            "2",
            "--seed-weights",
            seed.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "iter,sqrt_d2,max_err,gap,active_nodes");
}

#[test]
fn f7_arc_evaluation_matches_published_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve_into(dir.path(), &["--func", "f7", "--deg", "3", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let curve = rows(&dir.path().join("error_curve.csv"));
    let nodes = dir.path().join("arc.csv");
    let text: String = curve.iter().map(|r| format!("{:.17e},{:.17e}\n", r[0], r[1])).collect();
    fs::write(&nodes, text).unwrap();
    let eval = dir.path().join("arc_eval.csv");
    let out = minirat(&[
        "eval",
        "--approx",
        dir.path().join("approximant.json").to_str().unwrap(),
        "--nodes",
        nodes.to_str().unwrap(),
        "--out",
        eval.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let max = rows(&eval)
        .iter()
        .zip(&curve)
        .map(|(e, c)| ((c[2] - e[2]).powi(2) + (c[3] - e[3]).powi(2)).sqrt())
        .fold(0.0, f64::max);
    assert!((max - 3.6107e-6).abs() <= 0.05 * 3.6107e-6, "{max}");
}
