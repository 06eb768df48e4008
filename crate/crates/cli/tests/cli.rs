use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haar-coherence"))
        .args(args)
        .env_remove("HAAR_COHERENCE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn last_field(out: &Output, column: &str) -> f64 {
    let text = stdout(out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == column).unwrap();
    row[idx].parse().unwrap()
}

#[test]
fn closed_form_values() {
    let out = run(&["closed-form", "--dim", "3", "--measure", "pure-avg"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "measure,N,value\npure-avg,3,0.5\n");

    let out = run(&["closed-form", "--dim", "2", "--measure", "mixed-avg"]);
    let v = last_field(&out, "value");
    assert!((v - (1.0 / 3.0 - std::f64::consts::PI / 16.0)).abs() <= 1e-12);

    let out = run(&["closed-form", "--dim", "5", "--measure", "max", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["measure"], "max");
    assert_eq!(json["N"], 5);
    assert_eq!(json["value"], 0.8);

    let out = run(&["closed-form", "--dim", "40000", "--measure", "subspace-dim", "--epsilon", "2e-5"]);
    assert_eq!(last_field(&out, "value"), 2.0);
}

#[test]
fn usage_and_domain_errors_exit_2() {
    let cases: &[(&[&str], &str)] = &[
        (&["closed-form", "--dim", "4", "--measure", "subspace-dim", "--epsilon", "0.25"], "epsilon"),
        (&["closed-form", "--dim", "4", "--measure", "subspace-dim"], "--epsilon"),
        (&["closed-form", "--dim", "0", "--measure", "max"], "--dim"),
        (&["mc", "--ensemble", "pure", "--dim", "2", "--samples", "1"], "--samples"),
        (&["mc", "--ensemble", "pure", "--dim", "2", "--samples", "nan"], "--samples"),
        (&["mc", "--ensemble", "pure", "--dim", "2", "--chunk", "0"], "--chunk"),
        (&["tail", "--ensemble", "pure", "--dim", "2", "--epsilon", "inf"], "--epsilon"),
        (&["tail", "--ensemble", "pure", "--dim", "2", "--epsilon", "-1"], "--epsilon"),
        (&["mc", "--ensemble", "pure", "--dim", "2", "--threads", "0"], "--threads"),
        (&["figure1", "--max-exp", "0", "--out", "x.csv"], "--max-exp"),
        (&["sample", "--ensemble", "qutrit", "--dim", "2"], "--ensemble"),
        (&["no-such-command"], "no-such-command"),
    ];
    for (args, flag) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn figure1_unwritable_path_exits_2() {
    let out = run(&["figure1", "--max-exp", "1", "--samples", "10", "--out", "/nonexistent-dir/fig.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_is_byte_stable_and_thread_independent() {
    let args = ["mc", "--ensemble", "mixed", "--dim", "3", "--samples", "20000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(run(&threaded).stdout, a.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_haar-coherence"))
        .args(args)
        .env("HAAR_COHERENCE_THREADS", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    assert!(stdout(&a).starts_with("ensemble,N,measure,mean,stderr,samples,seed\nmixed,3,skew,"));
}

#[test]
fn mc_pure_qubit_average() {
    let out = run(&["mc", "--ensemble", "pure", "--dim", "2", "--samples", "100000", "--seed", "7"]);
    let mean = last_field(&out, "mean");
    let stderr = last_field(&out, "stderr");
    assert!((mean - 1.0 / 3.0).abs() <= 4.0 * stderr);
    assert!((mean - 1.0 / 3.0).abs() <= 0.001);
}

#[test]
fn tail_reports_exact_bound() {
    let out = run(&["tail", "--ensemble", "pure", "--dim", "2", "--epsilon", "2", "--samples", "1000"]);
    assert_eq!(last_field(&out, "frequency"), 0.0);
    let bound = last_field(&out, "bound");
    assert_eq!(bound, haar_coherence::closed_form::tail_bound_pure(2, 2.0));
    assert!(stdout(&out).starts_with("ensemble,N,epsilon,frequency,bound,samples,seed\n"));
}

fn sample_json(ensemble: &str, dim: &str) -> serde_json::Value {
    let out = run(&["sample", "--ensemble", ensemble, "--dim", dim, "--seed", "3"]);
    assert!(out.status.success());
    serde_json::from_slice(&out.stdout).unwrap()
}

fn parts(v: &serde_json::Value, key: &str) -> Vec<f64> {
    v[key].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn sample_payloads() {
    let pure = sample_json("pure", "2");
    assert_eq!(pure["ensemble"], "pure");
    assert_eq!(pure["dim"], 2);
    assert_eq!(pure["seed"], 3);
    let norm: f64 = parts(&pure, "re").iter().chain(&parts(&pure, "im")).map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-12);

    let mixed = sample_json("mixed", "2");
    let (re, im) = (parts(&mixed, "re"), parts(&mixed, "im"));
    assert!((re[0] + re[3] - 1.0).abs() < 1e-12);
    assert!((re[1] - re[2]).abs() < 1e-15 && (im[1] + im[2]).abs() < 1e-15);
    // PSD for a 2x2 Hermitian matrix: non-negative diagonal and determinant.
    assert!(re[0] >= 0.0 && re[3] >= 0.0);
    assert!(re[0] * re[3] - (re[1] * re[1] + im[1] * im[1]) >= -1e-15);

    let u = sample_json("unitary", "3");
    let (re, im) = (parts(&u, "re"), parts(&u, "im"));
    for i in 0..3 {
        for j in 0..3 {
            // (U^dag U)_{ij} = sum_k conj(U_ki) U_kj
            let (mut sr, mut si) = (0.0, 0.0);
            for k in 0..3 {
                let (a, b) = (re[k * 3 + i], -im[k * 3 + i]);
                let (c, d) = (re[k * 3 + j], im[k * 3 + j]);
                sr += a * c - b * d;
                si += a * d + b * c;
            }
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((sr - target).abs() < 1e-10 && si.abs() < 1e-10);
        }
    }
}

#[test]
fn figure1_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let svg = dir.path().join("fig.svg");
    let args = [
        "figure1", "--max-exp", "3", "--samples", "4000", "--seed", "5",
        "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let first = std::fs::read(&csv).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), first);

    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "N,analytic,mc_mean,mc_stderr,n_samples,seed");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![2.0, 4.0, 8.0]);
    assert!((rows[0][1] - (1.0 / 3.0 - std::f64::consts::PI / 16.0)).abs() <= 1e-12);
    for r in &rows {
        assert!((r[2] - r[1]).abs() <= 4.0 * r[3], "{r:?}");
    }

    let svg_text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&svg_text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert!(root.attribute("viewBox").is_some());
    let count = |name: &str| doc.descendants().filter(|n| n.tag_name().name() == name).count();
    assert_eq!(count("polyline"), 1);
    assert_eq!(count("circle"), 3);
    assert_eq!(count("script"), 0);
}

#[test]
fn verify_oracles_passes() {
    let out = run(&["verify", "--suite", "oracles"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("[PASS] laguerre series vs quadrature")));
    assert!(!text.contains("[FAIL]"));
}
