use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_deadneuron"));
    c.env_remove("DEADNEURON_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn network(dir: &Path, name: &str, first_b: [f64; 3], w: [f64; 3], b: f64) -> String {
    let path = dir.join(name);
    let json = serde_json::json!({
        "arch": [2, 3, 1],
        "layers": [
            {"W": [[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], "b": first_b},
            {"W": [w], "b": [b]}
        ]
    });
    std::fs::write(&path, json.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn counts_examples() {
    let o = run(&["counts", "--m", "4", "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("regions=11 bounded=3"));
    assert!(text.contains("avg_facets=32/11"));
    assert!(text.contains("match"));
    let o = run(&["counts", "--m", "3", "--n", "3"]);
    assert_eq!(stdout(&o).lines().next(), Some("regions=8 bounded=0"));
    assert_eq!(
        run(&["counts", "--m", "0", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["counts", "--m", "200", "--n", "150"]).status.code(),
        Some(2)
    );
}

#[test]
fn decide_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let worked = network(
        dir.path(),
        "worked.json",
        [-1.0, -1.0, 3.0],
        [-2.0, -2.0, -2.0],
        1.0,
    );
    let o = run(&["decide", &worked, "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["stable"], true);
    assert!((v["margin"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(v["regions_checked"], 7);

    let negative = network(
        dir.path(),
        "neg.json",
        [0.5, -0.3, 0.2],
        [-1.0, -0.5, -0.1],
        -0.2,
    );
    let o = run(&["decide", &negative]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"stable\":true"));

    let unbounded = network(
        dir.path(),
        "pos.json",
        [-1.0, -1.0, 3.0],
        [1.0, -2.0, -2.0],
        -1.0,
    );
    let o = run(&["decide", &unbounded]);
    assert!(stdout(&o).contains("\"margin\":null"));

    let marginal = network(
        dir.path(),
        "zero.json",
        [-1.0, -1.0, 3.0],
        [-2.0, -2.0, -2.0],
        2.0,
    );
    assert_eq!(run(&["decide", &marginal]).status.code(), Some(3));

    let concurrent = network(
        dir.path(),
        "concurrent.json",
        [0.0, 0.0, 0.0],
        [-1.0, -1.0, -1.0],
        -1.0,
    );
    assert_eq!(run(&["decide", &concurrent]).status.code(), Some(4));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(
        run(&["decide", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["decide", &worked, "5"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["decide", missing.to_str().unwrap()]).status.code(),
        Some(5)
    );
}

#[test]
fn estimate_csv_is_reproducible_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "estimate",
        "--n0",
        "2",
        "--n1",
        "3",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let o = bin()
        .args(base)
        .args(["--threads", "1", "--out", a.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("theory=0.078125"));
    let o = bin()
        .args(base)
        .args(["--threads", "4", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n0,n1,mode,samples,hits,marginal_discards,p_hat,ci_low,ci_high,theory,seed"
    );
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..3], &["2", "3", "exact"]);
    assert_eq!(fields[9], "0.078125");
    assert_eq!(fields[10], "7");
}

#[test]
fn seed_from_environment() {
    let args = ["estimate", "--n0", "1", "--n1", "2", "--samples", "3000"];
    let flag = bin().args(args).args(["--seed", "11"]).output().unwrap();
    let env = bin()
        .args(args)
        .env("DEADNEURON_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    let other = bin().args(args).args(["--seed", "12"]).output().unwrap();
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn sweep_svg_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("s.svg");
    let o = run(&[
        "sweep",
        "--n0",
        "2",
        "--n1-min",
        "3",
        "--n1-max",
        "6",
        "--samples",
        "2000",
        "--format",
        "svg",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("stroke-dasharray"));
    assert_eq!(text.matches("<circle").count(), 4);

    let o = run(&[
        "sweep",
        "--n0",
        "2",
        "--n1-min",
        "3",
        "--n1-max",
        "4",
        "--samples",
        "2000",
        "--format",
        "json",
    ]);
    let cells: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cells.as_array().unwrap().len(), 2);
    assert_eq!(cells[0]["theory"], 0.078125);
    assert!(cells[1]["theory"].is_null());
}

#[test]
fn deltas_and_facets() {
    let o = run(&[
        "deltas",
        "--samples",
        "20000",
        "--check-c0",
        "--format",
        "json",
        "--seed",
        "3",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["deltas"]["entries"].as_array().unwrap().len(), 8);
    assert!((v["deltas"]["total"].as_f64().unwrap() - 0.125).abs() < 0.03);
    assert_eq!(v["deltas"]["residual_hits"], 0);
    assert!(v["c0"]["case3"].as_array().unwrap().len() == 3);

    let o = run(&[
        "facets", "--n0", "2", "--m-min", "3", "--m-max", "5", "--trials", "3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with("n0,m,regions,bounded"));
    assert!(text.contains("2,4,11,3,8,16,32,11,"));
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(
        run(&[
            "estimate",
            "--n0",
            "2",
            "--n1",
            "3",
            "--format",
            "svg",
            "--samples",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["estimate", "--n0", "2", "--n1", "3", "--samples", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "--n0", "2", "--n1-min", "5", "--n1-max", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["estimate", "--n0", "2", "--n1", "3", "--dist", "cauchy"])
            .status
            .code(),
        Some(2)
    );
    let o = run(&[
        "estimate",
        "--n0",
        "2",
        "--n1",
        "3",
        "--samples",
        "10",
        "--out",
        "/nonexistent/dir/r.csv",
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn compare_reports_error_kinds() {
    let o = run(&[
        "compare",
        "--n0",
        "2",
        "--n1",
        "3",
        "--trials",
        "200",
        "--domain-samples",
        "1000",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v[0];
    let total = r["agreements"].as_u64().unwrap()
        + r["false_positives"].as_u64().unwrap()
        + r["false_negatives"].as_u64().unwrap()
        + r["marginal_discards"].as_u64().unwrap();
    assert_eq!(total, 200);
}
