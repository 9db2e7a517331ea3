use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi-ring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rabi(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn census_table_follows_parity() {
    let (header, rows) = csv(&stdout(&["census"]));
    assert_eq!(header, ["N", "CSR", "FSR", "AFSR"]);
    assert_eq!(rows.len(), 10);
    for r in rows {
        let n: usize = r[0].parse().unwrap();
        let expected = if n % 2 == 0 {
            [n / 2 - 1, 1, 1]
        } else {
            [n / 2, 1, 0]
        };
        let got: Vec<usize> = r[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(got, expected, "N = {n}");
    }
    let (_, six) = csv(&stdout(&["census", "--N", "6"]));
    assert_eq!(six, [["6", "2", "1", "1"]]);
}

#[test]
fn solve_reports_all_degenerate_minima() {
    let text = stdout(&["solve", "--theta", "0.49pi", "--g1", "0.7", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["degeneracy"], 6);
    let ground: Vec<&Value> = v["minima"].as_array().unwrap().iter().filter(|m| m["ground_state"] == true).collect();
    assert_eq!(ground.len(), 6);
    for m in ground {
        assert!(m["label"].as_str().unwrap().starts_with("CSRm2"));
        assert_eq!(m["winding"].as_i64().unwrap().abs(), 2);
        assert_eq!(m["spectrum"]["stable"], true);
    }

    let np: Value = serde_json::from_str(&stdout(&["solve", "--theta", "0", "--g1", "0.3", "--format", "json"])).unwrap();
    assert_eq!(np["ground_label"], "NP");
    assert_eq!(np["degeneracy"], 1);
}

#[test]
fn json_round_trips_bit_identically() {
    let text = stdout(&["solve", "--theta", "0.51pi", "--g1", "0.7", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn phase_diagram_grid_and_labels() {
    let text = stdout(&[
        "phase-diagram", "--theta-min", "0.9pi", "--theta-max", "0.9pi", "--grid-theta", "1", "--g1-min", "0.4",
        "--g1-max", "0.7", "--grid-g1", "4",
    ]);
    let (header, rows) = csv(&text);
    assert_eq!(header, ["theta", "g1", "label", "A4", "B2", "I", "I135", "I246"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][2], "NP");
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[3][2], "FSR");

    let text = stdout(&[
        "phase-diagram", "--theta-min", "0", "--theta-max", "pi", "--grid-theta", "101", "--g1-min", "0.7", "--g1-max",
        "0.7", "--grid-g1", "1",
    ]);
    let (_, rows) = csv(&text);
    assert_eq!(rows.len(), 101);
    let mut kinds: Vec<String> = Vec::new();
    for r in &rows {
        let kind = r[2].trim_end_matches(['+', '-']).to_string();
        if kinds.last() != Some(&kind) {
            kinds.push(kind);
        }
    }
    assert_eq!(kinds, ["AFSR", "CSRm2", "CSRm1", "FSR"]);
    for r in &rows {
        let b2: f64 = r[4].parse().unwrap();
        assert_eq!(b2.abs() > 1e-6, r[2].starts_with("CSR"), "{r:?}");
    }
}

#[test]
fn current_sweep_is_antisymmetric() {
    let (header, rows) = csv(&stdout(&["current-sweep", "--grid-theta", "41"]));
    assert_eq!(header, ["theta", "I", "I135", "I246"]);
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x.parse().unwrap()).collect()).collect();
    for (a, b) in values.iter().zip(values.iter().rev()) {
        assert!((a[0] + b[0]).abs() < 1e-9);
        for col in 1..4 {
            assert!((a[col] + b[col]).abs() < 1e-8, "{a:?} {b:?}");
        }
    }
    // θ = 0 and θ = ±π are collinear phases.
    for r in [&values[0], &values[20], &values[40]] {
        assert!(r[1..].iter().all(|x| x.abs() < 1e-8));
    }
}

#[test]
fn scaling_reports_fits() {
    let text = stdout(&["scaling", "--theta", "0.9pi", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    let fits = v["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 2);
    for f in fits {
        assert!((f["gamma"].as_f64().unwrap() - 0.5).abs() < 0.05);
        assert!(f["r_squared"].as_f64().unwrap() >= 0.999);
        assert_eq!(f["curve"].as_array().unwrap().len(), 16);
    }
    let (_, rows) = csv(&stdout(&["scaling", "--theta", "0.1pi", "--side", "below", "--delta-max", "1e-3"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "below");
}

#[test]
fn output_is_deterministic_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        stdout(&[
            "phase-diagram", "--grid-theta", "7", "--grid-g1", "3", "--seed", "7", "--jobs", jobs, "--out", p,
        ]);
        std::fs::read(&path).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "3"));

    let solve = |jobs: &str| stdout(&["solve", "--theta", "0.3pi", "--g1", "0.8", "--format", "json", "--jobs", jobs]);
    assert_eq!(solve("1"), solve("2"));
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# hexagon at flux 0.9 pi\ntheta = 0.9pi\ng1 = 0.7\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v: Value = serde_json::from_str(&stdout(&["solve", "--config", c])).unwrap();
    assert_eq!(v["ground_label"], "FSR");
    let v: Value = serde_json::from_str(&stdout(&["solve", "--config", c, "--g1", "0.3"])).unwrap();
    assert_eq!(v["ground_label"], "NP");
}

#[test]
fn failures_have_codes_and_json() {
    let out = rabi(&["solve", "--g1", "abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "bad_arguments");

    let out = rabi(&["solve", "--N", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = rabi(&["scaling", "--theta", "pi/2"]);
    assert_eq!(out.status.code(), Some(2));

    // 1 + 2(J/ω)cosθ cos k vanishes at J/ω = 1/2, θ = 0, k = π.
    let out = rabi(&["scaling", "--hop", "0.5", "--theta", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "solver");

    let missing = Path::new("/nonexistent-dir/out.csv");
    let out = rabi(&["census", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");

    let out = rabi(&["census", "--config", "/nonexistent-dir/run.cfg"]);
    assert_eq!(out.status.code(), Some(4));
}
