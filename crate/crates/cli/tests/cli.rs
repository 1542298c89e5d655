use std::process::Command;

use pst_forge_cli::run;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn invoke(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pst-forge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

const OPEN4: &str = "1.58114,0.948683,1.26491";

#[test]
fn open_four_trajectory_csv() {
    let o = invoke(&[
        "trajectory",
        "--geometry",
        "open",
        "--couplings",
        OPEN4,
        "--from",
        "1",
        "--tmax",
        "pi",
        "--steps",
        "201",
        "--format",
        "csv",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "time,p1,p2,p3,p4");
    assert_eq!(lines.len(), 202);
    let last: Vec<f64> = lines[201].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], std::f64::consts::PI);
    let peak = (1..=4).max_by(|&a, &b| last[a].total_cmp(&last[b])).unwrap();
    assert_eq!(peak, 3);
}

#[test]
fn classify_odd_ring() {
    let o = invoke(&[
        "classify",
        "--geometry",
        "closed",
        "--n",
        "5",
        "--from",
        "1",
        "--to",
        "2",
    ]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("Excluded"));
    assert!(o.stdout.contains("closed-odd"));
    let o = invoke(&[
        "classify",
        "--geometry",
        "closed",
        "--n",
        "5",
        "--from",
        "1",
        "--to",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["status"], "excluded");
    assert_eq!(v["rule"], "closed-odd");
}

#[test]
fn even_ring_map_is_all_reachable() {
    let o = invoke(&["map", "--geometry", "closed", "--n", "4", "--format", "json"]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    for row in v["verdicts"].as_array().unwrap() {
        for cell in row.as_array().unwrap() {
            assert_eq!(cell["status"], "reachable");
        }
    }
    let text = invoke(&["map", "--geometry", "closed", "--n", "4"]).stdout;
    for row in text.lines().skip(2).take(4) {
        assert_eq!(row.split_whitespace().skip(1).collect::<Vec<_>>(), ["R"; 4]);
    }
}

#[test]
fn check_reports_pst_time() {
    let o = invoke(&[
        "check",
        "--geometry",
        "open",
        "--couplings",
        OPEN4,
        "--from",
        "1",
        "--to",
        "3",
        "--rounded",
        "--format",
        "json",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["criterion1"]["satisfied"], true);
    assert_eq!(
        v["commensurability"]["integer_spectrum"],
        serde_json::json!([-2, -1, 1, 2])
    );
    let t = v["pst"]["time"].as_f64().unwrap();
    assert!((t - std::f64::consts::PI).abs() < 1e-4);
}

#[test]
fn spectrum_and_fidelity() {
    let o = invoke(&["spectrum", "--geometry", "open", "--couplings", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let e: Vec<f64> = serde_json::from_value(v["eigenvalues"].clone()).unwrap();
    assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    let o = invoke(&[
        "fidelity",
        "--geometry",
        "open",
        "--couplings",
        "1",
        "--from",
        "1",
        "--to",
        "2",
        "--time",
        "pi/2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn domain_errors_exit_one_with_json() {
    let o = invoke(&[
        "spectrum",
        "--geometry",
        "open",
        "--couplings",
        "1,0",
        "--format",
        "json",
    ]);
    assert_eq!(o.code, 1);
    let v: serde_json::Value = serde_json::from_str(o.stdout.trim()).unwrap();
    assert_eq!(v["error"]["kind"], "non-positive-coupling");
    let o = invoke(&["classify", "--geometry", "open", "--n", "4", "--from", "1", "--to", "9"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invoke(&["frobnicate"]).code, 2);
    assert_eq!(
        invoke(&["classify", "--geometry", "open", "--n", "4", "--from", "1"]).code,
        2
    );
    assert_eq!(
        invoke(&[
            "classify",
            "--geometry",
            "square",
            "--n",
            "4",
            "--from",
            "1",
            "--to",
            "2"
        ])
        .code,
        2
    );
    assert_eq!(
        invoke(&[
            "fidelity",
            "--geometry",
            "open",
            "--couplings",
            "1",
            "--from",
            "1",
            "--to",
            "2",
            "--time",
            "soon"
        ])
        .code,
        2
    );
    assert_eq!(
        invoke(&["map", "--geometry", "open", "--n", "4", "--format", "csv"]).code,
        2
    );
    assert_eq!(invoke(&["--help"]).code, 0);
}

#[test]
fn optimize_is_reproducible_and_round_trips() {
    let args = [
        "optimize",
        "--geometry",
        "open",
        "--n",
        "4",
        "--from",
        "1",
        "--to",
        "3",
        "--time",
        "pi",
        "--restarts",
        "4",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let a = invoke(&args);
    let b = invoke(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("best.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let o = invoke(&[
        "fidelity",
        "--profile-file",
        path.to_str().unwrap(),
        "--from",
        "1",
        "--to",
        "3",
        "--time",
        "pi",
        "--format",
        "json",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let opt: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    let fid: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let (x, y) = (
        opt["best_fidelity"].as_f64().unwrap(),
        fid["fidelity"].as_f64().unwrap(),
    );
    assert!((x - y).abs() < 1e-12);
}

#[test]
fn path_symmetric_ring_optimization() {
    let o = invoke(&[
        "optimize",
        "--geometry",
        "closed",
        "--n",
        "6",
        "--from",
        "1",
        "--to",
        "3",
        "--time",
        "free",
        "--path-symmetric",
        "--restarts",
        "8",
        "--format",
        "json",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(v["best_fidelity"].as_f64().unwrap() > 1.0 - 1e-6);
    let j: Vec<f64> = serde_json::from_value(v["best_profile"]["couplings"].clone()).unwrap();
    assert_eq!(j[0], j[1]);
    assert_eq!(j[2], j[5]);
    assert_eq!(j[3], j[4]);
    let bad = invoke(&[
        "optimize",
        "--geometry",
        "open",
        "--n",
        "4",
        "--from",
        "1",
        "--to",
        "3",
        "--path-symmetric",
    ]);
    assert_eq!(bad.code, 1);
}

#[test]
fn design_profiles_feed_back() {
    let o = invoke(&[
        "design",
        "--geometry",
        "open",
        "--n",
        "4",
        "--from",
        "1",
        "--to",
        "3",
        "--emax",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let first = &v["solutions"][0];
    assert_eq!(first["spectrum"]["integers"], serde_json::json!([-2, -1, 1, 2]));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("design.json");
    std::fs::write(&path, first.to_string()).unwrap();
    let c = invoke(&[
        "check",
        "--profile-file",
        path.to_str().unwrap(),
        "--from",
        "1",
        "--to",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(c.code, 0, "{}", c.stderr);
    let cv: serde_json::Value = serde_json::from_str(&c.stdout).unwrap();
    assert!(cv["pst"].is_object());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"geometry": "open", "n": 6, "from": 1, "to": 4, "format": "json"}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let o = invoke(&["classify", "--config", cfg]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["rule"], "vieta-parity-6-1-4");
    let o = invoke(&["classify", "--config", cfg, "--to", "6", "--format", "text"]);
    assert!(o.stdout.contains("1->6: Reachable"));
    std::fs::write(&path, r#"{"geometry": "open", "colour": 3}"#).unwrap();
    assert_eq!(invoke(&["classify", "--config", cfg]).code, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pst-forge");
    let ok = Command::new(bin)
        .args(["classify", "--geometry", "open", "--n", "4", "--from", "1", "--to", "4"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let domain = Command::new(bin)
        .args(["spectrum", "--geometry", "closed", "--couplings", "1,1"])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(1));
    let usage = Command::new(bin).args(["map"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let threads = Command::new(bin)
        .env("PST_FORGE_THREADS", "1")
        .args(["map", "--geometry", "open", "--n", "5"])
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(0));
}
