use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wpcurv_core::{build_grid, thick_part_constant, Backend, CurvatureContext};

const SMALL_GRID: [&str; 4] = ["--radial-count", "64", "--angular-order", "8"];

fn wpcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpcurv"))
        .args(args)
        .env_remove("WPCURV_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = wpcurv(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn rows(v: &Value) -> &Vec<Value> {
    v["results"].as_array().unwrap()
}

fn row_value(v: &Value, quantity: &str) -> f64 {
    rows(v)
        .iter()
        .find(|r| r["quantity"] == quantity)
        .unwrap_or_else(|| panic!("missing {quantity}"))["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn bounds_json_contains_every_field() {
    let v = json(&["bounds", "--genus", "2", "--inj-radius", "0.5"]);
    assert_eq!(v["command"], "bounds");
    assert_eq!(v["params"]["genus"], "2");
    assert_eq!(rows(&v).len(), 8);
    let c = thick_part_constant(0.5).unwrap().value;
    let expected = [
        ("c_value", c),
        ("lower_holo", -2.0 * c * c),
        ("lower_sect", -2.0 * c * c),
        ("lower_ricci", -2.0 * c * c),
        ("lower_scalar", -6.0 * c * c),
        ("upper_holo", -1.0 / (2.0 * PI)),
        ("upper_ricci", -1.0 / (2.0 * PI)),
        ("upper_scalar", -12.0 / (4.0 * PI)),
    ];
    for (name, want) in expected {
        let got = row_value(&v, name);
        assert!(
            (got - want).abs() <= 1e-12 * want.abs(),
            "{name}: {got} vs {want}"
        );
    }
    assert!(rows(&v)
        .iter()
        .all(|r| r["est_error"].as_f64() == Some(0.0)));
}

#[test]
fn precondition_violations_exit_two() {
    for args in [
        vec!["holo", "--n-max", "1"],
        vec!["bounds", "--genus", "1", "--inj-radius", "0.5"],
        vec!["bounds", "--genus", "2", "--inj-radius", "0"],
        vec!["sect", "--m", "3", "--n", "3"],
        vec!["riemann", "2", "3", "4"],
        vec!["holo", "--backend", "spectral"],
        vec!["nonsense"],
    ] {
        let out = wpcurv(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
    let out = wpcurv(&["holo", "--n-max", "1"]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains('2'), "{msg}");
}

#[test]
fn unresolved_accuracy_exits_three_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("holo.csv");
    let out = wpcurv(&[
        "holo",
        "--n-max",
        "4",
        "--radial-count",
        "8",
        "--angular-order",
        "4",
        "--report-rtol",
        "1e-300",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("report_rtol"));
    assert!(!out_path.exists());
}

#[test]
fn resolvent_selftest_reports_constant_check() {
    let v = json(&["resolvent-selftest"]);
    let results = rows(&v);
    assert_eq!(results.len(), 4);
    let constant = results
        .iter()
        .find(|r| r["index"].as_str().unwrap().starts_with("G(1) = 1"))
        .unwrap();
    assert!(constant["value"].as_f64().unwrap() < 1e-8);
}

#[test]
fn csv_is_plot_ready() {
    let out = wpcurv(&[&["holo", "--n-max", "4"][..], &SMALL_GRID[..]].concat());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,index,value,est_error"));
    assert_eq!(lines.count(), 3);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn json_values_round_trip_bit_for_bit() {
    let v = json(&[&["holo", "--n-max", "5"][..], &SMALL_GRID[..]].concat());
    let ctx = CurvatureContext::new(build_grid(64, 8).unwrap(), Backend::ModeBvp, 1e-10).unwrap();
    for r in rows(&v) {
        let n: usize = r["index"].as_str().unwrap().parse().unwrap();
        let direct = ctx.holo_sectional(n).unwrap();
        assert_eq!(
            r["value"].as_f64().unwrap().to_bits(),
            direct.real().to_bits()
        );
        assert_eq!(
            r["est_error"].as_f64().unwrap().to_bits(),
            direct.est_error.to_bits()
        );
    }
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(reparsed, v);
}

#[test]
fn identical_runs_are_deterministic() {
    let args = [&["sect", "--max-index", "5"][..], &SMALL_GRID[..]].concat();
    let (a, b) = (json(&args), json(&args));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["config"], b["config"]);
    assert_eq!(a["config"]["digest"].as_str().unwrap().len(), 64);
    let other = json(
        &[
            &["sect", "--max-index", "5", "--solver-tol", "1e-9"][..],
            &SMALL_GRID[..],
        ]
        .concat(),
    );
    assert_ne!(a["config"]["digest"], other["config"]["digest"]);
}

#[test]
fn out_file_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "# small grid\nradial_count = 64\nangular_order = 8\noutput = json\n",
    )
    .unwrap();
    let out_path = dir.path().join("ricci.json");
    let out = wpcurv(&[
        "ricci",
        "--cutoff",
        "6",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["config"]["radial_count"], 64);
    let sums: Vec<f64> = rows(&v)
        .iter()
        .filter(|r| r["quantity"] == "ricci_partial")
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(sums.len(), 5);
    assert!(sums.windows(2).all(|w| w[1] <= w[0]));

    let env_conf = dir.path().join("env.conf");
    std::fs::write(
        &env_conf,
        "radial_count = 32\nangular_order = 8\noutput = json\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wpcurv"))
        .args(["holo", "--n-max", "3", "--config", conf.to_str().unwrap()])
        .env("WPCURV_CONFIG", &env_conf)
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["radial_count"], 32);
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect()
}

#[test]
fn cache_dir_persists_and_ignores_stale_files() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        &["holo", "--n-max", "6", "--cache-dir", cache][..],
        &SMALL_GRID[..],
    ]
    .concat();
    let first = json(&args);
    let files = cache_files(dir.path());
    assert_eq!(files.len(), 1);
    let digest = first["config"]["digest"].as_str().unwrap();
    assert_eq!(
        files[0].file_name().unwrap().to_str().unwrap(),
        format!("resolvent-{digest}.json")
    );

    let second = json(&args);
    assert_eq!(first["results"], second["results"]);

    let stale = std::fs::read_to_string(&files[0])
        .unwrap()
        .replace(digest, &"0".repeat(64));
    std::fs::write(&files[0], stale).unwrap();
    let third = json(&args);
    assert_eq!(first["results"], third["results"]);
    assert!(std::fs::read_to_string(&files[0]).unwrap().contains(digest));
}

#[test]
fn supnorm_const_c_and_kernel_commands() {
    let v = json(&["supnorm", "--n-max", "6"]);
    assert!(rows(&v)
        .iter()
        .all(|r| r["value"].as_f64().unwrap().is_finite()));
    let v = json(&["const-c", "--points", "5"]);
    assert_eq!(rows(&v).len(), 5);
    let v = json(&["kernel-lambda", "--n-max", "8"]);
    let lambdas: Vec<f64> = rows(&v)
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(lambdas.len(), 7);
    assert!(lambdas.iter().all(|&l| l <= 3.0 / (4.0 * PI) + 1e-6));
    let v = json(
        &[
            &["lemma1", "--samples", "5", "--max-mode", "2"][..],
            &SMALL_GRID[..],
        ]
        .concat(),
    );
    assert_eq!(rows(&v).len(), 4);
}
