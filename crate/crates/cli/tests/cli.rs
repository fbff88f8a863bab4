//! End-to-end checks of the `onebit` binary: flag handling, exit codes,
//! output determinism, and config-file precedence.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(args)
        .env_remove("ONEBIT_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_body(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("onebit_test_{name}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn orthant_bivariate_and_exit_codes() {
    let out = run(&["orthant", "--rho", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "bivariate");
    assert_eq!(fields[4].parse::<f64>().unwrap(), 0.25);
    assert!(fields[6].parse::<f64>().unwrap() < 1e-8);

    let out = run(&["orthant", "--rho", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["orthant"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["orthant", "--rho", "0", "--k", "paper"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn orthant_paper_matrix() {
    let out = run(&["orthant", "--k", "paper"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let closed: f64 = fields[4].parse().unwrap();
    assert!((closed - 0.234833954855028321).abs() < 1e-12);
    assert!(fields[6].parse::<f64>().unwrap() < 1e-8);
}

#[test]
fn bound_reference_and_usage_errors() {
    let out = run(&["bound", "--lambda", "1.4"]);
    assert!(out.status.success());
    let v = json_body(&out);
    let norm = v["rate_slope"]["normalized"].as_f64().unwrap();
    assert!((norm - 0.746483247645214377).abs() < 1e-12);

    let out = run(&["bound", "--lambda", "0"]);
    let v = json_body(&out);
    assert!((v["rate_slope"]["normalized"].as_f64().unwrap() - 0.718629733617202080).abs() < 1e-12);

    let out = run(&["bound", "--features", "0,0,0"]);
    let v = json_body(&out);
    assert_eq!(v["rate_slope"]["normalized"].as_f64().unwrap(), 0.0);

    assert_eq!(run(&["bound"]).status.code(), Some(2));
    assert_eq!(
        run(&["bound", "--lambda", "1", "--features", "0,0,0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bound", "--features", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--features", "a,b,c"]).status.code(), Some(2));
}

#[test]
fn optimize_brackets() {
    let out = run(&["optimize", "--bracket", "1.3,1.5"]);
    assert!(out.status.success());
    let v = json_body(&out);
    let l = v["lambda_star"].as_f64().unwrap();
    assert!((l - 1.3824868).abs() < 0.01);

    let out = run(&["optimize", "--bracket", "2,2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["optimize", "--bracket", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_prop_small_sweep_is_deterministic() {
    let args = ["verify-prop", "--draws", "150", "--seed", "5"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let v = json_body(&a);
    assert!(v["bivariate"]["max_ratio"].as_f64().unwrap() <= 1.0);
    assert!(v["trivariate"]["max_ratio"].as_f64().unwrap() <= 1.0);
    assert_eq!(v["bivariate"]["violations"].as_u64().unwrap(), 0);

    // max_a = 0 keeps every deviation at zero.
    let out = run(&["verify-prop", "--draws", "50", "--max-a", "0", "--seed", "5"]);
    assert!(out.status.success());
    let v = json_body(&out);
    assert_eq!(v["trivariate"]["max_ratio"].as_f64().unwrap(), 0.0);
}

#[test]
fn figure2_outputs_and_validation() {
    let dir = tmpdir("fig2");
    let b = dir.join("b.csv");
    let c = dir.join("c.csv");
    let out = run(&[
        "figure2",
        "--resolution",
        "64",
        "--boundary-out",
        b.to_str().unwrap(),
        "--contour-out",
        c.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let boundary = std::fs::read_to_string(&b).unwrap();
    let mut lambda0 = None;
    for line in boundary.lines().skip(5) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if f[0].abs() < 1e-12 {
            lambda0 = Some((f[1], f[2], f[3]));
        }
    }
    let (a0, b0, rdot) = lambda0.expect("lambda = 0 row on the grid");
    assert!((a0 - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!((b0 - 1.0).abs() < 1e-12);
    assert!((rdot - 0.718629733617202080).abs() < 1e-12);
    let contour = std::fs::read_to_string(&c).unwrap();
    assert!(contour.lines().count() > 40);

    assert_eq!(run(&["figure2", "--resolution", "15"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_determinism_and_zero_power() {
    let args = [
        "simulate", "--p", "1e-3", "--n", "50000", "--j", "2", "--seed", "5",
    ];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));

    // Zero power: plug-in MI within 3 standard errors of zero (plus the
    // plug-in bias allowance of (cells-1)/(2n)).
    let out = run(&[
        "simulate", "--p", "0", "--n", "200000", "--j", "0", "--seed", "3", "--format", "json",
    ]);
    assert!(out.status.success());
    let v = json_body(&out);
    let mi = v["points"][0]["mi_plugin_per_use"].as_f64().unwrap();
    let se = v["points"][0]["mi_plugin_se"].as_f64().unwrap();
    let bias = 7.0 / (2.0 * 200000.0);
    assert!(mi.abs() <= 3.0 * se + bias, "mi = {mi}, se = {se}");
}

#[test]
fn simulate_nyquist_output_shape() {
    let out = run(&[
        "simulate", "--p-grid", "1e-4,2e-4", "--n", "0", "--j", "2", "--pulse", "sinc",
        "--sampling", "nyquist",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("exact_law_cond_plus,1e-4,+1,+,"));
    assert!(text.contains("slope_normalized"));
}

#[test]
fn taps_export_shape() {
    let out = run(&["taps", "--pulse", "raised", "--half-width", "16"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1 + (2 * 32 + 1)); // header + quarter-grid window
    assert!(text.contains("tail_bound"));

    let out = run(&["taps", "--pulse", "sinc", "--half-width", "16"]);
    assert!(stdout(&out).contains("tail_bound=inf"));
}

#[test]
fn config_file_precedence_and_validation() {
    let dir = tmpdir("cfg");
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "lambda = 0.7\nn0 = 1\n").unwrap();

    // Config key supplies lambda when the flag is absent.
    let out = run(&["--config", cfg.to_str().unwrap(), "bound"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_body(&out);
    assert!((v["features"]["alpha0"].as_f64().unwrap() - 0.7).abs() > 1e-6); // boundary feature, not lambda
    assert!(stdout(&run(&["--config", cfg.to_str().unwrap(), "bound"])).contains("lambda=0.7"));

    // Flag overrides the file.
    let out = run(&["--config", cfg.to_str().unwrap(), "bound", "--lambda", "1.4"]);
    let v = json_body(&out);
    assert!((v["rate_slope"]["normalized"].as_f64().unwrap() - 0.746483247645214377).abs() < 1e-12);

    // Unknown keys are rejected before any computation.
    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "bound", "--lambda", "1.4"]);
    assert_eq!(out.status.code(), Some(2));

    // ONEBIT_CONFIG provides the default config path.
    std::fs::write(&cfg, "lambda = 1.4\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(["bound"])
        .env("ONEBIT_CONFIG", cfg.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn outputs_carry_provenance_headers() {
    let out = run(&["orthant", "--rho", "0.3"]);
    let text = stdout(&out);
    assert!(text.starts_with("# onebit "));
    assert!(text.contains("# command: orthant"));
    assert!(text.contains("# config_hash: "));

    let out = run(&["bound", "--lambda", "1.4"]);
    let v = json_body(&out);
    assert_eq!(v["meta"]["command"].as_str().unwrap(), "bound");
    assert_eq!(v["meta"]["config_hash"].as_str().unwrap().len(), 16);
}
