//! End-to-end tests of the `varreg` binary: presets, report files, exit
//! codes and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn varreg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_varreg"))
}

fn run(args: &[&str], out: &Path) -> Output {
    let mut cmd = varreg();
    cmd.args(args)
        .arg("--out")
        .arg(out)
        .env_remove("VARREG_SEED");
    cmd.output().expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("varreg-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn solve_example24_tikhonov() {
    let dir = tmp_dir("solve-tik");
    let out = run(&["solve", "--preset", "example24"], &dir);
    assert!(out.status.success(), "{out:?}");
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.join("solve_report.json"))).unwrap();
    let x = json["minimizers"][0][0].as_f64().unwrap();
    assert!((x + 0.257434).abs() < 1e-3, "x = {x}");
    let t = json["objective"].as_f64().unwrap();
    assert!((t - 1.823985).abs() < 1e-5, "T = {t}");
    assert_eq!(json["unique"], serde_json::json!(true));
}

#[test]
fn solve_example24_ivanov_and_morozov_pick_zero() {
    let dir = tmp_dir("solve-iv");
    for problem in ["ivanov", "morozov"] {
        let out = run(
            &["solve", "--preset", "example24", "--problem", problem, "--parameter", "1.0"],
            &dir,
        );
        assert!(out.status.success(), "{problem}: {out:?}");
        let json: serde_json::Value =
            serde_json::from_str(&read(&dir.join("solve_report.json"))).unwrap();
        let x = json["minimizers"][0][0].as_f64().unwrap();
        assert!(x.abs() <= 1e-8, "{problem}: x = {x}");
    }
}

#[test]
fn malformed_config_exits_one_with_diagnostic() {
    let dir = tmp_dir("badcfg");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["solve", "--config", bad.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty(), "diagnostic expected on stderr");

    // unknown keys are schema violations, not silently ignored
    let bad2 = dir.join("bad2.json");
    std::fs::write(&bad2, r#"{"problem": "tikhonov", "oops": 1}"#).unwrap();
    let out = run(&["solve", "--config", bad2.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("oops"), "{err}");
}

#[test]
fn infeasible_morozov_exits_two() {
    let dir = tmp_dir("infeasible");
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{
            "problem": "morozov",
            "scheme": {
                "forward": { "kind": "linear", "matrix": [[1.0], [0.0]] },
                "discrepancy": "sqnorm",
                "regularizer": "sqnorm"
            },
            "y": [0.0, 1.0],
            "parameter": 0.5
        }"#,
    )
    .unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn kl_counterexample_rows_match_closed_forms() {
    let dir = tmp_dir("klrows");
    let out = run(&["kl", "--preset", "kl-counter"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = read(&dir.join("kl_counterexample.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,eps,dkl_exact,dkl_closed_form,l1"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let dkl: f64 = first[2].parse().unwrap();
    let l1: f64 = first[4].parse().unwrap();
    assert!((dkl - 0.6091349662870734).abs() < 1e-12);
    assert!((l1 - 0.3908650337129266).abs() < 1e-12);
    // last row: n = 1e6
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "1000000");
    let dkl: f64 = last[2].parse().unwrap();
    let l1: f64 = last[4].parse().unwrap();
    assert!((dkl - 0.9276176587318716).abs() < 1e-12);
    assert!(l1 <= 0.08);
}

#[test]
fn figure1_anchor_rows() {
    let dir = tmp_dir("fig1");
    let out = run(&["figure1"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = read(&dir.join("figure1.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,rho,R,T_0.5,T_1,T_1.5");
    let parse_row = |line: &str| -> Vec<f64> {
        line.split(',').map(|f| f.parse().unwrap()).collect()
    };
    let rows: Vec<Vec<f64>> = lines.map(parse_row).collect();
    let near = |target: f64| {
        rows.iter()
            .min_by(|a, b| (a[0] - target).abs().total_cmp(&(b[0] - target).abs()))
            .unwrap()
    };
    // at x = 0: rho = 1, R = 1, T_alpha = 1 + alpha
    let r = near(0.0);
    assert!((r[1] - 1.0).abs() < 1e-12 && (r[2] - 1.0).abs() < 1e-12);
    assert!((r[3] - 1.5).abs() < 1e-12 && (r[4] - 2.0).abs() < 1e-12 && (r[5] - 2.5).abs() < 1e-12);
    // at x = 1: rho = 0, R = 2, T_1 = 2
    let r = near(1.0);
    assert!(r[1].abs() < 1e-12 && (r[2] - 2.0).abs() < 1e-12 && (r[4] - 2.0).abs() < 1e-12);
    // at x = -1: R = 0, T_alpha = rho(-1) = 8 for every alpha
    let r = near(-1.0);
    assert!(r[2].abs() < 1e-12);
    for k in [3, 4, 5] {
        assert!((r[k] - 8.0).abs() < 1e-11, "T column {k} = {}", r[k]);
    }
}

#[test]
fn crosscheck_example24_passes_with_converse_rows() {
    let dir = tmp_dir("cross");
    let out = run(&["crosscheck", "--preset", "example24"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = read(&dir.join("crosscheck.csv"));
    assert!(csv.contains("ivanov->morozov,PASS"));
    assert!(csv.contains("morozov->ivanov,PASS"));
    for alpha in ["0.25", "0.5", "1", "1.5", "2"] {
        assert!(
            csv.contains(&format!("converse_not_tikhonov_alpha_{alpha},PASS")),
            "missing converse row for alpha {alpha} in:\n{csv}"
        );
    }
    assert!(!csv.contains("FAIL"));
    assert!(!csv.contains("SKIP"));
}

#[test]
fn converge_r3_preset_has_monotone_error_column() {
    let dir = tmp_dir("r3");
    let out = run(&["converge", "--preset", "r3-diag"], &dir);
    assert!(out.status.success(), "{out:?}");
    let csv = read(&dir.join("converge_r3.csv"));
    let errs: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 20);
    for w in errs.windows(2) {
        assert!(w[1] <= w[0] * 1.1, "error column jumped: {w:?}");
    }
    assert!(*errs.last().unwrap() < 1e-3);
}

#[test]
fn negative_control_exits_three() {
    let dir = tmp_dir("control");
    let cfg = dir.join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{
            "experiment": "r3",
            "scheme": {
                "forward": { "kind": "linear", "matrix": [[1.0, 0.0], [0.0, 0.05]] },
                "discrepancy": "sqnorm",
                "regularizer": "sqnorm"
            },
            "x_exact": [1.0, 1.0],
            "levels": 20,
            "rule": { "kind": "constant", "alpha": 0.5 },
            "seed": 17
        }"#,
    )
    .unwrap();
    let out = run(&["converge", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn byte_identical_reruns_and_seed_precedence() {
    let dir_a = tmp_dir("det-a");
    let dir_b = tmp_dir("det-b");
    let cfg = dir_a.join("borwein.json");
    std::fs::write(&cfg, r#"{"task": "borwein", "trials": 50, "seed": 5}"#).unwrap();

    let out = run(&["kl", "--config", cfg.to_str().unwrap()], &dir_a);
    assert!(out.status.success());
    let out = run(&["kl", "--config", cfg.to_str().unwrap()], &dir_b);
    assert!(out.status.success());
    assert_eq!(
        read(&dir_a.join("kl_borwein.csv")),
        read(&dir_b.join("kl_borwein.csv")),
        "identical config and seed must give byte-identical output"
    );

    // VARREG_SEED overrides the config seed
    let dir_c = tmp_dir("det-c");
    let out = varreg()
        .args(["kl", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(&dir_c)
        .env("VARREG_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(
        read(&dir_a.join("kl_borwein.csv")),
        read(&dir_c.join("kl_borwein.csv")),
        "a different seed must change the sampled pairs"
    );

    // the explicit flag beats the environment
    let dir_d = tmp_dir("det-d");
    let out = varreg()
        .args(["kl", "--config", cfg.to_str().unwrap(), "--seed", "5", "--out"])
        .arg(&dir_d)
        .env("VARREG_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        read(&dir_a.join("kl_borwein.csv")),
        read(&dir_d.join("kl_borwein.csv"))
    );
}

#[test]
fn rho2_probe_families() {
    let dir = tmp_dir("probe");
    let cfg = dir.join("probe.json");
    std::fs::write(
        &cfg,
        r#"{"task": "rho2_probe", "family": "shrinking", "length": 40}"#,
    )
    .unwrap();
    let out = run(&["kl", "--config", cfg.to_str().unwrap()], &dir);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("divergence_converged=true"));

    // the spike family fails the divergence criterion: implication vacuous
    std::fs::write(
        &cfg,
        r#"{"task": "rho2_probe", "family": "spike", "length": 20}"#,
    )
    .unwrap();
    let out = run(&["kl", "--config", cfg.to_str().unwrap()], &dir);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("vacuous=true"));
}

#[test]
fn unknown_preset_lists_alternatives() {
    let dir = tmp_dir("preset");
    let out = run(&["solve", "--preset", "nope"], &dir);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("example24"), "{err}");
}
