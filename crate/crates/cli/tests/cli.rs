//! End-to-end tests of the binary: exit codes, file outputs, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

static DIR_COUNTER: AtomicU32 = AtomicU32::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "adaptctl-test-{}-{}-{}",
        std::process::id(),
        tag,
        DIR_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn adaptctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adaptctl"))
        .args(args)
        .env("ADAPTCTL_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const STUDY: &str = r#"{
  "schema": 1,
  "system": {"omega0": 1.0, "zeta": 0.7071067811865476},
  "certificate": {"kyp": {"v": [1.0, 1.4142135623730951], "varrho": 0.75, "kappa_fraction": 0.9}},
  "uncertainty": {
    "beta": {"kind": "affine", "rows": [{"constant": 1.0}, {"state": 2, "coeff": -1.0}]},
    "weights": [1.0, 1.0],
    "noise": {"seed": 7, "sample_dt": 0.01, "amplitude_bound": 0.01,
              "sinusoids": [{"amplitude": 0.05, "frequency": 1.7179}]}
  },
  "laws": [
    {"kind": "static", "label": "static_k5", "base_gain": 1.0, "scaling": 5.0},
    {"kind": "pi", "label": "pi_k5", "feedthrough": 5.0, "rate": 2.0, "damping": 0.2}
  ],
  "analysis": {"gamma": 0.0, "mu": 0.0},
  "run": {"dt": 0.001, "t_final": 5.0, "e0": [0.0, 1.5]}
}"#;

const LINEAR: &str = r#"{
  "schema": 1,
  "system": {"omega0": 1.0, "zeta": 0.7071067811865476},
  "certificate": {"p": [[3.959797974644666, 1.0], [1.0, 1.4142135623730951]]},
  "uncertainty": {
    "beta": {"kind": "constant", "value": 1.0},
    "weights": [1.0],
    "noise": {"seed": 1, "amplitude_bound": 0.0}
  },
  "laws": [
    {"kind": "static", "label": "k5", "base_gain": 1.0, "scaling": 5.0},
    {"kind": "pi", "label": "k5pi", "feedthrough": 5.0, "rate": 2.0, "damping": 0.2}
  ]
}"#;

#[test]
fn analyze_reports_certificate_numbers() {
    let dir = scratch_dir("analyze");
    let cfg = write_config(&dir, "study.json", STUDY);
    let out = adaptctl(&["analyze", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("beta_floor"), "{stdout}");
    assert!(stdout.contains("lift: true"));
    let csv = fs::read_to_string(dir.join("out/analyze.csv")).unwrap();
    assert!(csv.starts_with("name,value\n"));
    assert!(csv.contains("gamma_star"));
    assert!(csv.contains("tau"));
}

#[test]
fn kyp_writes_sweep_and_succeeds() {
    let dir = scratch_dir("kyp");
    let cfg = write_config(&dir, "study.json", STUDY);
    let out = adaptctl(&["kyp", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("sup_gain: 0.888888889"), "{stdout}");
    assert!(stdout.contains("kappa: 0.800000000"));
    assert!(stdout.contains("psi_free_witness: omega = 0"));
    let sweep = fs::read_to_string(dir.join("out/kyp_f_sweep.csv")).unwrap();
    assert!(sweep.starts_with("omega,f_criterion,f_psi_free,re_h\n"));
    assert_eq!(sweep.lines().count(), 4098); // header + 0 + 4096 grid points
}

#[test]
fn kyp_above_the_gain_bound_is_infeasible() {
    let dir = scratch_dir("kyp-bad");
    let body = STUDY.replace("\"kappa_fraction\": 0.9", "\"kappa_fraction\": 1.5");
    let cfg = write_config(&dir, "study.json", &body);
    let out = adaptctl(&["kyp", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    // No partial outputs on failure.
    assert!(!dir.join("out").exists() || fs::read_dir(dir.join("out")).unwrap().next().is_none());
}

#[test]
fn simulate_is_byte_identical_for_equal_seeds() {
    let dir = scratch_dir("sim-deterministic");
    let cfg = write_config(&dir, "study.json", STUDY);
    for sub in ["a", "b"] {
        let out = adaptctl(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "123",
            "--out", dir.join(sub).to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["traj_static_k5.csv", "traj_pi_k5.csv", "envelope_static_k5.csv"] {
        let a = fs::read(dir.join("a").join(name)).unwrap();
        let b = fs::read(dir.join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical");
    }
    // A different seed changes the noise draw and hence the trajectory.
    let out = adaptctl(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "7",
        "--out", dir.join("c").to_str().unwrap()]);
    assert!(out.status.success());
    let a = fs::read(dir.join("a").join("traj_static_k5.csv")).unwrap();
    let c = fs::read(dir.join("c").join("traj_static_k5.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn simulate_csv_header_matches_contract() {
    let dir = scratch_dir("sim-header");
    let cfg = write_config(&dir, "study.json", STUDY);
    let out = adaptctl(&["simulate", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert!(out.status.success());
    let st = fs::read_to_string(dir.join("out/traj_static_k5.csv")).unwrap();
    assert!(st.starts_with("t,e1,e2,What1,What2,u,q1,q2\n"));
    let pi = fs::read_to_string(dir.join("out/traj_pi_k5.csv")).unwrap();
    assert!(pi.starts_with("t,e1,e2,What1,What2,u,q1,q2,z1,z2\n"));
    assert_eq!(st.lines().count(), 5002); // header + 5001 samples at dt 1e-3 over 5 s
}

#[test]
fn malformed_configs_exit_2_naming_the_field() {
    let dir = scratch_dir("bad-config");
    // Missing B.
    let body = r#"{"schema": 1, "system": {"a": [[0.0, 1.0], [-1.0, -1.4142]]},
        "certificate": {"p": [[1.0, 0.0], [0.0, 1.0]]}}"#;
    let cfg = write_config(&dir, "missing_b.json", body);
    let out = adaptctl(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("system.b"));

    // Unknown field.
    let body = STUDY.replace("\"schema\": 1", "\"schema\": 1, \"extra\": true");
    let cfg = write_config(&dir, "unknown.json", &body);
    let out = adaptctl(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Unreadable path.
    let out = adaptctl(&["analyze", "--config", dir.join("nope.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Both certificate sources at once.
    let body = STUDY.replace(
        "\"certificate\": {\"kyp\":",
        "\"certificate\": {\"p\": [[1.0, 0.0], [0.0, 1.0]], \"kyp\":",
    );
    let cfg = write_config(&dir, "two_certs.json", &body);
    let out = adaptctl(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exactly one"));
}

#[test]
fn bode_rejects_nonlinear_regressor() {
    let dir = scratch_dir("bode-reject");
    let cfg = write_config(&dir, "study.json", STUDY);
    let out = adaptctl(&["bode", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("purely linear"));
}

#[test]
fn bode_writes_aligned_tables_per_law() {
    let dir = scratch_dir("bode");
    let cfg = write_config(&dir, "linear.json", LINEAR);
    let out = adaptctl(&["bode", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let st = fs::read_to_string(dir.join("out/bode_static_k5.csv")).unwrap();
    let pi = fs::read_to_string(dir.join("out/bode_pi_k5pi.csv")).unwrap();
    assert!(st.starts_with("omega,mag_db,phase_deg,re,im\n"));
    assert_eq!(st.lines().count(), pi.lines().count());
    // Rows align on the same frequencies for diffing.
    for (a, b) in st.lines().skip(1).zip(pi.lines().skip(1)) {
        assert_eq!(a.split(',').next(), b.split(',').next());
    }
    // DC agreement at the smallest frequency for K_P = 1/damping.
    let first_st: Vec<&str> = st.lines().nth(1).unwrap().split(',').collect();
    let first_pi: Vec<&str> = pi.lines().nth(1).unwrap().split(',').collect();
    let mag_st: f64 = first_st[1].parse().unwrap();
    let mag_pi: f64 = first_pi[1].parse().unwrap();
    assert!((mag_st - mag_pi).abs() < 1e-3, "{mag_st} vs {mag_pi}");
}

#[test]
fn reproduce_writes_figure_bundles() {
    let dir = scratch_dir("reproduce");
    let out1 = adaptctl(&["reproduce", "--figure", "1", "--out", dir.join("f1").to_str().unwrap()]);
    assert!(out1.status.success(), "stderr: {}", String::from_utf8_lossy(&out1.stderr));
    for name in ["fig1_f_sweep.csv", "fig1_g_profile.csv", "fig1.gp"] {
        assert!(dir.join("f1").join(name).exists(), "missing {name}");
    }
    let out2 = adaptctl(&["reproduce", "--figure", "2", "--out", dir.join("f2").to_str().unwrap()]);
    assert!(out2.status.success());
    let files: Vec<_> = fs::read_dir(dir.join("f2")).unwrap().collect();
    assert_eq!(files.len(), 7); // six trajectories + plot script
    let out3 = adaptctl(&["reproduce", "--figure", "3", "--out", dir.join("f3").to_str().unwrap()]);
    assert!(out3.status.success());
    let files: Vec<_> = fs::read_dir(dir.join("f3")).unwrap().collect();
    assert_eq!(files.len(), 7); // six sensitivity tables + plot script

    let bad = adaptctl(&["reproduce", "--figure", "9", "--out", dir.join("x").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scalar_system_certifies_with_unit_p() {
    // First-order lag: the constraint PB = v pins P = 1 and the strict
    // inequality holds with a wide margin.
    let dir = scratch_dir("scalar");
    let body = r#"{
      "schema": 1,
      "system": {"a": [[-1.0]], "b": [1.0]},
      "certificate": {"kyp": {"v": [1.0], "varrho": 0.5, "kappa_fraction": 0.5}}
    }"#;
    let cfg = write_config(&dir, "scalar.json", body);
    let out = adaptctl(&["kyp", "--config", cfg.to_str().unwrap(), "--out",
        dir.join("out").to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("sup_gain: 4.000000000"), "{stdout}");
    assert!(stdout.contains("P[0]: [+1.000000]"), "{stdout}");
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = scratch_dir("threads");
    for (sub, threads) in [("one", "1"), ("many", "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_adaptctl"))
            .args(["reproduce", "--figure", "2", "--seed", "9", "--out",
                dir.join(sub).to_str().unwrap()])
            .env("ADAPTCTL_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<String> = fs::read_dir(dir.join("one"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for name in names {
        let a = fs::read(dir.join("one").join(&name)).unwrap();
        let b = fs::read(dir.join("many").join(&name)).unwrap();
        assert_eq!(a, b, "{name} must not depend on the thread count");
    }
}

#[test]
fn usage_errors_exit_2() {
    let out = adaptctl(&[]);
    assert_eq!(out.status.code(), Some(2));
    let out = adaptctl(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = adaptctl(&["simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = adaptctl(&["reproduce"]);
    assert_eq!(out.status.code(), Some(2));
}
