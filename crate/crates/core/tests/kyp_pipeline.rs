//! Consistency of the frequency-domain criteria with the matrix-inequality
//! search on randomized plants, and the certified chain on the worked
//! example.

mod common;

use adaptctl_core::error::Error;
use adaptctl_core::kyp::{
    certify, check_spr, frequency_criteria, frequency_response, psi_free_witness,
    solve_constrained_lmi, sup_gain, FrequencyGrid, LmiMode,
};
use adaptctl_core::lyapunov::has_eigenvalue_lift;
use adaptctl_core::mat::vec_norm;
use adaptctl_core::rng::SplitMix64;
use adaptctl_core::Mat;
use num_complex::Complex64;

use common::*;

/// Companion second-order plant with natural frequency `w` and damping `z`.
fn companion(w: f64, z: f64) -> (Mat, Vec<f64>) {
    let a = Mat::from_rows(&[&[0.0, 1.0], &[-w * w, -2.0 * z * w]]).unwrap();
    (a, vec![0.0, 1.0])
}

/// Grid oracle for the pointwise threshold of the scan criterion: the
/// infimum over ω of `2Re{H}/(‖v‖²‖G‖² - |H|²)`, which the criterion is
/// violated above.
fn pointwise_kappa_limit(a: &Mat, b: &[f64], v: &[f64], grid: &FrequencyGrid) -> f64 {
    let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
    let mut inf = f64::INFINITY;
    for &w in grid.omegas() {
        let g = frequency_response(a, b, w).unwrap();
        let h: Complex64 = g.iter().zip(v).map(|(gi, &vi)| gi * vi).sum();
        let gsq: f64 = g.iter().map(|x| x.norm_sqr()).sum();
        let denom = v_norm_sq * gsq - h.norm_sqr();
        if denom > 1e-12 {
            inf = inf.min(2.0 * h.re / denom);
        }
    }
    inf
}

#[test]
fn criteria_and_solver_agree_on_random_second_order_plants() {
    let grid = FrequencyGrid::log_default();
    let mut rng = SplitMix64::new(0xfeed_0001);
    let mut feasible_seen = 0;
    let mut infeasible_seen = 0;
    for _case in 0..12 {
        let w = rng.next_in(0.6, 1.8);
        let z = rng.next_in(0.4, 1.2);
        let (a, b) = companion(w, z);
        let s = 2.0 * z * w;
        // v1 > 0 and v2 > v1/s keep Re{H} positive at both ends of the axis.
        let v1 = rng.next_in(0.3, 1.5);
        let v2 = v1 / s + rng.next_in(0.2, 1.5);
        let v = vec![v1, v2];

        let spr = check_spr(&a, &b, &v, &grid).unwrap();
        assert!(spr.is_spr, "constructed family must be SPR");

        // A gain inside the admissible interval must certify.
        let sup = sup_gain(&a, &b, &v, 0.5, &grid).unwrap();
        let kappa_ok = 0.8 * sup;
        let report = frequency_criteria(&a, &b, &v, kappa_ok, &grid).unwrap();
        assert!(report.holds, "criteria must hold below the admissible bound");
        let sol = solve_constrained_lmi(&a, &b, &v, kappa_ok, LmiMode::Strict, &grid)
            .expect("criteria hold, so the inequality must be feasible");
        let pb = sol.p.as_mat().mat_vec(&b);
        let err: f64 = pb.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "constraint violation {err:.2e}");
        feasible_seen += 1;

        // A gain above the pointwise threshold must fail the scan, and the
        // solver must refuse for the same reason.
        let kappa_bad = 1.05 * pointwise_kappa_limit(&a, &b, &v, &grid);
        let report_bad = frequency_criteria(&a, &b, &v, kappa_bad, &grid).unwrap();
        assert!(!report_bad.strictly_positive, "scan must fail above the threshold");
        match solve_constrained_lmi(&a, &b, &v, kappa_bad, LmiMode::Strict, &grid) {
            Err(Error::CriteriaViolated { .. }) => infeasible_seen += 1,
            other => panic!("expected criteria violation, got {other:?}"),
        }
    }
    assert_eq!(feasible_seen, 12);
    assert_eq!(infeasible_seen, 12);
}

#[test]
fn criteria_and_solver_agree_on_a_third_order_plant() {
    // Companion form of s³ + 2s² + 2s + 1 (roots -1, -1/2 ± j·sqrt(3)/2).
    let a = Mat::from_rows(&[
        &[0.0, 1.0, 0.0],
        &[0.0, 0.0, 1.0],
        &[-1.0, -2.0, -2.0],
    ])
    .unwrap();
    let b = vec![0.0, 0.0, 1.0];
    let grid = FrequencyGrid::log_default();
    let mut rng = SplitMix64::new(0xfeed_0002);
    let mut holds_seen = 0;
    let mut fails_seen = 0;
    for _case in 0..10 {
        let v = vec![rng.next_in(0.1, 1.0), rng.next_in(0.0, 2.0), rng.next_in(0.0, 2.0)];
        for kappa in [0.1, 0.5, 1.5] {
            let Ok(report) = frequency_criteria(&a, &b, &v, kappa, &grid) else {
                continue;
            };
            let solved = solve_constrained_lmi(&a, &b, &v, kappa, LmiMode::Strict, &grid);
            if report.holds {
                holds_seen += 1;
                let sol = solved.expect("criteria hold, solver must succeed");
                assert!(sol.residual_max_eig < -1e-8);
                let pb = sol.p.as_mat().mat_vec(&b);
                for (x, y) in pb.iter().zip(&v) {
                    assert!((x - y).abs() < 1e-9);
                }
            } else {
                fails_seen += 1;
                assert!(solved.is_err(), "criteria fail, solver must refuse");
            }
        }
    }
    assert!(holds_seen > 0, "need at least one feasible case");
    assert!(fails_seen > 0, "need at least one infeasible case");
}

#[test]
fn admissible_interval_certifies_throughout() {
    // Every sampled gain in (0, sup) yields a strictly feasible certificate.
    let sys = example_system();
    let cert = example_cert();
    let v = cert.v().to_vec();
    let grid = FrequencyGrid::log_default();
    let sup = sup_gain(sys.a(), sys.b(), &v, 0.75, &grid).unwrap();
    for fraction in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let kappa = fraction * sup;
        let sol = solve_constrained_lmi(sys.a(), sys.b(), &v, kappa, LmiMode::Strict, &grid)
            .unwrap_or_else(|e| panic!("kappa = {kappa}: {e}"));
        assert!(sol.residual_max_eig < -1e-8);
        // Witness plus feasibility implies the eigenvalue lift.
        if psi_free_witness(sys.a(), sys.b(), &v, kappa, &grid).unwrap().is_some() {
            assert!(has_eigenvalue_lift(&sol.q, &Mat::column(&v)).unwrap());
        }
    }
}

#[test]
fn slack_mode_accepts_an_interior_psi() {
    let sys = example_system();
    let cert = example_cert();
    let v = cert.v().to_vec();
    let grid = FrequencyGrid::log_default();
    // The strict solution tolerates a small explicit slack.
    let sol =
        solve_constrained_lmi(sys.a(), sys.b(), &v, 0.8, LmiMode::Slack(0.05), &grid).unwrap();
    assert!(sol.residual_max_eig <= 1e-10);
    assert!(adaptctl_core::linalg::is_pos_def(&sol.p, 0.0));
}

#[test]
fn full_pipeline_verdict_is_reproducible() {
    let sys = example_system();
    let cert = example_cert();
    let v = cert.v().to_vec();
    let grid = FrequencyGrid::log_default();
    let first = certify(sys.a(), sys.b(), &v, 0.75, 0.9, &grid).unwrap();
    let second = certify(sys.a(), sys.b(), &v, 0.75, 0.9, &grid).unwrap();
    assert_eq!(first.kappa.to_bits(), second.kappa.to_bits());
    assert_eq!(
        first.lmi.p.as_mat().data(),
        second.lmi.p.as_mat().data(),
        "deterministic multi-start must reproduce P bit for bit"
    );
}

#[test]
fn response_residual_on_the_grid() {
    let sys = example_system();
    let grid = FrequencyGrid::log_default();
    let b_norm = vec_norm(sys.b());
    for &w in grid.omegas() {
        let g = frequency_response(sys.a(), sys.b(), w).unwrap();
        // ‖(jωI - A)G - B‖ directly.
        let n = sys.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let mut acc = Complex64::new(-sys.b()[i], 0.0);
            for j in 0..n {
                let m = Complex64::new(-sys.a().get(i, j), if i == j { w } else { 0.0 });
                acc += m * g[j];
            }
            worst = worst.max(acc.norm());
        }
        assert!(worst <= 1e-10 * b_norm, "residual {worst:.2e} at omega {w:.2e}");
    }
}
