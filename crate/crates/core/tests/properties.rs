//! Property-based invariants of the numerical kernels.

mod common;

use adaptctl_core::linalg::{
    block_matrix, block_neg_semidef, max_eig, min_eig, sym_eig, SymMatrix,
};
use adaptctl_core::lyapunov::{lift_min_eig, solve_lyapunov};
use adaptctl_core::sim::{make_noise, NoiseSpec, Sinusoid};
use adaptctl_core::Mat;
use proptest::prelude::*;

fn sym_from_upper(n: usize, upper: &[f64]) -> SymMatrix {
    let mut m = Mat::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            m.set(i, j, upper[idx]);
            m.set(j, i, upper[idx]);
            idx += 1;
        }
    }
    SymMatrix::new(m).unwrap()
}

/// Gershgorin-shifted random matrix: strictly diagonally dominant with
/// negative diagonal, hence Hurwitz.
fn hurwitz_from_entries(n: usize, entries: &[f64]) -> Mat {
    let mut a = Mat::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, entries[idx]);
            idx += 1;
        }
    }
    for i in 0..n {
        let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
        a.set(i, i, -(row_sum + 0.2 + a.get(i, i).abs()));
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn eigendecomposition_reconstructs(upper in prop::collection::vec(-3.0f64..3.0, 10)) {
        let m = sym_from_upper(4, &upper);
        let eig = sym_eig(&m);
        let scale = m.as_mat().max_abs().max(1.0);
        // Ascending order.
        for w in eig.values.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12 * scale);
        }
        // Σ λ v vᵀ = M.
        let n = 4;
        let mut recon = Mat::zeros(n, n);
        for k in 0..n {
            let v = eig.vector(k);
            for i in 0..n {
                for j in 0..n {
                    recon.set(i, j, recon.get(i, j) + eig.values[k] * v[i] * v[j]);
                }
            }
        }
        prop_assert!(recon.sub(m.as_mat()).max_abs() <= 1e-8 * scale);
    }

    #[test]
    fn lyapunov_round_trip(entries in prop::collection::vec(-2.0f64..2.0, 9),
                           q_upper in prop::collection::vec(-2.0f64..2.0, 6),
                           boost in 0.1f64..3.0) {
        let a = hurwitz_from_entries(3, &entries);
        // Positive definite Q from a random symmetric part plus a shift.
        let q_raw = sym_from_upper(3, &q_upper);
        let shift = (-min_eig(&q_raw)).max(0.0) + boost;
        let q = q_raw.add(&SymMatrix::identity(3).scale(shift));
        let p = solve_lyapunov(&a, &q).unwrap();
        let recon = a.transpose().matmul(p.as_mat()).add(&p.as_mat().matmul(&a)).scale(-1.0);
        let err = recon.sub(q.as_mat()).frobenius_norm();
        prop_assert!(err <= 1e-9 * q.as_mat().frobenius_norm().max(1.0));
        // Q > 0 forces P > 0 for a Hurwitz matrix.
        prop_assert!(min_eig(&p) > 0.0);
    }

    #[test]
    fn lift_is_monotone_lipschitz_bounded(q_upper in prop::collection::vec(-2.0f64..2.0, 6),
                                          v in prop::collection::vec(-2.0f64..2.0, 3),
                                          phi1 in 0.0f64..50.0,
                                          chi in 0.0f64..50.0) {
        let q = sym_from_upper(3, &q_upper);
        let vm = Mat::column(&v);
        let g1 = lift_min_eig(phi1, &q, &vm).unwrap();
        let g2 = lift_min_eig(phi1 + chi, &q, &vm).unwrap();
        prop_assert!(g2 + 1e-10 >= g1);
        let lip: f64 = v.iter().map(|x| x * x).sum();
        prop_assert!(g2 - g1 <= chi * lip + 1e-8);
        prop_assert!(g1 >= min_eig(&q) - 1e-9);
        prop_assert!(g1 <= max_eig(&q) + 1e-9);
    }

    #[test]
    fn block_predicate_matches_assembled(m_upper in prop::collection::vec(-2.0f64..2.0, 6),
                                         off in prop::collection::vec(-1.0f64..1.0, 3),
                                         make_neg in proptest::bool::ANY,
                                         zero_off in proptest::bool::ANY) {
        let base = sym_from_upper(3, &m_upper);
        let m = if make_neg {
            base.add(&SymMatrix::identity(3).scale(-(max_eig(&base) + 0.5)))
        } else {
            base
        };
        let off: Vec<f64> = if zero_off {
            vec![0.0; 3]
        } else {
            // Keep clearly away from the tolerance boundary.
            let norm: f64 = off.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-2 { vec![0.05, 0.0, 0.0] } else { off }
        };
        let predicate = block_neg_semidef(&m, &off, 1e-10).unwrap();
        let assembled = block_matrix(&m, &off);
        prop_assert_eq!(predicate, max_eig(&assembled) <= 1e-10);
    }

    #[test]
    fn noise_stays_within_declared_bound(seed in proptest::num::u64::ANY,
                                         cap in 0.0f64..0.5,
                                         amp in 0.0f64..0.3,
                                         t in 0.0f64..1000.0) {
        let spec = NoiseSpec {
            seed,
            sample_dt: 0.01,
            amplitude_bound: cap,
            sinusoids: vec![Sinusoid { amplitude: amp, frequency: 1.7179, phase: 0.3 }],
        };
        let eta_star = spec.eta_star();
        let signal = make_noise(spec).unwrap();
        prop_assert!(signal.eval(t).abs() <= eta_star + 1e-12);
    }
}
