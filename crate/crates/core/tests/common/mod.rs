//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles here (closed-form 2x2 eigenvalues, the rational real part of
//! the example transfer function, finite differences, brute-force sweeps)
//! deliberately avoid the library code paths they are used to check.

#![allow(dead_code)]

use adaptctl_core::bounds::StaticLawConfig;
use adaptctl_core::linalg::SymMatrix;
use adaptctl_core::lyapunov::NominalCertificate;
use adaptctl_core::regressor::{AffineRow, BetaFamily};
use adaptctl_core::rng::SplitMix64;
use adaptctl_core::sim::{LinearErrorSystem, NoiseSpec, Sinusoid, UncertaintyModel, UpdateLaw};
use adaptctl_core::Mat;

pub const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Second-order example plant: natural frequency 1, damping 1/sqrt(2).
pub fn example_system() -> LinearErrorSystem {
    LinearErrorSystem::second_order(1.0, 1.0 / SQRT_2).unwrap()
}

/// The example certificate matrix `P = [[2.8*sqrt(2), 1], [1, sqrt(2)]]`
/// (printed elsewhere as [[3.9598, 1], [1, 1.4142]]); `PB = (1, sqrt(2))`.
pub fn example_p() -> SymMatrix {
    SymMatrix::from_rows(&[&[2.8 * SQRT_2, 1.0], &[1.0, SQRT_2]]).unwrap()
}

pub fn example_cert() -> NominalCertificate {
    let sys = example_system();
    NominalCertificate::new(example_p(), sys.a(), sys.b()).unwrap()
}

/// Regressor, weights and noise of the simulation study: β = (1, -e2)ᵀ,
/// W = (1, 1)ᵀ, band-limited noise capped at 0.01 plus 0.05·sin(1.7179·t).
pub fn study_uncertainty(seed: u64) -> UncertaintyModel {
    UncertaintyModel {
        beta: BetaFamily::Affine(vec![
            AffineRow::Constant(1.0),
            AffineRow::State { index: 1, coeff: -1.0 },
        ]),
        weights: vec![1.0, 1.0],
        noise: NoiseSpec {
            seed,
            sample_dt: 0.01,
            amplitude_bound: 0.01,
            sinusoids: vec![Sinusoid { amplitude: 0.05, frequency: 1.7179, phase: 0.0 }],
        },
    }
}

pub fn static_law(alpha: f64, dim: usize) -> UpdateLaw {
    UpdateLaw::Static { base_gain: SymMatrix::identity(dim), scaling: alpha }
}

pub fn pi_law(k: f64, rate: f64, damping: f64, dim: usize) -> UpdateLaw {
    UpdateLaw::Pi {
        feedthrough: SymMatrix::identity(dim).scale(k),
        rate: SymMatrix::identity(dim).scale(rate),
        damping: SymMatrix::identity(dim).scale(damping),
    }
}

pub fn study_config(alpha: f64, gamma: f64, mu: f64) -> StaticLawConfig {
    StaticLawConfig::new(SymMatrix::identity(2), alpha, gamma, mu, 1.0).unwrap()
}

/// Closed-form eigenvalues (ascending) of [[a, b], [b, c]].
pub fn eig2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let tr = a + c;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

/// Closed-form Re{H(jw)} = (1 + w²)/((1 - w²)² + 2w²) for the example plant
/// with v = (1, sqrt(2))ᵀ, obtained from the symbolic inverse of the
/// companion form.
pub fn re_h_closed(w: f64) -> f64 {
    let w2 = w * w;
    (1.0 + w2) / ((1.0 - w2) * (1.0 - w2) + 2.0 * w2)
}

/// Random symmetric matrix with entries in [-scale, scale].
pub fn random_sym(rng: &mut SplitMix64, n: usize, scale: f64) -> SymMatrix {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = rng.next_in(-scale, scale);
            m.set(i, j, x);
            m.set(j, i, x);
        }
    }
    SymMatrix::new(m).unwrap()
}

pub fn random_vec(rng: &mut SplitMix64, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.next_in(-scale, scale)).collect()
}

/// Random symmetric matrix with prescribed eigenvalues and a seeded
/// orthonormal frame; returns the matrix and the frame columns.
pub fn sym_with_spectrum(rng: &mut SplitMix64, eigs: &[f64]) -> (SymMatrix, Mat) {
    let n = eigs.len();
    // Random frame by Gram-Schmidt on random vectors.
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let mut cand = random_vec(rng, n, 1.0);
        for c in &cols {
            let proj: f64 = cand.iter().zip(c).map(|(a, b)| a * b).sum();
            for (x, y) in cand.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm: f64 = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            for x in cand.iter_mut() {
                *x /= norm;
            }
            cols.push(cand);
        }
    }
    let frame = Mat::from_fn(n, n, |i, j| cols[j][i]);
    let m = Mat::from_fn(n, n, |i, j| {
        (0..n).map(|k| eigs[k] * frame.get(i, k) * frame.get(j, k)).sum()
    });
    (SymMatrix::new(m).unwrap(), frame)
}
