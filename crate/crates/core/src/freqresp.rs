//! Disturbance-observer view of the adaptation for the purely linear case
//! with a scalar constant regressor: the transfer from the lumped input
//! disturbance `d = W + η` to the calculated weight `Ŵ` is
//! `R(sI - A + BR)⁻¹B`, with the update-law-dependent row `R`.
//!
//! The general nonlinear case has no transfer function; callers must restrict
//! the uncertainty to `β ≡ 1` before using this module.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lyapunov::NominalCertificate;
use crate::mat::solve_complex;
use crate::sim::{LinearErrorSystem, UpdateLaw};

/// One point of the sensitivity function.
#[derive(Debug, Clone, Copy)]
pub struct SensitivitySample {
    pub omega: f64,
    pub value: Complex64,
    pub mag_db: f64,
    pub phase_deg: f64,
}

impl SensitivitySample {
    fn from_value(omega: f64, value: Complex64) -> Self {
        Self {
            omega,
            value,
            mag_db: 20.0 * libm::log10(value.norm()),
            phase_deg: value.arg() * 180.0 / core::f64::consts::PI,
        }
    }
}

/// Scalar gains of a one-dimensional update law.
struct ScalarLaw {
    kind: ScalarLawKind,
}

enum ScalarLawKind {
    Static { k: f64 },
    Pi { k: f64, rate: f64, damping: f64 },
}

fn scalar_law(law: &UpdateLaw) -> Result<ScalarLaw> {
    if law.dim() != 1 {
        return Err(Error::InvalidParameter(
            "frequency-domain analysis needs a scalar update law (regressor ≡ 1)".into(),
        ));
    }
    law.validate()?;
    Ok(match law {
        UpdateLaw::Static { base_gain, scaling } => {
            ScalarLaw { kind: ScalarLawKind::Static { k: base_gain.get(0, 0) * scaling } }
        }
        UpdateLaw::Pi { feedthrough, rate, damping } => ScalarLaw {
            kind: ScalarLawKind::Pi {
                k: feedthrough.get(0, 0),
                rate: rate.get(0, 0),
                damping: damping.get(0, 0),
            },
        },
    })
}

/// The regulator row `R(s)`: `K_P·BᵀP` for the static law and
/// `(K + s⁻¹Γ)/(1 + s⁻¹ΓΣ)·BᵀP` for the PI law. The PI prefactor has a
/// single pole at `s = -ΓΣ`; evaluation there is rejected.
pub fn regulator_row(
    law: &UpdateLaw,
    cert: &NominalCertificate,
    s: Complex64,
) -> Result<Vec<Complex64>> {
    let scalar = scalar_law(law)?;
    let prefactor = match scalar.kind {
        ScalarLawKind::Static { k } => Complex64::new(k, 0.0),
        ScalarLawKind::Pi { k, rate, damping } => {
            // (K + Γ/s)/(1 + ΓΣ/s) = (sK + Γ)/(s + ΓΣ), regular at s = 0.
            let denom = s + rate * damping;
            if denom.norm() <= 1e-12 * (rate * damping).abs().max(1.0) {
                return Err(Error::PrefactorPole);
            }
            (s * k + rate) / denom
        }
    };
    // BᵀP = (PB)ᵀ = vᵀ.
    Ok(cert.v().iter().map(|&vi| prefactor * vi).collect())
}

/// Sensitivity of `Ŵ` against the input disturbance at frequency ω:
/// `R(jωI - A + BR)⁻¹B` by an exact complex solve.
pub fn sensitivity(
    law: &UpdateLaw,
    sys: &LinearErrorSystem,
    cert: &NominalCertificate,
    omega: f64,
) -> Result<SensitivitySample> {
    let n = sys.dim();
    if cert.dim() != n {
        return Err(Error::DimensionMismatch("system and certificate must agree".into()));
    }
    let s = Complex64::new(0.0, omega);
    let r = regulator_row(law, cert, s)?;
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            m.push(diag - sys.a().get(i, j) + sys.b()[i] * r[j]);
        }
    }
    let rhs: Vec<Complex64> = sys.b().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let x = solve_complex(&m, n, &rhs)
        .map_err(|_| Error::Singular(alloc::format!("closed loop singular at omega = {omega}")))?;
    let value: Complex64 = r.iter().zip(&x).map(|(ri, xi)| ri * xi).sum();
    Ok(SensitivitySample::from_value(omega, value))
}

/// Sensitivity samples over a frequency grid, aligned row-by-row with the
/// input frequencies.
pub fn bode_table(
    law: &UpdateLaw,
    sys: &LinearErrorSystem,
    cert: &NominalCertificate,
    omegas: &[f64],
) -> Result<Vec<SensitivitySample>> {
    omegas.iter().map(|&w| sensitivity(law, sys, cert, w)).collect()
}
