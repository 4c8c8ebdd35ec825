//! Closed-form performance certificates for the static update law: ultimate
//! bound and residual error, convergence rate, transient envelope, settling
//! time, the admissible gain-scaling threshold, the suboptimal damping share
//! γ*, and the linear-growth bound τ below which the origin is attracting.

use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::lyapunov::{lift_derivative, NominalCertificate};
use crate::mat::{vec_dot, vec_norm};
use crate::regressor::BetaFamily;
use crate::search::{bisect_predicate, bisect_sign, grid_golden_max, GRID_POINTS};

/// Parameters of the static update law `Ŵ = α K_b β BᵀP e` together with the
/// analysis knobs: the damping share γ ∈ [0, 1), the settling-rate constant
/// μ ≥ 0 and the regressor floor `inf βᵀK_b β`.
#[derive(Debug, Clone)]
pub struct StaticLawConfig {
    base_gain: SymMatrix,
    scaling: f64,
    gamma: f64,
    mu: f64,
    beta_floor: f64,
}

impl StaticLawConfig {
    pub fn new(
        base_gain: SymMatrix,
        scaling: f64,
        gamma: f64,
        mu: f64,
        beta_floor: f64,
    ) -> Result<Self> {
        if !crate::linalg::is_pos_def(&base_gain, 0.0) {
            return Err(Error::NotPositiveDefinite {
                min_eig: crate::linalg::min_eig(&base_gain),
            });
        }
        if !(scaling > 0.0) {
            return Err(Error::InvalidParameter("gain scaling must be positive".into()));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("gamma must be in [0, 1), got {gamma}")));
        }
        if !(mu >= 0.0) {
            return Err(Error::InvalidParameter("mu must be non-negative".into()));
        }
        if !(beta_floor >= 0.0) {
            return Err(Error::InvalidParameter("regressor floor must be non-negative".into()));
        }
        Ok(Self { base_gain, scaling, gamma, mu, beta_floor })
    }

    pub fn base_gain(&self) -> &SymMatrix {
        &self.base_gain
    }

    pub fn scaling(&self) -> f64 {
        self.scaling
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn beta_floor(&self) -> f64 {
        self.beta_floor
    }

    /// Full gain `K = α K_b`.
    pub fn gain(&self) -> SymMatrix {
        self.base_gain.scale(self.scaling)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.base_gain.clone(), self.scaling, gamma, self.mu, self.beta_floor)
    }

    pub fn with_scaling(&self, scaling: f64) -> Result<Self> {
        Self::new(self.base_gain.clone(), scaling, self.gamma, self.mu, self.beta_floor)
    }
}

/// Certified performance numbers for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// Ultimate bound of ‖e‖ (at the configured μ).
    pub ultimate: f64,
    /// Convergence rate of the transient envelope, 1/time.
    pub rate: f64,
    /// Residual error: the ultimate bound at μ = 0.
    pub residual: f64,
    /// Settling time, when an initial level set is known (μ > 0 only).
    pub settling: Option<f64>,
}

/// Exact infimum `inf β(x)ᵀ K_b β(x)` for the supported regressor families.
pub fn beta_infimum(family: &BetaFamily, k_b: &SymMatrix) -> Result<f64> {
    if !crate::linalg::is_pos_def(k_b, 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig: crate::linalg::min_eig(k_b) });
    }
    family.infimum(k_b)
}

/// The squared load carried by the bound: `Wᵀ K_b⁻¹ W + η*²/(𝒷(1-γ))`,
/// divided by α, plus μ. Requires 𝒷 > 0 unless η* = 0.
fn load_term(cfg: &StaticLawConfig, w: &[f64], eta_star: f64, mu: f64) -> Result<f64> {
    if w.len() != cfg.base_gain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "weights have length {}, gain dimension is {}",
            w.len(),
            cfg.base_gain.dim()
        )));
    }
    if !(eta_star >= 0.0) {
        return Err(Error::InvalidParameter("eta_star must be non-negative".into()));
    }
    let structural = {
        let x = cfg.base_gain.as_mat().solve(w)?;
        vec_dot(w, &x)
    };
    let unstructured = if eta_star == 0.0 {
        0.0
    } else if cfg.beta_floor > 0.0 {
        eta_star * eta_star / (cfg.beta_floor * (1.0 - cfg.gamma))
    } else {
        return Err(Error::RegressorBoundZero);
    };
    Ok((structural + unstructured) / cfg.scaling + mu)
}

/// Ultimate bound of ‖e‖ with the static update law, its μ = 0 residual and
/// the certified convergence rate. Requires a positive regressor floor.
pub fn ultimate_bound(
    cert: &NominalCertificate,
    cfg: &StaticLawConfig,
    w: &[f64],
    eta_star: f64,
) -> Result<BoundReport> {
    if cfg.beta_floor <= 0.0 {
        return Err(Error::RegressorBoundZero);
    }
    let g = cert.lift_at(cfg.scaling * cfg.beta_floor * cfg.gamma);
    let shape = libm::sqrt(cert.lambda_max_p() / (g * cert.lambda_min_p()));
    let ultimate = shape * libm::sqrt(load_term(cfg, w, eta_star, cfg.mu)?);
    let residual = shape * libm::sqrt(load_term(cfg, w, eta_star, 0.0)?);
    Ok(BoundReport { ultimate, rate: g / cert.lambda_max_p(), residual, settling: None })
}

/// Convergence rate `g(α𝒷γ, Q, PB)/λ_max(P)` of the transient envelope.
pub fn convergence_rate(cert: &NominalCertificate, cfg: &StaticLawConfig) -> f64 {
    cert.lift_at(cfg.scaling * cfg.beta_floor * cfg.gamma) / cert.lambda_max_p()
}

/// Right-hand side of the transient envelope at time `t`, valid when
/// `‖e(0)‖` is at least the residual error.
pub fn transient_envelope(
    t: f64,
    e0_norm: f64,
    cert: &NominalCertificate,
    cfg: &StaticLawConfig,
    w: &[f64],
    eta_star: f64,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter("time must be non-negative".into()));
    }
    let g = cert.lift_at(cfg.scaling * cfg.beta_floor * cfg.gamma);
    let shape_sq = cert.lambda_max_p() / (g * cert.lambda_min_p());
    let residual_sq = shape_sq * load_term(cfg, w, eta_star, 0.0)?;
    let residual = libm::sqrt(residual_sq);
    if e0_norm < residual {
        return Err(Error::EnvelopeHypothesis { e0_norm, residual });
    }
    let rate = g / cert.lambda_max_p();
    let cond = cert.lambda_max_p() / cert.lambda_min_p();
    let transient = cond * e0_norm * e0_norm - residual_sq;
    Ok(libm::sqrt(residual_sq + libm::exp(-rate * t) * transient))
}

/// Settling time `(V0 - ρ(μ))/μ`: how long the Lyapunov function needs to
/// fall from `V0` into the invariant level set `ρ(μ)`.
pub fn settling_time(v0: f64, rho_mu: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter("mu must be positive for a settling time".into()));
    }
    if v0 < rho_mu {
        return Err(Error::InvalidParameter(format!(
            "initial level {v0} already below the invariant level {rho_mu}"
        )));
    }
    Ok((v0 - rho_mu) / mu)
}

/// The `e`-dependent part of the invariant level: `λ_max(P)·v_e(μ)²`, where
/// `v_e` shrinks the ultimate-bound radius by the condition factor. Constant
/// Lyapunov offsets cancel between `V0` and `ρ(μ)`, so the settling time for
/// an initial state `e0` is `(e0ᵀPe0 - level)/μ`.
pub fn settling_level(
    cert: &NominalCertificate,
    cfg: &StaticLawConfig,
    w: &[f64],
    eta_star: f64,
) -> Result<f64> {
    if cfg.beta_floor <= 0.0 {
        return Err(Error::RegressorBoundZero);
    }
    let g = cert.lift_at(cfg.scaling * cfg.beta_floor * cfg.gamma);
    // v_e² = (load/α + μ)/g.
    Ok(cert.lambda_max_p() * load_term(cfg, w, eta_star, cfg.mu)? / g)
}

/// Smallest admissible gain scaling: `λ_min(Q)/(𝒷·g'(0⁺))` with the
/// one-sided lift derivative taken just right of the origin. Errors when the
/// lift condition fails there.
pub fn gain_scaling_lower_bound(cert: &NominalCertificate, beta_floor: f64) -> Result<f64> {
    if beta_floor <= 0.0 {
        return Err(Error::RegressorBoundZero);
    }
    let d = lift_derivative(1e-8, cert.q(), &cert.v_column())?;
    if d.value <= 1e-10 {
        return Err(Error::NoEigenvalueLift);
    }
    Ok(cert.lambda_min_q() / (beta_floor * d.value))
}

/// Suboptimal damping share γ* = Φ*/(α𝒷): the largest Φ such that
/// `φ + g(φ)/g'(φ) ≤ α𝒷` holds on all of (0, Φ]. Guarantees that the
/// residual error at γ* does not exceed the γ = 0 residual.
pub fn suboptimal_gamma(cert: &NominalCertificate, cfg: &StaticLawConfig) -> Result<f64> {
    let floor = cfg.beta_floor;
    let alpha_min = gain_scaling_lower_bound(cert, floor)?;
    if cfg.scaling <= alpha_min {
        return Err(Error::InconsistentInputs(format!(
            "gain scaling {} is not above the admissible threshold {alpha_min}",
            cfg.scaling
        )));
    }
    let p = cfg.scaling * floor;
    let q = cert.q();
    let v = cert.v_column();
    let admissible = |phi: f64| -> bool {
        let g = crate::lyapunov::lift_min_eig(phi, q, &v).expect("certificate dims");
        let d = lift_derivative(phi, q, &v).expect("certificate dims");
        if d.value <= 1e-300 {
            return false;
        }
        phi + g / d.value <= p
    };
    // φ = p itself always violates (g > 0), so a first violation exists on
    // the grid; refine the boundary by bisection.
    let mut first_fail = None;
    let mut last_ok = 0.0;
    for k in 1..=GRID_POINTS {
        let phi = p * k as f64 / GRID_POINTS as f64;
        if admissible(phi) {
            last_ok = phi;
        } else {
            first_fail = Some(phi);
            break;
        }
    }
    let Some(fail) = first_fail else {
        return Err(Error::InconsistentInputs(
            "no violation point found below the scaling cap".into(),
        ));
    };
    if last_ok == 0.0 {
        let probe = p * 1e-9;
        if !admissible(probe) {
            return Err(Error::InconsistentInputs(
                "admissible set is empty, contradicting the scaling lower bound".into(),
            ));
        }
        last_ok = probe;
    }
    let phi_star = bisect_predicate(last_ok, fail, admissible);
    let gamma_star = phi_star / p;
    if !(0.0..1.0).contains(&gamma_star) {
        return Err(Error::InconsistentInputs(format!("gamma* = {gamma_star} outside (0, 1)")));
    }
    // Certified consequence of the construction; must hold up to roundoff.
    let lifted = crate::lyapunov::lift_min_eig(p * gamma_star, q, &v)?;
    let base = cert.lambda_min_q();
    if (1.0 - gamma_star) * lifted < base * (1.0 - 1e-9) {
        return Err(Error::InconsistentInputs(format!(
            "suboptimality check failed: (1-γ*)·g = {} < g(0) = {base}",
            (1.0 - gamma_star) * lifted
        )));
    }
    Ok(gamma_star)
}

/// Linear-growth bound τ: the largest `sqrt(ε·g(2α𝒷-ε, Q, PB))` over the set
/// where the lifted eigenvalue stays positive. Structured uncertainties with
/// `|Wᵀβ(x)| < τ‖x‖` keep the origin attracting when no unstructured noise
/// is present.
pub fn growth_bound(cert: &NominalCertificate, alpha: f64, beta_floor: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter("gain scaling must be positive".into()));
    }
    if !(beta_floor >= 0.0) {
        return Err(Error::InvalidParameter("regressor floor must be non-negative".into()));
    }
    let v_norm = vec_norm(cert.v());
    if v_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let p2 = 2.0 * alpha * beta_floor;
    let lifted = |eps: f64| cert.lift_at(p2 - eps);
    // Interior point of the admissible set, from the certificate itself.
    let eps_inner = p2 + cert.lambda_min_q() / (2.0 * v_norm * v_norm);
    if lifted(eps_inner) <= 0.0 {
        return Err(Error::InconsistentInputs(
            "certified interior point of the growth-bound set is not admissible".into(),
        ));
    }
    let mut hi = 2.0 * eps_inner;
    let mut guard = 0;
    while lifted(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::InconsistentInputs(
                "lifted eigenvalue never becomes non-positive".into(),
            ));
        }
    }
    let sup_set = bisect_sign(eps_inner, hi, lifted);
    let (_, best) = grid_golden_max(0.0, sup_set, |eps| (eps * lifted(eps)).max(0.0));
    Ok(libm::sqrt(best.max(0.0)))
}
