//! Deterministic fixed-step closed-loop simulation.
//!
//! The error system `ė = Ae + B(u + Wᵀβ(e) + η)` runs under the adaptive
//! control `u = -Ŵᵀβ(e)` where the weights come either from the
//! proportional-integral update law (integrated in its LTI form with state
//! `z = Ŵ - K q`) or from the memoryless static law `Ŵ = K q`,
//! `q = β BᵀP e`. Classic fourth-order Runge-Kutta with a fixed step keeps
//! noise-driven runs bit-reproducible; adaptive steppers would not.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{min_eig, sym_eig, SymMatrix};
use crate::lyapunov::NominalCertificate;
use crate::mat::{controllability_rank, hurwitz_check, vec_dot, vec_norm, Mat};
use crate::regressor::BetaFamily;
use crate::rng::indexed_symmetric;

/// State norm beyond which a run is declared divergent.
const BLOWUP: f64 = 1e9;

/// The known stable single-input error system.
#[derive(Debug, Clone)]
pub struct LinearErrorSystem {
    a: Mat,
    b: Vec<f64>,
    controllable: bool,
}

impl LinearErrorSystem {
    pub fn new(a: Mat, b: Vec<f64>) -> Result<Self> {
        if !a.is_square() || a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, B has length {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        if !a.is_finite() || b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Err((re, im)) = hurwitz_check(&a) {
            return Err(Error::NotHurwitz { re, im });
        }
        let controllable = controllability_rank(&a, &b) == a.rows();
        Ok(Self { a, b, controllable })
    }

    /// Companion-form second-order system with natural frequency `omega0`
    /// and damping `zeta`: `A = [[0, 1], [-ω₀², -2ζω₀]]`, `B = (0, ω₀⁻²)ᵀ`.
    pub fn second_order(omega0: f64, zeta: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !(zeta > 0.0) {
            return Err(Error::InvalidParameter(
                "natural frequency and damping must be positive".into(),
            ));
        }
        let a = Mat::from_rows(&[
            &[0.0, 1.0],
            &[-omega0 * omega0, -2.0 * zeta * omega0],
        ])?;
        Self::new(a, vec![0.0, 1.0 / (omega0 * omega0)])
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn is_controllable(&self) -> bool {
        self.controllable
    }
}

/// Update law selecting how `Ŵ` is produced.
#[derive(Debug, Clone)]
pub enum UpdateLaw {
    /// Proportional-integral law: feedthrough `K`, adaptation rate `Γ`,
    /// damping `Σ`; admissible for `0 ≤ K < 4Σ⁻¹`.
    Pi { feedthrough: SymMatrix, rate: SymMatrix, damping: SymMatrix },
    /// Memoryless law `Ŵ = α K_b q`.
    Static { base_gain: SymMatrix, scaling: f64 },
}

impl UpdateLaw {
    pub fn dim(&self) -> usize {
        match self {
            UpdateLaw::Pi { feedthrough, .. } => feedthrough.dim(),
            UpdateLaw::Static { base_gain, .. } => base_gain.dim(),
        }
    }

    /// The gain multiplying `q` (feedthrough for PI, `α K_b` for static).
    pub fn proportional_gain(&self) -> SymMatrix {
        match self {
            UpdateLaw::Pi { feedthrough, .. } => feedthrough.clone(),
            UpdateLaw::Static { base_gain, scaling } => base_gain.scale(*scaling),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            UpdateLaw::Pi { feedthrough, rate, damping } => {
                let nb = feedthrough.dim();
                if rate.dim() != nb || damping.dim() != nb {
                    return Err(Error::DimensionMismatch(
                        "PI gain matrices must share one dimension".into(),
                    ));
                }
                if min_eig(rate) <= 0.0 {
                    return Err(Error::GainOutOfRange("adaptation rate must satisfy Γ > 0".into()));
                }
                let sigma_eigs = sym_eig(damping);
                if sigma_eigs.min() <= 0.0 {
                    return Err(Error::GainOutOfRange("damping must satisfy Σ > 0".into()));
                }
                let k_min = min_eig(feedthrough);
                if k_min < -1e-12 {
                    return Err(Error::GainOutOfRange(format!(
                        "feedthrough must satisfy K ≥ 0 (λ_min(K) = {k_min:.3e})"
                    )));
                }
                // 4Σ⁻¹ - K > 0, checked on the eigenvalue of the difference.
                let inv = inverse_from_eig(damping);
                let margin = inv.scale(4.0).add(&feedthrough.scale(-1.0));
                let margin_min = min_eig(&margin);
                if margin_min <= 0.0 {
                    return Err(Error::GainOutOfRange(format!(
                        "feedthrough must satisfy K < 4Σ⁻¹ (λ_min(4Σ⁻¹ - K) = {margin_min:.3e})"
                    )));
                }
                Ok(())
            }
            UpdateLaw::Static { base_gain, scaling } => {
                if !(scaling > &0.0) {
                    return Err(Error::GainOutOfRange("gain scaling must be positive".into()));
                }
                if min_eig(base_gain) <= 0.0 {
                    return Err(Error::GainOutOfRange("static gain must satisfy K > 0".into()));
                }
                Ok(())
            }
        }
    }
}

fn inverse_from_eig(m: &SymMatrix) -> SymMatrix {
    let eig = sym_eig(m);
    let n = m.dim();
    let out = Mat::from_fn(n, n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            acc += eig.vectors.get(i, k) * eig.vectors.get(j, k) / eig.values[k];
        }
        acc
    });
    SymMatrix::symmetrize(&out)
}

/// One sinusoidal component of the unstructured uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// Seeded piecewise-constant noise hold plus sinusoids. The realized signal
/// always satisfies `|η(t)| ≤ amplitude_bound + Σ amplitudes`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub seed: u64,
    /// Hold interval of the piecewise-constant uniform draws.
    pub sample_dt: f64,
    /// Magnitude cap of the uniform component.
    pub amplitude_bound: f64,
    pub sinusoids: Vec<Sinusoid>,
}

impl NoiseSpec {
    /// Silence.
    pub fn zero() -> Self {
        Self { seed: 0, sample_dt: 0.01, amplitude_bound: 0.0, sinusoids: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_dt > 0.0) {
            return Err(Error::InvalidParameter("noise hold interval must be positive".into()));
        }
        if !(self.amplitude_bound >= 0.0) {
            return Err(Error::InvalidParameter("noise amplitude bound must be >= 0".into()));
        }
        if self.sinusoids.iter().any(|s| {
            !s.amplitude.is_finite() || !s.frequency.is_finite() || !s.phase.is_finite()
        }) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// The declared bound `η* = amplitude_bound + Σ |amplitudes|`.
    pub fn eta_star(&self) -> f64 {
        self.amplitude_bound + self.sinusoids.iter().map(|s| s.amplitude.abs()).sum::<f64>()
    }
}

/// Evaluable noise signal. Draws are addressed by hold index, so evaluation
/// at arbitrary stage times is reproducible for equal seeds.
#[derive(Debug, Clone)]
pub struct NoiseSignal {
    spec: NoiseSpec,
}

/// Realize a noise specification as an evaluable signal.
pub fn make_noise(spec: NoiseSpec) -> Result<NoiseSignal> {
    spec.validate()?;
    Ok(NoiseSignal { spec })
}

impl NoiseSignal {
    pub fn eval(&self, t: f64) -> f64 {
        let mut eta = 0.0;
        if self.spec.amplitude_bound > 0.0 {
            let idx = libm::floor(t / self.spec.sample_dt).max(0.0) as u64;
            eta += self.spec.amplitude_bound * indexed_symmetric(self.spec.seed, idx);
        }
        for s in &self.spec.sinusoids {
            eta += s.amplitude * libm::sin(s.frequency * t + s.phase);
        }
        eta
    }

    pub fn eta_star(&self) -> f64 {
        self.spec.eta_star()
    }
}

/// Structured plus unstructured uncertainty acting on the input channel.
#[derive(Debug, Clone)]
pub struct UncertaintyModel {
    pub beta: BetaFamily,
    /// True weights of the structured part (known here for simulation
    /// studies, unknown to the controller).
    pub weights: Vec<f64>,
    pub noise: NoiseSpec,
}

impl UncertaintyModel {
    pub fn validate(&self, state_dim: usize) -> Result<()> {
        self.beta.validate(state_dim)?;
        if self.weights.len() != self.beta.dim() {
            return Err(Error::DimensionMismatch(format!(
                "weights have length {}, regressor has {} components",
                self.weights.len(),
                self.beta.dim()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.noise.validate()
    }
}

/// Time-indexed record of one closed-loop run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Error state per step.
    pub states: Vec<Vec<f64>>,
    /// Calculated weights per step.
    pub weights: Vec<Vec<f64>>,
    /// Adaptive control effort per step.
    pub control: Vec<f64>,
    /// `q = β BᵀP e` per step.
    pub regressor: Vec<Vec<f64>>,
    /// PI internal state `z = Ŵ - Kq`; absent for the static law.
    pub pi_state: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state_norm(&self, idx: usize) -> f64 {
        vec_norm(&self.states[idx])
    }

    /// CSV export with header `t,e1..en,What1..WhatNb,u,q1..qNb[,z1..zNb]`,
    /// full double precision.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, |e| e.len());
        let nb = self.weights.first().map_or(0, |w| w.len());
        let mut out = String::from("t");
        for i in 1..=n {
            out += &format!(",e{i}");
        }
        for i in 1..=nb {
            out += &format!(",What{i}");
        }
        out += ",u";
        for i in 1..=nb {
            out += &format!(",q{i}");
        }
        if self.pi_state.is_some() {
            for i in 1..=nb {
                out += &format!(",z{i}");
            }
        }
        out.push('\n');
        for k in 0..self.len() {
            out += &format!("{:.16e}", self.times[k]);
            for x in &self.states[k] {
                out += &format!(",{x:.16e}");
            }
            for x in &self.weights[k] {
                out += &format!(",{x:.16e}");
            }
            out += &format!(",{:.16e}", self.control[k]);
            for x in &self.regressor[k] {
                out += &format!(",{x:.16e}");
            }
            if let Some(z) = &self.pi_state {
                for x in &z[k] {
                    out += &format!(",{x:.16e}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed-step fourth-order integration of the closed loop.
///
/// For the PI law the integrated state is `(e, z)` with `Ŵ = z + Kq`
/// recomputed inside every stage; for the static law the state is `e` alone
/// and `Ŵ = Kq` holds algebraically at every sample. `z0` seeds the PI
/// internal state (`None` means the integral starts at zero); it is ignored
/// by the static law.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    sys: &LinearErrorSystem,
    cert: &NominalCertificate,
    unc: &UncertaintyModel,
    law: &UpdateLaw,
    e0: &[f64],
    z0: Option<&[f64]>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    unc.validate(sys.dim())?;
    let beta = |e: &[f64]| unc.beta.eval(e);
    simulate_inner(
        sys, cert, &beta, unc.beta.dim(), &unc.weights, &unc.noise, law, e0, z0, t_final, dt,
    )
}

/// Uncertified simulation path: accepts an arbitrary regressor callback
/// instead of a supported family. No certificate or bound applies to runs
/// produced this way; the callback must return `beta_dim` components.
#[allow(clippy::too_many_arguments)]
pub fn simulate_custom(
    sys: &LinearErrorSystem,
    cert: &NominalCertificate,
    beta: &dyn Fn(&[f64]) -> Vec<f64>,
    beta_dim: usize,
    weights: &[f64],
    noise_spec: &NoiseSpec,
    law: &UpdateLaw,
    e0: &[f64],
    z0: Option<&[f64]>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if weights.len() != beta_dim {
        return Err(Error::DimensionMismatch(format!(
            "weights have length {}, callback is declared with {beta_dim} components",
            weights.len()
        )));
    }
    let probe = beta(e0);
    if probe.len() != beta_dim {
        return Err(Error::DimensionMismatch(format!(
            "regressor callback returned {} components, declared {beta_dim}",
            probe.len()
        )));
    }
    simulate_inner(sys, cert, beta, beta_dim, weights, noise_spec, law, e0, z0, t_final, dt)
}

#[allow(clippy::too_many_arguments)]
fn simulate_inner(
    sys: &LinearErrorSystem,
    cert: &NominalCertificate,
    beta_eval: &dyn Fn(&[f64]) -> Vec<f64>,
    nb: usize,
    true_weights: &[f64],
    noise_spec: &NoiseSpec,
    law: &UpdateLaw,
    e0: &[f64],
    z0: Option<&[f64]>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    let n = sys.dim();
    if cert.dim() != n || e0.len() != n {
        return Err(Error::DimensionMismatch("system, certificate and e0 must agree".into()));
    }
    law.validate()?;
    if law.dim() != nb {
        return Err(Error::DimensionMismatch(format!(
            "update law dimension {} does not match the regressor dimension {nb}",
            law.dim()
        )));
    }
    if !(dt > 0.0) || !(t_final >= dt) {
        return Err(Error::InvalidParameter("need dt > 0 and t_final >= dt".into()));
    }
    let noise = make_noise(noise_spec.clone())?;

    let gain = law.proportional_gain();
    // For the PI law, precompute the LTI pieces ż = -ΓΣ z + Γ(I - ΣK) q.
    let pi_mats = match law {
        UpdateLaw::Pi { rate, damping, feedthrough } => {
            let gs = rate.as_mat().matmul(damping.as_mat());
            let mut i_minus_sk = Mat::identity(nb).sub(&damping.as_mat().matmul(feedthrough.as_mat()));
            i_minus_sk = rate.as_mat().matmul(&i_minus_sk);
            Some((gs, i_minus_sk))
        }
        UpdateLaw::Static { .. } => None,
    };
    let is_pi = pi_mats.is_some();

    let v = cert.v(); // BᵀP e = vᵀ e
    let steps = libm::round(t_final / dt) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut weights = Vec::with_capacity(steps + 1);
    let mut control = Vec::with_capacity(steps + 1);
    let mut regressor = Vec::with_capacity(steps + 1);
    let mut pi_state = if is_pi { Some(Vec::with_capacity(steps + 1)) } else { None };

    let mut e = e0.to_vec();
    let mut z = if is_pi {
        match z0 {
            Some(z0) => {
                if z0.len() != nb {
                    return Err(Error::DimensionMismatch(format!(
                        "z0 has length {}, regressor dimension is {nb}",
                        z0.len()
                    )));
                }
                z0.to_vec()
            }
            None => vec![0.0; nb],
        }
    } else {
        Vec::new()
    };

    // Derivative of the packed state (e, z?) at time t.
    let deriv = |t: f64, e: &[f64], z: &[f64], de: &mut [f64], dz: &mut [f64]| {
        let beta = beta_eval(e);
        let y_v = vec_dot(v, e);
        let q: Vec<f64> = beta.iter().map(|b| b * y_v).collect();
        let mut w_hat = gain.as_mat().mat_vec(&q);
        if is_pi {
            for (wh, zi) in w_hat.iter_mut().zip(z) {
                *wh += zi;
            }
        }
        let u = -vec_dot(&w_hat, &beta);
        let disturb = vec_dot(true_weights, &beta) + noise.eval(t);
        let ae = sys.a().mat_vec(e);
        for i in 0..e.len() {
            de[i] = ae[i] + sys.b()[i] * (u + disturb);
        }
        if let Some((gs, g_ismk)) = &pi_mats {
            let decay = gs.mat_vec(z);
            let drive = g_ismk.mat_vec(&q);
            for i in 0..dz.len() {
                dz[i] = -decay[i] + drive[i];
            }
        }
    };

    let record = |t: f64,
                  e: &[f64],
                  z: &[f64],
                  times: &mut Vec<f64>,
                  states: &mut Vec<Vec<f64>>,
                  weights: &mut Vec<Vec<f64>>,
                  control: &mut Vec<f64>,
                  regressor: &mut Vec<Vec<f64>>,
                  pi_state: &mut Option<Vec<Vec<f64>>>| {
        let beta = beta_eval(e);
        let y_v = vec_dot(v, e);
        let q: Vec<f64> = beta.iter().map(|b| b * y_v).collect();
        let mut w_hat = gain.as_mat().mat_vec(&q);
        if let Some(zs) = pi_state.as_mut() {
            for (wh, zi) in w_hat.iter_mut().zip(z) {
                *wh += zi;
            }
            zs.push(z.to_vec());
        }
        control.push(-vec_dot(&w_hat, &beta));
        times.push(t);
        states.push(e.to_vec());
        weights.push(w_hat);
        regressor.push(q);
    };

    record(
        0.0, &e, &z, &mut times, &mut states, &mut weights, &mut control, &mut regressor,
        &mut pi_state,
    );

    let nz = z.len();
    let mut k1e = vec![0.0; n];
    let mut k2e = vec![0.0; n];
    let mut k3e = vec![0.0; n];
    let mut k4e = vec![0.0; n];
    let mut k1z = vec![0.0; nz];
    let mut k2z = vec![0.0; nz];
    let mut k3z = vec![0.0; nz];
    let mut k4z = vec![0.0; nz];
    let mut etmp = vec![0.0; n];
    let mut ztmp = vec![0.0; nz];

    for step in 0..steps {
        let t = step as f64 * dt;
        deriv(t, &e, &z, &mut k1e, &mut k1z);
        stage(&e, &k1e, 0.5 * dt, &mut etmp);
        stage(&z, &k1z, 0.5 * dt, &mut ztmp);
        deriv(t + 0.5 * dt, &etmp, &ztmp, &mut k2e, &mut k2z);
        stage(&e, &k2e, 0.5 * dt, &mut etmp);
        stage(&z, &k2z, 0.5 * dt, &mut ztmp);
        deriv(t + 0.5 * dt, &etmp, &ztmp, &mut k3e, &mut k3z);
        stage(&e, &k3e, dt, &mut etmp);
        stage(&z, &k3z, dt, &mut ztmp);
        deriv(t + dt, &etmp, &ztmp, &mut k4e, &mut k4z);
        for i in 0..n {
            e[i] += dt / 6.0 * (k1e[i] + 2.0 * k2e[i] + 2.0 * k3e[i] + k4e[i]);
        }
        for i in 0..nz {
            z[i] += dt / 6.0 * (k1z[i] + 2.0 * k2z[i] + 2.0 * k3z[i] + k4z[i]);
        }
        let t_next = (step + 1) as f64 * dt;
        let norm = vec_norm(&e);
        if !norm.is_finite() || norm > BLOWUP {
            return Err(Error::Divergence { time: t_next, norm });
        }
        record(
            t_next, &e, &z, &mut times, &mut states, &mut weights, &mut control, &mut regressor,
            &mut pi_state,
        );
    }

    Ok(Trajectory { times, states, weights, control, regressor, pi_state })
}

#[inline]
fn stage(base: &[f64], slope: &[f64], h: f64, out: &mut [f64]) {
    for i in 0..base.len() {
        out[i] = base[i] + h * slope[i];
    }
}

/// Ultimate-boundedness verdict over the trailing part of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UubReport {
    /// Largest ‖e‖ over the trailing fraction of the horizon.
    pub tail_max: f64,
    /// Whether the tail stays within the claimed bound.
    pub within_bound: bool,
    /// First time after which ‖e‖ never leaves the ball again.
    pub entry_time: Option<f64>,
}

pub fn verify_uub(traj: &Trajectory, bound: f64, tail_fraction: f64) -> UubReport {
    let len = traj.len();
    let tail_len = (libm::ceil(len as f64 * tail_fraction) as usize).clamp(1, len);
    let tail_start = len - tail_len;
    let mut tail_max = 0.0_f64;
    for k in tail_start..len {
        tail_max = tail_max.max(traj.state_norm(k));
    }
    let mut last_violation = None;
    for k in 0..len {
        if traj.state_norm(k) > bound {
            last_violation = Some(k);
        }
    }
    let entry_time = match last_violation {
        None => Some(traj.times[0]),
        Some(k) if k + 1 < len => Some(traj.times[k + 1]),
        Some(_) => None,
    };
    UubReport { tail_max, within_bound: tail_max <= bound, entry_time }
}
