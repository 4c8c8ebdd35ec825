//! Lyapunov certificates and the eigenvalue-lift function
//! `g(φ, Q, v) = λ_min(Q + φ vvᵀ)`.
//!
//! The lift function is non-decreasing and Lipschitz in φ with constant
//! `λ_max(vvᵀ)`; for a column count below the dimension it stays between
//! `λ_min(Q)` and `λ_max(Q)`, is strictly increasing up to a saturation point
//! and constant afterwards. Negative φ arguments are permitted (used by the
//! growth-bound computation).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{min_eig, sym_eig, SymMatrix};
use crate::mat::{hurwitz_check, vec_norm, Mat};
use crate::search::bisect_predicate;

/// Default tolerances used by the certificate computations.
pub mod defaults {
    /// Strictness margin for eigenvalue comparisons.
    pub const EIG_TOL: f64 = 1e-10;
    /// Accepted relative residual of the Lyapunov solve.
    pub const LYAP_RESIDUAL_TOL: f64 = 1e-9;
    /// Increase of the lift function below which it counts as flat.
    pub const G_FLATNESS_TOL: f64 = 1e-9;
    /// Eigengap below which the lift derivative switches to the one-sided
    /// eigenspace form.
    pub const EIGENGAP_TOL: f64 = 1e-8;
}

/// Solve `AᵀP + PA = -Q` for symmetric `P` by vectorizing to an n²-dimensional
/// linear system. Fails when `A` is not Hurwitz, naming the offending
/// eigenvalue.
pub fn solve_lyapunov(a: &Mat, q: &SymMatrix) -> Result<SymMatrix> {
    if !a.is_square() || a.rows() != q.dim() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "A is {}x{}, Q is {0}x{0}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if let Err((re, im)) = hurwitz_check(a) {
        return Err(Error::NotHurwitz { re, im });
    }
    let n = a.rows();
    let nn = n * n;
    let mut system = Mat::zeros(nn, nn);
    let mut rhs = Vec::with_capacity(nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            // (AᵀP + PA)_ij = Σ_k A_ki P_kj + Σ_l P_il A_lj
            for k in 0..n {
                let col = k * n + j;
                system.set(row, col, system.get(row, col) + a.get(k, i));
            }
            for l in 0..n {
                let col = i * n + l;
                system.set(row, col, system.get(row, col) + a.get(l, j));
            }
            rhs.push(-q.get(i, j));
        }
    }
    let x = system.solve(&rhs)?;
    let p = SymMatrix::symmetrize(&Mat::from_fn(n, n, |i, j| x[i * n + j]));

    let res = a
        .transpose()
        .matmul(p.as_mat())
        .add(&p.as_mat().matmul(a))
        .add(q.as_mat());
    let scale = q.as_mat().frobenius_norm().max(1e-300);
    if res.frobenius_norm() > defaults::LYAP_RESIDUAL_TOL * scale {
        return Err(Error::Singular(alloc::format!(
            "Lyapunov residual {:.3e} exceeds tolerance",
            res.frobenius_norm() / scale
        )));
    }
    Ok(p)
}

/// The eigenvalue-lift function `g(φ, Q, v) = λ_min(Q + φ vvᵀ)`.
/// `v` is n×m; negative `φ` is allowed.
pub fn lift_min_eig(phi: f64, q: &SymMatrix, v: &Mat) -> Result<f64> {
    check_lift_dims(q, v)?;
    Ok(min_eig(&q.add_scaled_gram(phi, v)))
}

/// True iff the rank-one (or rank-m) term strictly raises the minimal
/// eigenvalue: `g(1, Q, v) > λ_min(Q) + tol`.
pub fn has_eigenvalue_lift(q: &SymMatrix, v: &Mat) -> Result<bool> {
    check_lift_dims(q, v)?;
    let base = min_eig(q);
    Ok(lift_min_eig(1.0, q, v)? > base + defaults::EIG_TOL)
}

/// Derivative of the lift function in φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftDerivative {
    pub value: f64,
    /// Set when the minimal eigenvalue is (numerically) repeated and the
    /// value is the one-sided right derivative computed on the eigenspace.
    pub one_sided: bool,
}

/// Analytic derivative `‖vᵀw‖²` with `w` the unit minimal eigenvector, valid
/// while the minimal eigenvalue is simple. For a repeated minimal eigenvalue
/// the right derivative is the smallest eigenvalue of the compression of
/// `vvᵀ` onto the minimal eigenspace; that form is returned flagged as
/// one-sided. (A central difference would average the slopes across the kink
/// and, at φ = 0 with no lift, report a spurious nonzero derivative.)
pub fn lift_derivative(phi: f64, q: &SymMatrix, v: &Mat) -> Result<LiftDerivative> {
    check_lift_dims(q, v)?;
    let shifted = q.add_scaled_gram(phi, v);
    let eig = sym_eig(&shifted);
    let scale = shifted.as_mat().max_abs().max(1.0);
    let simple = eig.values.len() == 1
        || eig.values[1] - eig.values[0] > defaults::EIGENGAP_TOL * scale;
    if simple {
        let w = eig.vector(0);
        let vt_w = v.transpose().mat_vec(&w);
        Ok(LiftDerivative { value: vec_norm(&vt_w) * vec_norm(&vt_w), one_sided: false })
    } else {
        let basis = eig.min_eigenspace(defaults::EIGENGAP_TOL * scale);
        let w = v.transpose().matmul(&basis); // m×k
        let gram = SymMatrix::symmetrize(&w.transpose().matmul(&w));
        Ok(LiftDerivative { value: min_eig(&gram).max(0.0), one_sided: true })
    }
}

/// Where the lift function stops increasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SaturationPoint {
    /// Smallest φ at which the supremum is reached.
    Saturated(f64),
    /// The lift never moves: `g ≡ λ_min(Q)`.
    NoLift,
    /// Still strictly increasing at the search cap (the supremum is not
    /// attained on the searched range).
    Unbounded,
}

/// Locate the saturation point of `g(·, Q, v)` on `[0, grid_max]`.
///
/// Brackets by doubling φ until the increase over a doubling stalls below
/// `tol`, then bisects for the smallest φ within `tol` of the supremum.
pub fn lift_saturation(
    q: &SymMatrix,
    v: &Mat,
    grid_max: f64,
    tol: f64,
) -> Result<SaturationPoint> {
    check_lift_dims(q, v)?;
    if v.rows() <= v.cols() {
        return Err(Error::InvalidParameter(alloc::format!(
            "saturation analysis requires fewer columns than rows (got {}x{})",
            v.rows(),
            v.cols()
        )));
    }
    let norm_sq: f64 = v.data().iter().map(|x| x * x).sum();
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !(grid_max > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter("grid_max and tol must be positive".into()));
    }
    if !has_eigenvalue_lift(q, v)? {
        return Ok(SaturationPoint::NoLift);
    }
    let g = |phi: f64| lift_min_eig(phi, q, v).expect("dims already checked");

    let mut phi = 1.0_f64.min(grid_max / 2.0);
    let mut hi = None;
    loop {
        let upper = (2.0 * phi).min(grid_max);
        if g(upper) - g(phi) < tol {
            hi = Some(upper);
            break;
        }
        if upper >= grid_max {
            break;
        }
        phi = upper;
    }
    let Some(hi) = hi else {
        return Ok(SaturationPoint::Unbounded);
    };
    let sup = g(hi);
    if sup - g(0.0) <= tol {
        // Lift smaller than the flatness tolerance: saturated immediately.
        return Ok(SaturationPoint::Saturated(0.0));
    }
    let phi_star = bisect_predicate(0.0, hi, |x| sup - g(x) > tol);
    Ok(SaturationPoint::Saturated(phi_star))
}

/// Sampled profile of the lift function together with its saturation point,
/// e.g. for CSV export.
#[derive(Debug, Clone)]
pub struct GProfile {
    pub samples: Vec<(f64, f64)>,
    pub saturation: SaturationPoint,
}

pub fn lift_profile(q: &SymMatrix, v: &Mat, phi_max: f64, count: usize) -> Result<GProfile> {
    check_lift_dims(q, v)?;
    if count < 2 || !(phi_max > 0.0) {
        return Err(Error::InvalidParameter("profile needs phi_max > 0 and count >= 2".into()));
    }
    let samples = (0..count)
        .map(|k| {
            let phi = phi_max * k as f64 / (count - 1) as f64;
            (phi, lift_min_eig(phi, q, v).expect("dims already checked"))
        })
        .collect();
    let saturation = lift_saturation(q, v, phi_max, defaults::G_FLATNESS_TOL)?;
    Ok(GProfile { samples, saturation })
}

fn check_lift_dims(q: &SymMatrix, v: &Mat) -> Result<()> {
    if v.rows() != q.dim() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "v has {} rows, Q dimension is {}",
            v.rows(),
            q.dim()
        )));
    }
    Ok(())
}

/// A validated stability certificate: positive definite `P` and
/// `Q = -(AᵀP + PA)`, the derived vector `v = PB`, and cached spectra.
#[derive(Debug, Clone)]
pub struct NominalCertificate {
    p: SymMatrix,
    q: SymMatrix,
    v: Vec<f64>,
    p_min: f64,
    p_max: f64,
    q_min: f64,
    q_max: f64,
}

impl NominalCertificate {
    /// Build from an explicit `P`; `Q` is computed and both are required to
    /// be positive definite.
    pub fn new(p: SymMatrix, a: &Mat, b: &[f64]) -> Result<Self> {
        if a.rows() != p.dim() || b.len() != p.dim() {
            return Err(Error::DimensionMismatch("P, A, B dimensions disagree".into()));
        }
        let q_mat = a.transpose().matmul(p.as_mat()).add(&p.as_mat().matmul(a)).scale(-1.0);
        let q = SymMatrix::symmetrize(&q_mat);
        Self::assemble(p, q, b)
    }

    /// Solve the Lyapunov equation for `P` given `Q > 0`.
    pub fn from_lyapunov(a: &Mat, q: SymMatrix, b: &[f64]) -> Result<Self> {
        let p = solve_lyapunov(a, &q)?;
        Self::assemble(p, q, b)
    }

    fn assemble(p: SymMatrix, q: SymMatrix, b: &[f64]) -> Result<Self> {
        let p_eig = sym_eig(&p);
        if p_eig.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig: p_eig.min() });
        }
        let q_eig = sym_eig(&q);
        if q_eig.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite { min_eig: q_eig.min() });
        }
        let v = p.as_mat().mat_vec(b);
        Ok(Self {
            p_min: p_eig.min(),
            p_max: p_eig.max(),
            q_min: q_eig.min(),
            q_max: q_eig.max(),
            p,
            q,
            v,
        })
    }

    pub fn p(&self) -> &SymMatrix {
        &self.p
    }

    pub fn q(&self) -> &SymMatrix {
        &self.q
    }

    /// `v = PB`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn v_column(&self) -> Mat {
        Mat::column(&self.v)
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn lambda_min_p(&self) -> f64 {
        self.p_min
    }

    pub fn lambda_max_p(&self) -> f64 {
        self.p_max
    }

    pub fn lambda_min_q(&self) -> f64 {
        self.q_min
    }

    pub fn lambda_max_q(&self) -> f64 {
        self.q_max
    }

    /// `sqrt(λ_max(P)/λ_min(P))`, the overshoot factor of the envelope.
    pub fn condition_sqrt(&self) -> f64 {
        libm::sqrt(self.p_max / self.p_min)
    }

    /// `g(φ, Q, PB)`.
    pub fn lift_at(&self, phi: f64) -> f64 {
        lift_min_eig(phi, &self.q, &self.v_column()).expect("certificate dims consistent")
    }

    pub fn has_lift(&self) -> bool {
        has_eigenvalue_lift(&self.q, &self.v_column()).expect("certificate dims consistent")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_eig;

    const SQRT_2: f64 = core::f64::consts::SQRT_2;

    fn second_order_a() -> Mat {
        Mat::from_rows(&[&[0.0, 1.0], &[-1.0, -SQRT_2]]).unwrap()
    }

    /// The worked-example certificate: P with PB = (1, √2)ᵀ for the
    /// second-order plant; closed form P = [[2.8√2, 1], [1, √2]].
    fn example_p() -> SymMatrix {
        SymMatrix::from_rows(&[&[2.8 * SQRT_2, 1.0], &[1.0, SQRT_2]]).unwrap()
    }

    #[test]
    fn scalar_lyapunov_closed_form() {
        let a = Mat::from_rows(&[&[-1.0]]).unwrap();
        let p = solve_lyapunov(&a, &SymMatrix::scalar(2.0)).unwrap();
        assert!((p.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_lyapunov() {
        let a = Mat::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let p = solve_lyapunov(&a, &SymMatrix::diag(&[2.0, 2.0])).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn example_q_round_trip() {
        // Q = -(AᵀP + PA) for the example P is [[2, -0.8√2], [-0.8√2, 2]];
        // solving the Lyapunov equation with that Q must reproduce P.
        let a = second_order_a();
        let q = SymMatrix::from_rows(&[&[2.0, -0.8 * SQRT_2], &[-0.8 * SQRT_2, 2.0]]).unwrap();
        let p = solve_lyapunov(&a, &q).unwrap();
        let expect = example_p();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (p.get(i, j) - expect.get(i, j)).abs() < 1e-9,
                    "P[{i}][{j}] = {} vs {}",
                    p.get(i, j),
                    expect.get(i, j)
                );
            }
        }
        // Four-digit values as printed: 3.9598 and 1.4142.
        #[allow(clippy::approx_constant)]
        let printed = (3.9598, 1.4142);
        assert!((p.get(0, 0) - printed.0).abs() < 5e-5);
        assert!((p.get(1, 1) - printed.1).abs() < 5e-5);
    }

    #[test]
    fn non_hurwitz_is_rejected_with_eigenvalue() {
        let a = Mat::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        match solve_lyapunov(&a, &SymMatrix::identity(2)) {
            Err(Error::NotHurwitz { re, .. }) => assert!((re - 1.0).abs() < 1e-9),
            other => panic!("expected NotHurwitz, got {other:?}"),
        }
    }

    #[test]
    fn lift_at_zero_is_min_eig() {
        let q = SymMatrix::from_rows(&[&[2.0, -1.1314], &[-1.1314, 2.4142]]).unwrap();
        let v = Mat::column(&[1.0, SQRT_2]);
        let g0 = lift_min_eig(0.0, &q, &v).unwrap();
        assert!((g0 - min_eig(&q)).abs() < 1e-12);
    }

    #[test]
    fn lift_example_against_closed_form() {
        // g(1, Q, v) for Q = [[2, -1.1314], [-1.1314, 2.4142]], v = (1, √2)ᵀ.
        let q = SymMatrix::from_rows(&[&[2.0, -1.1314], &[-1.1314, 2.4142]]).unwrap();
        let v = Mat::column(&[1.0, SQRT_2]);
        let g1 = lift_min_eig(1.0, &q, &v).unwrap();
        // Oracle: closed-form 2x2 eigenvalue of Q + vvᵀ.
        let m = q.add_scaled_gram(1.0, &v);
        let (a, b, c) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
        let lo = 0.5 * ((a + c) - libm::sqrt((a - c) * (a - c) + 4.0 * b * b));
        assert!((g1 - lo).abs() < 1e-12);
        assert!((g1 - 2.9455).abs() < 5e-5);
    }

    #[test]
    fn lift_constant_in_null_direction() {
        let q = SymMatrix::identity(2);
        let v = Mat::column(&[1.0, 0.0]);
        for phi in [0.0, 0.5, 3.0, 100.0] {
            assert!((lift_min_eig(phi, &q, &v).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(!has_eigenvalue_lift(&q, &v).unwrap());
    }

    #[test]
    fn lift_check_examples() {
        let q = SymMatrix::from_rows(&[&[2.0, -1.1314], &[-1.1314, 2.4142]]).unwrap();
        assert!(has_eigenvalue_lift(&q, &Mat::column(&[1.0, SQRT_2])).unwrap());
        let d = SymMatrix::diag(&[1.0, 2.0]);
        assert!(has_eigenvalue_lift(&d, &Mat::column(&[1.0, 0.0])).unwrap());
        assert!((lift_min_eig(1.0, &d, &Mat::column(&[1.0, 0.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_scalar_and_flat_cases() {
        let q = SymMatrix::scalar(2.0);
        let v = Mat::column(&[1.0]);
        for phi in [0.0, 1.0, 7.5] {
            let d = lift_derivative(phi, &q, &v).unwrap();
            assert!((d.value - 1.0).abs() < 1e-12);
            assert!(!d.one_sided);
        }
        let q2 = SymMatrix::identity(2);
        let v2 = Mat::column(&[1.0, 0.0]);
        let d2 = lift_derivative(1.0, &q2, &v2).unwrap();
        assert!(d2.value.abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference_on_smooth_region() {
        let q = SymMatrix::from_rows(&[&[2.0, -1.1314], &[-1.1314, 2.4142]]).unwrap();
        let v = Mat::column(&[1.0, SQRT_2]);
        let phi = 0.5;
        let d = lift_derivative(phi, &q, &v).unwrap();
        assert!(!d.one_sided);
        let h = 1e-6 * phi.abs().max(1.0);
        let fd = (lift_min_eig(phi + h, &q, &v).unwrap() - lift_min_eig(phi - h, &q, &v).unwrap())
            / (2.0 * h);
        assert!((d.value - fd).abs() < 1e-5, "analytic {} vs fd {}", d.value, fd);
    }

    #[test]
    fn degenerate_derivative_is_one_sided_right_slope() {
        // At φ slightly above 0 with Q = I the lifted eigenvalue splits but
        // the minimal branch stays flat: right derivative 0.
        let q = SymMatrix::identity(2);
        let v = Mat::column(&[1.0, 0.0]);
        let d = lift_derivative(1e-8, &q, &v).unwrap();
        assert!(d.one_sided);
        assert!(d.value.abs() < 1e-12);
    }

    #[test]
    fn saturation_at_eigenvalue_crossing() {
        let q = SymMatrix::diag(&[1.0, 2.0]);
        let v = Mat::column(&[1.0, 0.0]);
        match lift_saturation(&q, &v, 100.0, 1e-9).unwrap() {
            SaturationPoint::Saturated(phi) => assert!((phi - 1.0).abs() < 1e-6),
            other => panic!("expected saturation near 1, got {other:?}"),
        }
    }

    #[test]
    fn saturation_no_lift_flag() {
        let q = SymMatrix::identity(2);
        let v = Mat::column(&[1.0, 0.0]);
        assert_eq!(lift_saturation(&q, &v, 100.0, 1e-9).unwrap(), SaturationPoint::NoLift);
    }

    #[test]
    fn saturation_still_increasing_reports_unbounded() {
        // Strictly increasing toward an unattained supremum of 5.5: the
        // brute-force sweep never stalls within the cap.
        let q = SymMatrix::diag(&[1.0, 10.0]);
        let v = Mat::column(&[1.0, 1.0]);
        let sweep_increasing = {
            let g = |phi: f64| lift_min_eig(phi, &q, &v).unwrap();
            let mut increasing = true;
            let mut prev = g(0.0);
            for k in 1..10_000 {
                let cur = g(1e4 * k as f64 / 10_000.0);
                if cur < prev {
                    increasing = false;
                }
                prev = cur;
            }
            increasing
        };
        assert!(sweep_increasing);
        assert_eq!(lift_saturation(&q, &v, 1e4, 1e-9).unwrap(), SaturationPoint::Unbounded);
    }

    #[test]
    fn saturation_rejects_square_v() {
        let q = SymMatrix::scalar(2.0);
        let v = Mat::column(&[1.0]);
        assert!(matches!(
            lift_saturation(&q, &v, 10.0, 1e-9),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn certificate_from_example_p() {
        let a = second_order_a();
        let cert = NominalCertificate::new(example_p(), &a, &[0.0, 1.0]).unwrap();
        // v = PB = (1, √2)ᵀ exactly.
        assert!((cert.v()[0] - 1.0).abs() < 1e-12);
        assert!((cert.v()[1] - SQRT_2).abs() < 1e-12);
        // Q = [[2, -0.8√2], [-0.8√2, 2]]: eigenvalues 2 ∓ 0.8√2.
        assert!((cert.lambda_min_q() - (2.0 - 0.8 * SQRT_2)).abs() < 1e-10);
        assert!((cert.lambda_max_q() - (2.0 + 0.8 * SQRT_2)).abs() < 1e-10);
        assert!(cert.has_lift());
        assert!(max_eig(cert.q()) > 0.0);
    }

    #[test]
    fn certificate_rejects_indefinite_p() {
        let a = second_order_a();
        let p = SymMatrix::diag(&[1.0, -1.0]);
        assert!(matches!(
            NominalCertificate::new(p, &a, &[0.0, 1.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
