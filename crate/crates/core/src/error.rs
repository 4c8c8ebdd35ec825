//! Error type shared by all modules of the crate.

use alloc::string::String;
use core::fmt;

/// Errors reported by validation, solvers and simulations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix entries contain NaN or infinity.
    NonFinite,
    /// A symmetric matrix was requested but the asymmetry exceeds tolerance.
    NotSymmetric { asymmetry: f64 },
    /// Operand shapes do not line up.
    DimensionMismatch(String),
    /// Linear system is singular (pivot below threshold).
    Singular(String),
    /// Matrix is not Hurwitz; carries the offending eigenvalue (re, im).
    NotHurwitz { re: f64, im: f64 },
    /// The pair (A, B) is not controllable.
    NotControllable { rank: usize, dim: usize },
    /// A matrix that must be positive definite is not.
    NotPositiveDefinite { min_eig: f64 },
    /// A zero vector was supplied where a nonzero one is required.
    ZeroVector,
    /// Operation requires a strict eigenvalue lift that does not hold.
    NoEigenvalueLift,
    /// The regressor family admits no closed-form infimum for this gain.
    UnsupportedRegressor(String),
    /// The regressor lower bound is zero; augment the regressor with a
    /// constant component to obtain a positive bound.
    RegressorBoundZero,
    /// Transient-envelope hypothesis `‖e(0)‖ ≥ residual` is violated.
    EnvelopeHypothesis { e0_norm: f64, residual: f64 },
    /// Invalid scalar or structural parameter.
    InvalidParameter(String),
    /// Update-law gains outside the admissible range.
    GainOutOfRange(String),
    /// Simulated state exceeded the blow-up threshold.
    Divergence { time: f64, norm: f64 },
    /// Frequency-domain criteria fail, so the matrix inequality is infeasible.
    CriteriaViolated { min_f: f64, omega: f64 },
    /// The high-frequency limit cannot decide strict positive realness.
    IndeterminateLimit,
    /// Analytic and numeric high-frequency limits disagree.
    LimitMismatch { analytic: f64, numeric: f64 },
    /// No feasible point found within the evaluation budget.
    LmiInfeasible { best_max_eig: f64 },
    /// Evaluation at a pole of the update-law prefactor.
    PrefactorPole,
    /// Inputs contradict a precondition established elsewhere.
    InconsistentInputs(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "matrix entries must be finite"),
            Error::NotSymmetric { asymmetry } => {
                write!(f, "matrix is not symmetric (asymmetry {asymmetry:.3e})")
            }
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::Singular(msg) => write!(f, "singular system: {msg}"),
            Error::NotHurwitz { re, im } => {
                write!(f, "matrix is not Hurwitz: eigenvalue {re:.6}{im:+.6}i")
            }
            Error::NotControllable { rank, dim } => {
                write!(f, "(A, B) not controllable: rank {rank} < {dim}")
            }
            Error::NotPositiveDefinite { min_eig } => {
                write!(f, "matrix not positive definite (min eigenvalue {min_eig:.3e})")
            }
            Error::ZeroVector => write!(f, "vector must be nonzero"),
            Error::NoEigenvalueLift => {
                write!(f, "lift condition fails at origin: rank-one term leaves the minimal eigenvalue unchanged")
            }
            Error::UnsupportedRegressor(msg) => {
                write!(f, "unsupported regressor family: {msg}")
            }
            Error::RegressorBoundZero => write!(
                f,
                "regressor lower bound is zero; augment the regressor with a constant component"
            ),
            Error::EnvelopeHypothesis { e0_norm, residual } => write!(
                f,
                "envelope does not apply: ‖e(0)‖ = {e0_norm:.6} < residual {residual:.6}"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::GainOutOfRange(msg) => write!(f, "gain out of range: {msg}"),
            Error::Divergence { time, norm } => {
                write!(f, "state diverged at t = {time:.6} (‖e‖ = {norm:.3e})")
            }
            Error::CriteriaViolated { min_f, omega } => write!(
                f,
                "frequency criterion fails: f = {min_f:.6e} at omega = {omega:.6e}"
            ),
            Error::IndeterminateLimit => {
                write!(f, "indeterminate high-frequency limit: -v'AB = 0")
            }
            Error::LimitMismatch { analytic, numeric } => write!(
                f,
                "high-frequency limit disagreement: analytic {analytic:.6e} vs numeric {numeric:.6e}"
            ),
            Error::LmiInfeasible { best_max_eig } => write!(
                f,
                "infeasible within budget: best residual max eigenvalue {best_max_eig:.6e}"
            ),
            Error::PrefactorPole => write!(f, "evaluation at the update-law prefactor pole"),
            Error::InconsistentInputs(msg) => write!(f, "inconsistent inputs: {msg}"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
