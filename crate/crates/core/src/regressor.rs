//! Regressor families for the structured uncertainty `Wᵀβ(e)`.
//!
//! The families are restricted to shapes whose norm growth and gain-weighted
//! infimum have closed forms, so the certificates built on them are exact.
//! Arbitrary callbacks are possible in the uncertified simulation path but
//! carry no bounds.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, SymMatrix};
use crate::mat::{vec_dot, Mat};

/// One component of an affine regressor: a constant or `coeff · e_index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffineRow {
    Constant(f64),
    State { index: usize, coeff: f64 },
}

/// One monomial component of a degree-two regressor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Monomial {
    Constant(f64),
    Linear { index: usize, coeff: f64 },
    Quadratic { i: usize, j: usize, coeff: f64 },
}

/// Supported regressor families.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaFamily {
    /// Scalar constant regressor `β ≡ c` (the purely linear case for c = 1).
    Constant(f64),
    /// Component-wise constants and `±e_i` selections.
    Affine(Vec<AffineRow>),
    /// Monomial components up to degree two.
    Poly2(Vec<Monomial>),
}

impl BetaFamily {
    /// Output dimension `n_β`.
    pub fn dim(&self) -> usize {
        match self {
            BetaFamily::Constant(_) => 1,
            BetaFamily::Affine(rows) => rows.len(),
            BetaFamily::Poly2(terms) => terms.len(),
        }
    }

    /// Smallest state dimension the family can act on.
    pub fn min_state_dim(&self) -> usize {
        match self {
            BetaFamily::Constant(_) => 0,
            BetaFamily::Affine(rows) => rows
                .iter()
                .map(|r| match r {
                    AffineRow::Constant(_) => 0,
                    AffineRow::State { index, .. } => index + 1,
                })
                .max()
                .unwrap_or(0),
            BetaFamily::Poly2(terms) => terms
                .iter()
                .map(|t| match t {
                    Monomial::Constant(_) => 0,
                    Monomial::Linear { index, .. } => index + 1,
                    Monomial::Quadratic { i, j, .. } => i.max(j) + 1,
                })
                .max()
                .unwrap_or(0),
        }
    }

    pub fn validate(&self, state_dim: usize) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::InvalidParameter("regressor needs at least one component".into()));
        }
        if self.min_state_dim() > state_dim {
            return Err(Error::DimensionMismatch(format!(
                "regressor references state index {} but the state dimension is {}",
                self.min_state_dim(),
                state_dim
            )));
        }
        let finite = match self {
            BetaFamily::Constant(c) => c.is_finite(),
            BetaFamily::Affine(rows) => rows.iter().all(|r| match r {
                AffineRow::Constant(c) => c.is_finite(),
                AffineRow::State { coeff, .. } => coeff.is_finite(),
            }),
            BetaFamily::Poly2(terms) => terms.iter().all(|t| match t {
                Monomial::Constant(c) => c.is_finite(),
                Monomial::Linear { coeff, .. } => coeff.is_finite(),
                Monomial::Quadratic { coeff, .. } => coeff.is_finite(),
            }),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn eval(&self, e: &[f64]) -> Vec<f64> {
        match self {
            BetaFamily::Constant(c) => vec![*c],
            BetaFamily::Affine(rows) => rows
                .iter()
                .map(|r| match r {
                    AffineRow::Constant(c) => *c,
                    AffineRow::State { index, coeff } => coeff * e[*index],
                })
                .collect(),
            BetaFamily::Poly2(terms) => terms
                .iter()
                .map(|t| match t {
                    Monomial::Constant(c) => *c,
                    Monomial::Linear { index, coeff } => coeff * e[*index],
                    Monomial::Quadratic { i, j, coeff } => coeff * e[*i] * e[*j],
                })
                .collect(),
        }
    }

    /// Coefficients `(c0, c1, c2)` of a non-decreasing growth envelope
    /// `‖β(e)‖ ≤ c0 + c1·‖e‖ + c2·‖e‖²`.
    pub fn growth_coefficients(&self) -> (f64, f64, f64) {
        let mut c0_sq = 0.0;
        let mut c1_sq = 0.0;
        let mut c2_sq = 0.0;
        match self {
            BetaFamily::Constant(c) => c0_sq += c * c,
            BetaFamily::Affine(rows) => {
                for r in rows {
                    match r {
                        AffineRow::Constant(c) => c0_sq += c * c,
                        AffineRow::State { coeff, .. } => c1_sq += coeff * coeff,
                    }
                }
            }
            BetaFamily::Poly2(terms) => {
                for t in terms {
                    match t {
                        Monomial::Constant(c) => c0_sq += c * c,
                        Monomial::Linear { coeff, .. } => c1_sq += coeff * coeff,
                        Monomial::Quadratic { coeff, .. } => c2_sq += coeff * coeff,
                    }
                }
            }
        }
        (libm::sqrt(c0_sq), libm::sqrt(c1_sq), libm::sqrt(c2_sq))
    }

    /// Exact infimum of `β(x)ᵀ K β(x)` over all states, for the families that
    /// admit a closed form:
    ///
    /// - constant regressor: `c²·K`;
    /// - affine rows: convex quadratic, minimized in closed form;
    /// - degree-two monomials: exact for diagonal `K` (every non-constant
    ///   component vanishes at the origin and contributes non-negatively).
    pub fn infimum(&self, k: &SymMatrix) -> Result<f64> {
        if k.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "gain is {}x{0} but the regressor has {} components",
                k.dim(),
                self.dim()
            )));
        }
        match self {
            BetaFamily::Constant(c) => Ok(c * c * k.get(0, 0)),
            BetaFamily::Affine(rows) => {
                let state_dim = self.min_state_dim();
                let nb = rows.len();
                let consts: Vec<f64> = rows
                    .iter()
                    .map(|r| match r {
                        AffineRow::Constant(c) => *c,
                        AffineRow::State { .. } => 0.0,
                    })
                    .collect();
                if state_dim == 0 {
                    let kc = k.as_mat().mat_vec(&consts);
                    return Ok(vec_dot(&consts, &kc).max(0.0));
                }
                let mut l = Mat::zeros(nb, state_dim);
                for (row, r) in rows.iter().enumerate() {
                    if let AffineRow::State { index, coeff } = r {
                        l.set(row, *index, *coeff);
                    }
                }
                // minimize (c + Lx)ᵀK(c + Lx): x solves LᵀKL x = -LᵀKc.
                let lt_k = l.transpose().matmul(k.as_mat());
                let m = SymMatrix::symmetrize(&lt_k.matmul(&l));
                let rhs = lt_k.mat_vec(&consts);
                let eig = sym_eig(&m);
                let lam_max = eig.max().max(0.0);
                let mut x = vec![0.0; state_dim];
                for idx in 0..state_dim {
                    let lam = eig.values[idx];
                    if lam <= 1e-12 * lam_max.max(1.0) {
                        continue;
                    }
                    let u = eig.vector(idx);
                    let proj = vec_dot(&u, &rhs) / lam;
                    for (xi, ui) in x.iter_mut().zip(&u) {
                        *xi -= proj * ui;
                    }
                }
                let kc = k.as_mat().mat_vec(&consts);
                let value = vec_dot(&consts, &kc) + vec_dot(&rhs, &x);
                Ok(value.max(0.0))
            }
            BetaFamily::Poly2(terms) => {
                let scale = k.as_mat().max_abs().max(1.0);
                for i in 0..k.dim() {
                    for j in (i + 1)..k.dim() {
                        if k.get(i, j).abs() > 1e-14 * scale {
                            return Err(Error::UnsupportedRegressor(
                                "degree-two regressor with non-diagonal gain has no closed-form infimum"
                                    .into(),
                            ));
                        }
                    }
                }
                let mut total = 0.0;
                for (idx, t) in terms.iter().enumerate() {
                    if let Monomial::Constant(c) = t {
                        total += k.get(idx, idx) * c * c;
                    }
                }
                Ok(total)
            }
        }
    }
}
