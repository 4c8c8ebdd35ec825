//! Symmetric matrices, their spectra, and the two block/rank-one eigenvalue
//! facts used throughout the crate.
//!
//! Eigendecomposition is a cyclic Jacobi iteration: dimensions never exceed
//! five, so this is exact enough, deterministic and dependency-free.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::{vec_norm, Mat};

/// Relative asymmetry accepted before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Off-diagonal threshold (relative to the matrix norm) declaring the Jacobi
/// iteration converged.
pub const JACOBI_TOL: f64 = 1e-12;

/// Real symmetric matrix. Construction symmetrizes `(M + Mᵀ)/2` when the
/// asymmetry is within [`SYMMETRY_TOL`] and rejects anything worse.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    mat: Mat,
}

impl SymMatrix {
    pub fn new(mat: Mat) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let scale = mat.max_abs().max(1.0);
        let mut asym = 0.0_f64;
        for i in 0..mat.rows() {
            for j in (i + 1)..mat.cols() {
                asym = asym.max((mat.get(i, j) - mat.get(j, i)).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry: asym / scale });
        }
        let n = mat.rows();
        let sym = Mat::from_fn(n, n, |i, j| 0.5 * (mat.get(i, j) + mat.get(j, i)));
        Ok(Self { mat: sym })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(Mat::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: Mat::identity(n) }
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        Self { mat: Mat::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 }) }
    }

    /// Scalar 1×1 matrix.
    pub fn scalar(x: f64) -> Self {
        Self { mat: Mat::from_fn(1, 1, |_, _| x) }
    }

    /// Symmetrize an arbitrary square matrix without an asymmetry check.
    /// Intended for expressions that are symmetric up to roundoff by
    /// construction (e.g. `AᵀP + PA`).
    pub fn symmetrize(mat: &Mat) -> Self {
        let n = mat.rows();
        Self { mat: Mat::from_fn(n, n, |i, j| 0.5 * (mat.get(i, j) + mat.get(j, i))) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn as_mat(&self) -> &Mat {
        &self.mat
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix { mat: self.mat.add(&other.mat) }
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix { mat: self.mat.scale(s) }
    }

    /// `self + c · v vᵀ` for an n×m matrix `v`, built symmetrically entry by
    /// entry so no tolerance check is involved.
    pub fn add_scaled_gram(&self, c: f64, v: &Mat) -> SymMatrix {
        assert_eq!(v.rows(), self.dim(), "gram update dimension mismatch");
        let n = self.dim();
        let mat = Mat::from_fn(n, n, |i, j| {
            let mut g = 0.0;
            for k in 0..v.cols() {
                g += v.get(i, k) * v.get(j, k);
            }
            self.mat.get(i, j) + c * g
        });
        SymMatrix { mat }
    }
}

/// Full spectrum of a symmetric matrix: ascending eigenvalues with an
/// orthonormal set of column eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.rows()).map(|i| self.vectors.get(i, k)).collect()
    }

    /// Orthonormal basis (as columns) of the eigenspace whose eigenvalues lie
    /// within `gap` of the minimal one.
    pub fn min_eigenspace(&self, gap: f64) -> Mat {
        let lo = self.values[0];
        let cols: Vec<usize> =
            (0..self.values.len()).filter(|&k| self.values[k] - lo <= gap).collect();
        Mat::from_fn(self.vectors.rows(), cols.len(), |i, j| self.vectors.get(i, cols[j]))
    }
}

/// Cyclic Jacobi eigendecomposition.
pub fn sym_eig(m: &SymMatrix) -> EigenDecomposition {
    let n = m.dim();
    let mut a = m.as_mat().clone();
    let mut v = Mat::identity(n);
    let scale = a.max_abs().max(1e-300);
    let tol = JACOBI_TOL * scale;

    for _sweep in 0..100 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-3 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e138 {
                    0.5 / theta
                } else {
                    let s = if theta < 0.0 { -1.0 } else { 1.0 };
                    s / (theta.abs() + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // Apply the rotation on both sides and accumulate it in v.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| a.get(k, k)).collect();
    let mut vectors = Mat::from_fn(n, n, |i, j| v.get(i, order[j]));
    // Deterministic sign: largest-magnitude component of each column positive.
    for j in 0..n {
        let mut best = 0usize;
        for i in 1..n {
            if vectors.get(i, j).abs() > vectors.get(best, j).abs() {
                best = i;
            }
        }
        if vectors.get(best, j) < 0.0 {
            for i in 0..n {
                vectors.set(i, j, -vectors.get(i, j));
            }
        }
    }
    EigenDecomposition { values, vectors }
}

/// Minimal eigenvalue without the eigenvector bookkeeping.
pub fn min_eig(m: &SymMatrix) -> f64 {
    sym_eig(m).min()
}

/// Maximal eigenvalue.
pub fn max_eig(m: &SymMatrix) -> f64 {
    sym_eig(m).max()
}

/// True iff `λ_min(M) > tol`.
pub fn is_pos_def(m: &SymMatrix, tol: f64) -> bool {
    min_eig(m) > tol
}

/// Decide negative semidefiniteness of the block matrix `[[M, m], [mᵀ, 0]]`
/// through its equivalent characterization `M ≤ 0` and `m = 0`.
pub fn block_neg_semidef(m: &SymMatrix, off: &[f64], tol: f64) -> Result<bool> {
    if off.len() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "block vector has length {}, matrix dimension is {}",
            off.len(),
            m.dim()
        )));
    }
    Ok(max_eig(m) <= tol && vec_norm(off) <= tol)
}

/// Assemble the `(n+1)×(n+1)` block matrix `[[M, m], [mᵀ, 0]]`.
pub fn block_matrix(m: &SymMatrix, off: &[f64]) -> SymMatrix {
    let n = m.dim();
    assert_eq!(off.len(), n);
    SymMatrix {
        mat: Mat::from_fn(n + 1, n + 1, |i, j| {
            if i < n && j < n {
                m.get(i, j)
            } else if i < n && j == n {
                off[i]
            } else if i == n && j < n {
                off[j]
            } else {
                0.0
            }
        }),
    }
}

/// True iff some eigenvector `r` of the minimal eigenvalue of `Q` satisfies
/// `‖wᵀr‖ ≤ tol·‖r‖`. Repeated minimal eigenvalues are handled by testing
/// against the whole eigenspace: the predicate holds iff the compression of
/// `wwᵀ` onto the eigenspace is singular (up to `tol²`).
pub fn min_eig_orthogonal(q: &SymMatrix, w: &Mat, tol: f64) -> Result<bool> {
    if w.rows() != q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "w has {} rows, matrix dimension is {}",
            w.rows(),
            q.dim()
        )));
    }
    let eig = sym_eig(q);
    let scale = q.as_mat().max_abs().max(1.0);
    let basis = eig.min_eigenspace(1e-10 * scale);
    let k = basis.cols();
    let m = w.cols();
    if k > m {
        // The null space of the m×k compression is nontrivial by dimension.
        return Ok(true);
    }
    // Minimal eigenvalue of Vᵀ w wᵀ V decides whether some unit r = V c has
    // ‖wᵀ r‖ ≤ tol.
    let wv = w.transpose().matmul(&basis); // m×k
    let gram = SymMatrix::symmetrize(&wv.transpose().matmul(&wv)); // k×k
    Ok(min_eig(&gram) <= tol * tol)
}

/// Orthonormal basis of the orthogonal complement of a nonzero vector,
/// returned as the columns of an n×(n-1) matrix.
pub fn orthogonal_complement(b: &[f64]) -> Result<Mat> {
    let n = b.len();
    let nb = vec_norm(b);
    if nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let unit: Vec<f64> = b.iter().map(|x| x / nb).collect();
    let mut basis: Vec<Vec<f64>> = vec![unit];
    // Gram-Schmidt over the coordinate directions, skipping near-dependent ones.
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut cand = vec![0.0; n];
        cand[i] = 1.0;
        for v in &basis {
            let proj = crate::mat::vec_dot(&cand, v);
            for (c, vv) in cand.iter_mut().zip(v) {
                *c -= proj * vv;
            }
        }
        let norm = vec_norm(&cand);
        if norm > 1e-8 {
            for c in cand.iter_mut() {
                *c /= norm;
            }
            basis.push(cand);
        }
    }
    assert_eq!(basis.len(), n, "complement construction failed");
    Ok(Mat::from_fn(n, n - 1, |i, j| basis[j + 1][i]))
}
