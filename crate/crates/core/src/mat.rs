//! Dense row-major matrices and the small-scale solvers built on them.
//!
//! Dimensions in this crate are tiny (n ≤ 5), so everything is direct and
//! allocation is not a concern: LU with partial pivoting for real and complex
//! systems, Faddeev–LeVerrier for characteristic polynomials and
//! Durand–Kerner for the eigenvalues of nonsymmetric matrices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged or empty rows".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// n×1 column from a slice.
    pub fn column(v: &[f64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "mat_vec shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Solve `self * x = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        assert!(self.is_square());
        let n = self.rows;
        assert_eq!(rhs.len(), n);
        let mut a = self.data.clone();
        let mut x = rhs.to_vec();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in (col + 1)..n {
                let cand = a[r * n + col].abs();
                if cand > best {
                    best = cand;
                    piv = r;
                }
            }
            if best < 1e-300 {
                return Err(Error::Singular(format!("pivot {best:.3e} in column {col}")));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] / d;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
                x[r] -= factor * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Ok(x)
    }
}

/// Solve the complex system `a x = b` (row-major n×n `a`).
pub fn solve_complex(a: &[Complex64], n: usize, b: &[Complex64]) -> Result<Vec<Complex64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].norm_sqr();
        for r in (col + 1)..n {
            let cand = m[r * n + col].norm_sqr();
            if cand > best {
                best = cand;
                piv = r;
            }
        }
        if best < 1e-300 {
            return Err(Error::Singular(format!("complex pivot {best:.3e} in column {col}")));
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let factor = m[r * n + col] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let upper = m[col * n + j];
                m[r * n + j] -= factor * upper;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= m[i * n + j] * x[j];
        }
        x[i] = s / m[i * n + i];
    }
    Ok(x)
}

/// Coefficients of the characteristic polynomial of `a`, monic, descending:
/// `λ^n + c[1] λ^(n-1) + … + c[n]` (Faddeev–LeVerrier).
pub fn characteristic_polynomial(a: &Mat) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut m = Mat::identity(n);
    for k in 1..=n {
        m = a.matmul(&m);
        let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
        let c = -trace / k as f64;
        coeffs.push(c);
        for i in 0..n {
            m.set(i, i, m.get(i, i) + c);
        }
    }
    coeffs
}

/// All eigenvalues of a (possibly nonsymmetric) real matrix via
/// Durand–Kerner iteration on the characteristic polynomial.
pub fn eigenvalues(a: &Mat) -> Vec<Complex64> {
    let coeffs = characteristic_polynomial(a);
    let n = a.rows();
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + coeffs.iter().skip(1).fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(radius * libm::cos(angle), radius * libm::sin(angle))
        })
        .collect();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        for &c in &coeffs {
            p = p * z + Complex64::new(c, 0.0);
        }
        p
    };
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm_sqr() < 1e-280 {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 * radius.max(1.0) {
            break;
        }
    }
    roots
}

/// True when every eigenvalue of `a` has a negative real part; otherwise the
/// offending eigenvalue with the largest real part is returned.
pub fn hurwitz_check(a: &Mat) -> core::result::Result<(), (f64, f64)> {
    let eigs = eigenvalues(a);
    let mut worst: Option<Complex64> = None;
    for z in eigs {
        if z.re >= -1e-12 {
            let replace = match worst {
                Some(w) => z.re > w.re,
                None => true,
            };
            if replace {
                worst = Some(z);
            }
        }
    }
    match worst {
        Some(z) => Err((z.re, z.im)),
        None => Ok(()),
    }
}

/// Rank of the controllability matrix `[B AB … A^(n-1)B]` for a single-input
/// pair, by column-pivoted elimination.
pub fn controllability_rank(a: &Mat, b: &[f64]) -> usize {
    let n = a.rows();
    assert_eq!(b.len(), n);
    let mut ctrl = Mat::zeros(n, n);
    let mut col = b.to_vec();
    let scale = {
        let amax = a.max_abs().max(1.0);
        let bmax = col.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
        amax.max(bmax)
    };
    for j in 0..n {
        for i in 0..n {
            ctrl.set(i, j, col[i]);
        }
        col = a.mat_vec(&col);
    }
    // Gaussian elimination with full pivoting; rank counts pivots above a
    // scaled threshold.
    let mut m = ctrl;
    let tol = 1e-10 * libm::pow(scale, n as f64 - 1.0).max(1.0);
    let mut rank = 0;
    let mut used_rows = vec![false; n];
    for _ in 0..n {
        let mut best = (0usize, 0usize, 0.0_f64);
        for i in 0..n {
            if used_rows[i] {
                continue;
            }
            for j in 0..n {
                let v = m.get(i, j).abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        rank += 1;
        let (pi, pj, _) = best;
        used_rows[pi] = true;
        let d = m.get(pi, pj);
        for i in 0..n {
            if used_rows[i] || m.get(i, pj) == 0.0 {
                continue;
            }
            let factor = m.get(i, pj) / d;
            for j in 0..n {
                m.set(i, j, m.get(i, j) - factor * m.get(pi, j));
            }
        }
    }
    rank
}

/// Euclidean norm of a slice.
pub fn vec_norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Dot product of two slices.
pub fn vec_dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
