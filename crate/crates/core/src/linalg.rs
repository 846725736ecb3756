//! Small dense vectors and square matrices.
//!
//! The information coordinates in this model are low-dimensional (n = 2 in
//! the reference setup, n <= 16 in practice), so everything here is a plain
//! row-major `Vec<f64>` with direct loops. Positive-definite solves go
//! through an unpivoted Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::Error;

/// A real vector of information coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn from_slice(entries: &[f64]) -> Self {
        Self {
            data: entries.to_vec(),
        }
    }

    pub fn from_vec(entries: Vec<f64>) -> Self {
        Self { data: entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector::from_vec(
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector::from_vec(
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector::from_vec(self.data.iter().map(|a| a * s).collect())
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            let d = a - b;
            acc += d * d;
        }
        libm::sqrt(acc)
    }

    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut m: f64 = 0.0;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            let d = abs(a - b);
            if d > m {
                m = d;
            }
        }
        m
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// A square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

pub(crate) fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Builds a `dim`x`dim` matrix from row-major data.
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self, Error> {
        if data.len() != dim * dim {
            return Err(Error::BadMatrixShape {
                dim,
                len: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn matvec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.dim, v.dim());
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o += b;
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(other.data.iter()) {
            *o -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= s;
        }
        out
    }

    /// `self + s * I`, used to shift a Gram matrix by a multiplier.
    pub fn add_scaled_identity(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] += s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for &x in &self.data {
            let a = abs(x);
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut m: f64 = 0.0;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            let d = abs(a - b);
            if d > m {
                m = d;
            }
        }
        m
    }

    /// Largest |m_ij - m_ji| over all entry pairs.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = abs(self.data[i * n + j] - self.data[j * n + i]);
                if d > m {
                    m = d;
                }
            }
        }
        m
    }

    pub fn symmetrized(&self) -> Matrix {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                out.data[i * n + j] = v;
                out.data[j * n + i] = v;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let n = self.dim;
        &mut self.data[i * n + j]
    }
}

/// Lower-triangular Cholesky factor L with L L^T = A for symmetric
/// positive-definite A.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(a: &Matrix) -> Result<Self, Error> {
        let n = a.dim();
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut s = a[(j, j)];
            for k in 0..j {
                s -= l[(j, k)] * l[(j, k)];
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            l[(j, j)] = libm::sqrt(s);
            for i in (j + 1)..n {
                let mut t = a[(i, j)];
                for k in 0..j {
                    t -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = t / l[(j, j)];
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    /// Solves A x = b by forward then backward substitution.
    pub fn solve(&self, b: &Vector) -> Vector {
        let n = self.l.dim();
        debug_assert_eq!(n, b.dim());
        let mut y = Vector::zeros(n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        let mut x = Vector::zeros(n);
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Solves A X = B column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        let n = self.l.dim();
        debug_assert_eq!(n, b.dim());
        let mut out = Matrix::zeros(n);
        for j in 0..n {
            let mut col = Vector::zeros(n);
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.l.dim()))
    }
}

/// Lower-triangular factor of a symmetric positive-semidefinite matrix,
/// allowing zero pivots (needed for degenerate spreads like the zero matrix).
pub fn semidefinite_factor(a: &Matrix, tol: f64) -> Result<Matrix, Error> {
    let n = a.dim();
    let scale = a.max_abs().max(1.0);
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut s = a[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)];
        }
        if s < -tol * scale || !s.is_finite() {
            return Err(Error::NotPositiveSemidefinite { pivot: j });
        }
        if s <= tol * scale {
            // Zero pivot: the rest of the column must vanish too.
            for i in (j + 1)..n {
                let mut t = a[(i, j)];
                for k in 0..j {
                    t -= l[(i, k)] * l[(j, k)];
                }
                if abs(t) > libm::sqrt(tol) * scale {
                    return Err(Error::NotPositiveSemidefinite { pivot: j });
                }
                l[(i, j)] = 0.0;
            }
            l[(j, j)] = 0.0;
            continue;
        }
        l[(j, j)] = libm::sqrt(s);
        for i in (j + 1)..n {
            let mut t = a[(i, j)];
            for k in 0..j {
                t -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = t / l[(j, j)];
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vector_basics() {
        let a = Vector::from_slice(&[3.0, 4.0]);
        let b = Vector::zeros(2);
        assert_relative_eq!(a.norm(), 5.0);
        assert_relative_eq!(a.distance(&b), 5.0);
        assert_relative_eq!(a.dot(&a), 25.0);
        assert_eq!(a.sub(&a), b);
    }

    #[test]
    fn matvec_and_matmul() {
        let m = Matrix::from_rows(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let v = Vector::from_slice(&[1.0, -1.0]);
        let mv = m.matvec(&v);
        assert_relative_eq!(mv[0], -1.0);
        assert_relative_eq!(mv[1], -1.0);

        let mt = m.transpose();
        let p = m.matmul(&mt);
        assert_relative_eq!(p[(0, 0)], 5.0);
        assert_relative_eq!(p[(0, 1)], 11.0);
        assert_relative_eq!(p[(1, 0)], 11.0);
        assert_relative_eq!(p[(1, 1)], 25.0);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_rows(3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap();
        let chol = Cholesky::new(&a).unwrap();
        let b = Vector::from_slice(&[1.0, 2.0, 3.0]);
        let x = chol.solve(&b);
        let back = a.matvec(&x);
        assert!(back.max_abs_diff(&b) < 1e-12);

        let inv = chol.inverse();
        let eye = a.matmul(&inv);
        assert!(eye.max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            Cholesky::new(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn semidefinite_factor_handles_zero_matrix() {
        let z = Matrix::zeros(2);
        let l = semidefinite_factor(&z, 1e-12).unwrap();
        assert_eq!(l, Matrix::zeros(2));

        let d = Matrix::diag(&[0.1, 0.0]);
        let l = semidefinite_factor(&d, 1e-12).unwrap();
        let back = l.matmul(&l.transpose());
        assert!(back.max_abs_diff(&d) < 1e-14);

        let neg = Matrix::diag(&[-1.0, 1.0]);
        assert!(semidefinite_factor(&neg, 1e-12).is_err());
    }

    #[test]
    fn bad_shape_is_reported() {
        assert!(matches!(
            Matrix::from_rows(2, vec![1.0, 2.0, 3.0]),
            Err(Error::BadMatrixShape { dim: 2, len: 3 })
        ));
    }
}
