//! Dense complex matrices and the two checked wrappers built on them.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        Ok(m)
    }

    /// Build from row-major entries. Rejects non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(rows, cols, data)
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Result<Self> {
        let mut m = Self::zeros(entries.len(), entries.len())?;
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        Ok(m)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self {
            rows: self.cols,
            cols: self.rows,
            data: vec![Complex::zero(); self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j] + a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::invalid(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// Left-multiply rows `(m, m+1)` by the 2x2 block `b` in place.
    pub fn apply_left_2x2(&mut self, m: usize, b: &[[Complex<T>; 2]; 2]) {
        for j in 0..self.cols {
            let x = self[(m, j)];
            let y = self[(m + 1, j)];
            self[(m, j)] = b[0][0] * x + b[0][1] * y;
            self[(m + 1, j)] = b[1][0] * x + b[1][1] * y;
        }
    }

    /// Right-multiply columns `(m, m+1)` by the 2x2 block `b` in place.
    pub fn apply_right_2x2(&mut self, m: usize, b: &[[Complex<T>; 2]; 2]) {
        for i in 0..self.rows {
            let x = self[(i, m)];
            let y = self[(i, m + 1)];
            self[(i, m)] = x * b[0][0] + y * b[1][0];
            self[(i, m + 1)] = x * b[0][1] + y * b[1][1];
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// `max |(M†M - I)_ij|`; the matrix must be square.
    pub fn unitarity_deviation(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::invalid(format!(
                "unitarity needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let gram = self.adjoint().matmul(self)?;
        gram.max_abs_diff(&Self::identity(self.rows)?)
    }

    /// Entrywise modulus, row-major.
    pub fn moduli(&self) -> Vec<T> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    pub fn map<U: Real>(&self, f: impl Fn(Complex<T>) -> Complex<U>) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

/// `true` iff `max |m†m - I| <= tol`.
pub fn is_unitary<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    Ok(m.unitarity_deviation()? <= tol)
}

/// Square matrix verified unitary at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary<T>(ComplexMatrix<T>);

impl<T: Real> Unitary<T> {
    /// Checks against [`Real::unitarity_tol`].
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(m, T::unitarity_tol())
    }

    pub fn with_tolerance(m: ComplexMatrix<T>, tol: T) -> Result<Self> {
        let deviation = m.unitarity_deviation()?;
        if deviation <= tol {
            Ok(Self(m))
        } else {
            Err(Error::NotUnitary {
                deviation: deviation.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// Skips the check. Intended for readers given an explicit opt-out.
    pub fn new_unchecked(m: ComplexMatrix<T>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::identity(n)?))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.n_rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix<T> {
        self.0
    }

    /// Entrywise moduli as an amplitude matrix. Columns of a unitary are
    /// already unit-norm so no renormalisation is applied.
    pub fn amplitudes(&self) -> AmplitudeMatrix<T> {
        AmplitudeMatrix {
            n: self.n(),
            data: self.0.moduli(),
        }
    }
}

impl<T> AsRef<ComplexMatrix<T>> for Unitary<T> {
    fn as_ref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

/// Non-negative `n x n` matrix of amplitude moduli with unit-norm columns.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> AmplitudeMatrix<T> {
    /// Tolerance on each column's Euclidean norm.
    pub fn column_norm_tol() -> T {
        T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
    }

    /// Validates non-negativity and column normalisation.
    pub fn new(n: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::invalid(format!(
                "amplitude matrix needs {n}x{n} entries, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !(x.is_finite() && **x >= T::zero())) {
            return Err(Error::invalid(format!(
                "amplitudes must be finite and non-negative, found {bad}"
            )));
        }
        let m = Self { n, data };
        for j in 0..n {
            let norm = m.column_norm(j);
            if (norm - T::one()).abs() > Self::column_norm_tol() {
                return Err(Error::invalid(format!(
                    "column {j} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(m)
    }

    /// Scales each column to unit Euclidean norm. Fails on an all-zero column.
    pub fn from_unnormalized(n: usize, mut data: Vec<T>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::invalid(format!(
                "amplitude matrix needs {n}x{n} entries, got {}",
                data.len()
            )));
        }
        for j in 0..n {
            let norm = (0..n)
                .map(|i| data[i * n + j] * data[i * n + j])
                .fold(T::zero(), |a, b| a + b)
                .sqrt();
            if !(norm > T::zero()) || !norm.is_finite() {
                return Err(Error::data(format!("column {j} is identically zero")));
            }
            for i in 0..n {
                data[i * n + j] = data[i * n + j] / norm;
            }
        }
        Self::new(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    fn column_norm(&self, j: usize) -> T {
        (0..self.n)
            .map(|i| self.get(i, j) * self.get(i, j))
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }
}
