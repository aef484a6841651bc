//! Dense Hermitian operators.

use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Tolerance on `max |H - H^dagger|` accepted by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// An N×N complex Hermitian matrix, N ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    /// Accepts `matrix` if it is Hermitian within `tol`, then replaces it by its
    /// Hermitian part `(H + H^dagger) / 2` so the stored operator is exact.
    pub fn with_tolerance(matrix: DMatrix<C64>, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() < 2 {
            return Err(Error::DimensionTooSmall(matrix.nrows()));
        }
        if let Some(index) = matrix.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let adjoint = matrix.adjoint();
        let matrix = (matrix + adjoint).unscale(2.0);
        Ok(Self { matrix })
    }

    /// Builds `H` from separate real and imaginary parts, row-major.
    pub fn from_parts(real: &[Vec<f64>], imag: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = real.len();
        if imag.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: imag.len(),
            });
        }
        for row in real.iter().chain(imag) {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let matrix = DMatrix::from_fn(n, n, |j, k| C64::new(real[j][k], imag[j][k]));
        Self::with_tolerance(matrix, tol)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&v| C64::new(v, 0.0)));
        Self::new(DMatrix::from_diagonal(&d))
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        debug_assert!(hermitian_deviation(&matrix) <= HERMITIAN_TOL);
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    /// `H v`.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    /// `<v|H|v>` as a complex number; real up to rounding.
    pub fn expectation(&self, v: &DVector<C64>) -> C64 {
        v.dotc(&self.apply(v))
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

/// `max |M_jk - conj(M_kj)|`.
pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}
