use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use super::{C64, UNITARY_TOL};
use crate::error::{Error, Result};

/// Dense complex square matrix acting on a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: DMatrix<C64>,
}

impl Operator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    /// Real symmetric input promoted to complex.
    pub fn from_real(entries: &DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.entries * v
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Largest entrywise deviation of `P² − P`.
    pub fn idempotence_defect(&self) -> f64 {
        max_abs_diff(&(&self.entries * &self.entries), &self.entries)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            entries: self.entries.map(|x| x * factor),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries * &rhs.entries,
        }
    }
}

/// Unitary evolution operator tagged with the time interval it spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    matrix: DMatrix<C64>,
    duration: f64,
}

impl Propagator {
    /// Checks squareness and unitarity to [`UNITARY_TOL`].
    pub fn new(matrix: DMatrix<C64>, duration: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let p = Self { matrix, duration };
        let defect = p.unitarity_defect();
        if !(defect <= UNITARY_TOL) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(p)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            duration: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `U†`, which spans the reversed interval.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            duration: -self.duration,
        }
    }

    /// `self · earlier`: evolve by `earlier` first, then by `self`.
    pub fn compose(&self, earlier: &Propagator) -> Result<Self> {
        if self.dim() != earlier.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: earlier.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &earlier.matrix,
            duration: self.duration + earlier.duration,
        })
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    /// `max |U†U − 1|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(
            &(self.matrix.adjoint() * &self.matrix),
            &DMatrix::identity(n, n),
        )
    }

    /// Entrywise distance to another propagator's matrix.
    pub fn max_diff(&self, other: &Propagator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
