//! Integer linear systems and lattice kernels.

use crate::error::{Error, Result};
use crate::hermite::column_hnf;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::smith::{smith_normal_form, SmithDecomposition};

/// A cached Smith decomposition of `A`, reused across right-hand sides.
#[derive(Clone, Debug)]
pub struct SmithSolver<T: Scalar> {
    rows: usize,
    cols: usize,
    snf: SmithDecomposition<T>,
}

impl<T: Scalar> SmithSolver<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        SmithSolver {
            rows: a.rows(),
            cols: a.cols(),
            snf: smith_normal_form(a),
        }
    }

    pub fn decomposition(&self) -> &SmithDecomposition<T> {
        &self.snf
    }

    /// An integer solution of `A·x = b`, or `None` when there is none.
    pub fn solve(&self, b: &[T]) -> Result<Option<Vec<T>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let ub = self.snf.u.mul_vec(b);
        let mut y = vec![T::zero(); self.cols];
        for (i, c) in ub.iter().enumerate() {
            if i < self.snf.rank {
                let d = &self.snf.d[(i, i)];
                if !c.is_multiple_of(d) {
                    return Ok(None);
                }
                y[i] = c.clone() / d.clone();
            } else if !c.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(self.snf.v.mul_vec(&y)))
    }

    /// Whether `b` lies in the column lattice of `A`.
    pub fn contains(&self, b: &[T]) -> bool {
        matches!(self.solve(b), Ok(Some(_)))
    }

    /// Solves `A·X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix<T>) -> Result<Option<Matrix<T>>> {
        let mut cols = Vec::with_capacity(b.cols());
        for c in b.columns() {
            match self.solve(&c)? {
                Some(x) => cols.push(x),
                None => return Ok(None),
            }
        }
        Ok(Some(Matrix::from_columns(self.cols, &cols)))
    }

    /// Basis of `{x : A·x = 0}` in column Hermite normal form.
    pub fn kernel(&self) -> Matrix<T> {
        let idx: Vec<usize> = (self.snf.rank..self.cols).collect();
        column_hnf(&self.snf.v.select_columns(&idx))
    }
}

/// Solves `A·x = b` over the integers.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Option<Vec<T>>> {
    SmithSolver::new(a).solve(b)
}

/// Basis of the integer kernel of `A`, as the columns of a matrix.
pub fn kernel_basis<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    SmithSolver::new(a).kernel()
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse<T: Scalar>(u: &Matrix<T>) -> Option<Matrix<T>> {
    if u.rows() != u.cols() {
        return None;
    }
    SmithSolver::new(u)
        .solve_matrix(&Matrix::identity(u.rows()))
        .ok()
        .flatten()
}
