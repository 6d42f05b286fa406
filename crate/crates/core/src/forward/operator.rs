use std::fmt::Debug;

use crate::error::{check_len, invalid, Result};
use crate::vector::{dot, norm};
use crate::Scalar;

/// A linear map `A: R^n -> R^m` with its adjoint.
pub trait LinearOperator<T: Scalar>: Debug + Send + Sync {
    /// `n`
    fn domain_dim(&self) -> usize;
    /// `m`
    fn range_dim(&self) -> usize;
    fn forward(&self, x: &[T]) -> Result<Vec<T>>;
    fn adjoint(&self, u: &[T]) -> Result<Vec<T>>;

    /// `A^T A v`.
    fn normal(&self, v: &[T]) -> Result<Vec<T>> {
        self.adjoint(&self.forward(v)?)
    }

    fn label(&self) -> String {
        "linear".into()
    }
}

/// Relative adjoint defect `|<Av, u> - <v, A^T u>| / (||v|| ||u||)`.
pub fn adjoint_mismatch<T: Scalar>(op: &dyn LinearOperator<T>, v: &[T], u: &[T]) -> Result<T> {
    let lhs = dot(&op.forward(v)?, u);
    let rhs = dot(v, &op.adjoint(u)?);
    let scale = norm(v) * norm(u);
    if scale == T::zero() {
        return Ok((lhs - rhs).abs());
    }
    Ok((lhs - rhs).abs() / scale)
}

/// Dense row-major `m x n` matrix operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("dense operator needs positive dimensions");
        }
        check_len("dense matrix entries", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut data = vec![T::zero(); n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }
}

impl<T: Scalar> LinearOperator<T> for DenseOperator<T> {
    fn domain_dim(&self) -> usize {
        self.cols
    }

    fn range_dim(&self) -> usize {
        self.rows
    }

    fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("dense forward", self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    fn adjoint(&self, u: &[T]) -> Result<Vec<T>> {
        check_len("dense adjoint", self.rows, u.len())?;
        let mut out = vec![T::zero(); self.cols];
        for (i, &ui) in u.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * ui;
            }
        }
        Ok(out)
    }

    fn label(&self) -> String {
        format!("dense {}x{}", self.rows, self.cols)
    }
}
