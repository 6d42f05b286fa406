use std::sync::Arc;

use crate::error::{check_len, Result};
use crate::vector::{norm_sq, sub};
use crate::Scalar;

use super::LinearOperator;

/// `g(x) = 0.5 ||y - A x||^2`.
#[derive(Debug, Clone)]
pub struct LeastSquaresFidelity<T: Scalar> {
    op: Arc<dyn LinearOperator<T>>,
    y: Vec<T>,
}

impl<T: Scalar> LeastSquaresFidelity<T> {
    pub fn new(op: Arc<dyn LinearOperator<T>>, y: Vec<T>) -> Result<Self> {
        check_len("measurements", op.range_dim(), y.len())?;
        Ok(Self { op, y })
    }

    pub fn operator(&self) -> &Arc<dyn LinearOperator<T>> {
        &self.op
    }

    pub fn measurements(&self) -> &[T] {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.op.domain_dim()
    }

    /// `A x - y`
    pub fn residual(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("fidelity input", self.dim(), x.len())?;
        Ok(sub(&self.op.forward(x)?, &self.y))
    }

    pub fn value(&self, x: &[T]) -> Result<T> {
        Ok(T::of(0.5) * norm_sq(&self.residual(x)?))
    }

    /// `A^T (A x - y)`
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.op.adjoint(&self.residual(x)?)
    }

    /// `A^T A v`; the fidelity is quadratic so this does not depend on `x`.
    pub fn hessian_vp(&self, v: &[T]) -> Result<Vec<T>> {
        check_len("hessian-vector product", self.dim(), v.len())?;
        self.op.normal(v)
    }
}
