use crate::error::{check_len, invalid, Result};
use crate::imaging::{Dct2Plan, Shape};
use crate::vector::sub;
use crate::Scalar;

use super::{Denoiser, DenoiserFlags};

/// Soft threshold with a smooth transition, returning `(s(t), s'(t))`.
///
/// With `mu == 0` this is the exact `sign(t) max(|t| - lambda, 0)` with the
/// derivative taken as 0 at the kink. With `0 < mu <= 2 lambda` the slope
/// ramps from 0 to 1 over `|t| in [lambda - mu/2, lambda + mu/2]` along the
/// cubic smoothstep `3u^2 - 2u^3`, so `s` is C2 and coincides with the exact
/// soft threshold outside the transition band.
pub fn smoothed_soft_threshold<T: Scalar>(t: T, lambda: T, mu: T) -> (T, T) {
    let a = t.abs();
    let sign = t.signum();
    if mu == T::zero() {
        return if a > lambda { (sign * (a - lambda), T::one()) } else { (T::zero(), T::zero()) };
    }
    let half = T::of(0.5);
    let start = lambda - half * mu;
    let u = (a - start) / mu;
    if u <= T::zero() {
        (T::zero(), T::zero())
    } else if u >= T::one() {
        (sign * (a - lambda), T::one())
    } else {
        let u2 = u * u;
        let value = mu * (u2 * u - half * u2 * u2);
        let slope = T::of(3.0) * u2 - T::of(2.0) * u2 * u;
        (sign * value, slope)
    }
}

/// `D(x) = C^T s(C x)` with `C` the orthonormal 2D DCT.
///
/// The Jacobian `C^T diag(s'(Cx)) C` is symmetric with eigenvalues in
/// `[0, 1]`, so the denoiser is nonexpansive.
#[derive(Debug, Clone)]
pub struct DctSoftThreshold<T> {
    plan: Dct2Plan<T>,
    lambda: T,
    mu: T,
}

impl<T: Scalar> DctSoftThreshold<T> {
    pub fn new(shape: Shape, lambda: T, mu: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return invalid("soft-threshold lambda must be positive");
        }
        if !(mu >= T::zero()) || mu > T::of(2.0) * lambda {
            return invalid("smoothing width mu must lie in [0, 2 lambda]");
        }
        Ok(Self { plan: Dct2Plan::new(shape), lambda, mu })
    }

    fn dim_check(&self, x: &[T]) -> Result<()> {
        check_len("dct denoiser", self.plan.shape().len(), x.len())
    }
}

impl<T: Scalar> Denoiser<T> for DctSoftThreshold<T> {
    fn dim(&self) -> usize {
        self.plan.shape().len()
    }

    fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.dim_check(x)?;
        let c = self.plan.forward(x)?;
        let shrunk: Vec<T> = c
            .iter()
            .map(|&t| smoothed_soft_threshold(t, self.lambda, self.mu).0)
            .collect();
        self.plan.inverse(&shrunk)
    }

    fn residual_vjp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        self.dim_check(x)?;
        self.dim_check(v)?;
        let cx = self.plan.forward(x)?;
        let cv = self.plan.forward(v)?;
        let scaled: Vec<T> = cx
            .iter()
            .zip(&cv)
            .map(|(&t, &w)| smoothed_soft_threshold(t, self.lambda, self.mu).1 * w)
            .collect();
        Ok(sub(v, &self.plan.inverse(&scaled)?))
    }

    fn flags(&self) -> DenoiserFlags {
        DenoiserFlags { symmetric_jacobian: true, smooth: self.mu > T::zero(), has_vjp: true }
    }

    fn nominal_lipschitz(&self) -> Option<T> {
        Some(T::one())
    }

    fn label(&self) -> String {
        format!("dct_threshold(lambda={}, mu={})", self.lambda, self.mu)
    }
}
