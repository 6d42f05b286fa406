use crate::error::{invalid, Result};
use crate::Scalar;

/// Step sizes, line-search parameters and stopping rules shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// RED step size.
    pub gamma: T,
    /// Initial gradient step of the monotone line search, reset every iteration.
    pub alpha0: T,
    /// Shrink factor in `(0, 1)`.
    pub beta: T,
    /// Sufficient-decrease parameter in `(0, 1/2)`.
    pub theta: T,
    /// Step-size floor; line searches give up below it.
    pub epsilon: T,
    /// Maximum number of outer iterations.
    pub max_iters: usize,
    /// Abort once the normalized residual exceeds this.
    pub divergence_cap: T,
    /// Stop once the normalized residual is at or below this; `0` disables.
    pub residual_tol: T,
    /// Monotone RED only: test each gradient step against its own `alpha`
    /// before shrinking, instead of the as-printed shrink-then-test order.
    pub test_before_shrink: bool,
}

impl<T: Scalar> SolverConfig<T> {
    /// Defaults: beta 0.5, theta 0.1, alpha0 1, epsilon 1e-12, 1000
    /// iterations, divergence cap 1e2, no residual tolerance.
    pub fn with_gamma(gamma: T) -> Self {
        Self {
            gamma,
            alpha0: T::one(),
            beta: T::of(0.5),
            theta: T::of(0.1),
            epsilon: T::of(1e-12),
            max_iters: 1000,
            divergence_cap: T::of(1e2),
            residual_tol: T::zero(),
            test_before_shrink: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.gamma) {
            return invalid(format!("gamma must be positive, got {}", self.gamma));
        }
        if !pos(self.alpha0) {
            return invalid(format!("alpha0 must be positive, got {}", self.alpha0));
        }
        if !(self.beta > T::zero() && self.beta < T::one()) {
            return invalid(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.theta > T::zero() && self.theta < T::of(0.5)) {
            return invalid(format!("theta must lie in (0, 1/2), got {}", self.theta));
        }
        if !pos(self.epsilon) {
            return invalid(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iters == 0 {
            return invalid("max_iters must be at least 1");
        }
        if !(self.divergence_cap > T::zero()) {
            return invalid("divergence_cap must be positive");
        }
        if !(self.residual_tol >= T::zero()) {
            return invalid("residual_tol must be non-negative");
        }
        Ok(())
    }
}

/// `1 / (L + 2 tau)`, where `L` is the Lipschitz constant of the fidelity
/// gradient (`lambda_max(A^T A)`).
pub fn default_gamma<T: Scalar>(lipschitz: T, tau: T) -> Result<T> {
    if !(lipschitz >= T::zero()) || !(tau > T::zero()) {
        return invalid(format!("default_gamma needs L >= 0 and tau > 0, got L={lipschitz}, tau={tau}"));
    }
    Ok(T::one() / (lipschitz + T::of(2.0) * tau))
}
