//! Denoisers `D` with residual Jacobian products for `R = I - D`.
//!
//! Every denoiser exposes `residual_vjp(x, v) = (I - J_D(x))^T v`, which is
//! what the gradient of the fixed-point loss needs, and `residual_jvp`
//! (the untransposed product) used by the Lipschitz estimator.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::Scalar;

mod convnet;
mod dct_threshold;
mod fd_wrapper;
mod identity;
mod lipschitz;
mod scaled;
mod smoother;

pub use convnet::{calibrate_weight_scale, ConvNetConfig, RandomConvNet};
pub use dct_threshold::{smoothed_soft_threshold, DctSoftThreshold};
pub use fd_wrapper::{FdJacobianWrapper, DENSE_FALLBACK_CAP, FD_STEP};
pub use identity::IdentityDenoiser;
pub use lipschitz::{estimate_lipschitz, LipschitzEstimate, LipschitzMethod};
pub use scaled::ScaledDenoiser;
pub use smoother::LinearSmoother;

/// Structural properties of a denoiser's Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenoiserFlags {
    pub symmetric_jacobian: bool,
    /// Continuously differentiable everywhere.
    pub smooth: bool,
    /// `residual_vjp` is implemented.
    pub has_vjp: bool,
}

pub trait Denoiser<T: Scalar>: Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[T]) -> Result<Vec<T>>;

    /// `(I - J_D(x))^T v`
    fn residual_vjp(&self, _x: &[T], _v: &[T]) -> Result<Vec<T>> {
        Err(Error::Unsupported(format!("{} has no vector-Jacobian product", self.label())))
    }

    /// `(I - J_D(x)) v`; coincides with the VJP for symmetric Jacobians.
    fn residual_jvp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        if self.flags().symmetric_jacobian {
            self.residual_vjp(x, v)
        } else {
            Err(Error::Unsupported(format!("{} has no Jacobian-vector product", self.label())))
        }
    }

    fn flags(&self) -> DenoiserFlags;

    /// Known Lipschitz constant (or bound), if one is available analytically.
    fn nominal_lipschitz(&self) -> Option<T> {
        None
    }

    fn label(&self) -> String;
}

/// `R(x) = x - D(x)`
pub fn residual<T: Scalar>(d: &dyn Denoiser<T>, x: &[T]) -> Result<Vec<T>> {
    Ok(crate::vector::sub(x, &d.apply(x)?))
}
