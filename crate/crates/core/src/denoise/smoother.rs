use crate::error::{check_len, invalid, Result};
use crate::imaging::{convolve_periodic_raw, Kernel2D, Shape};
use crate::vector::sub;
use crate::Scalar;

use super::{Denoiser, DenoiserFlags};

/// Periodic Gaussian smoothing `D(x) = W x`.
///
/// The kernel is normalized, symmetric and non-negative, so `W` is a
/// symmetric matrix with spectral norm `max |k_hat| = 1`.
#[derive(Debug, Clone)]
pub struct LinearSmoother<T> {
    shape: Shape,
    sigma: T,
    kernel: Kernel2D<T>,
    lipschitz: T,
}

impl<T: Scalar> LinearSmoother<T> {
    pub fn new(shape: Shape, sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) {
            return invalid("smoother sigma must be positive");
        }
        let kernel = Kernel2D::gaussian_truncated(sigma)?;
        if kernel.size() > shape.height.min(shape.width) {
            return invalid(format!("smoothing kernel of size {} exceeds image {shape}", kernel.size()));
        }
        let lipschitz = kernel
            .dft_magnitudes(shape.height, shape.width)
            .into_iter()
            .fold(T::zero(), T::max);
        Ok(Self { shape, sigma, kernel, lipschitz })
    }

    pub fn kernel(&self) -> &Kernel2D<T> {
        &self.kernel
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
}

impl<T: Scalar> Denoiser<T> for LinearSmoother<T> {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        convolve_periodic_raw(self.shape, x, &self.kernel)
    }

    fn residual_vjp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_len("smoother point", self.dim(), x.len())?;
        // Symmetric kernel: W^T v == W v.
        Ok(sub(v, &convolve_periodic_raw(self.shape, v, &self.kernel)?))
    }

    fn flags(&self) -> DenoiserFlags {
        DenoiserFlags { symmetric_jacobian: true, smooth: true, has_vjp: true }
    }

    fn nominal_lipschitz(&self) -> Option<T> {
        Some(self.lipschitz)
    }

    fn label(&self) -> String {
        format!("smoother(sigma={})", self.sigma)
    }
}
