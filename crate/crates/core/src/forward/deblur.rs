use crate::error::{check_len, invalid, Result};
use crate::imaging::{convolve_periodic_raw, Kernel2D, Shape};
use crate::Scalar;

use super::LinearOperator;

/// Periodic blur: forward is convolution with the kernel, the adjoint is
/// convolution with the kernel rotated by 180 degrees.
#[derive(Debug, Clone)]
pub struct DeblurOperator<T> {
    shape: Shape,
    kernel: Kernel2D<T>,
    flipped: Kernel2D<T>,
}

impl<T: Scalar> DeblurOperator<T> {
    pub fn new(shape: Shape, kernel: Kernel2D<T>) -> Result<Self> {
        if kernel.size() > shape.height.min(shape.width) {
            return invalid(format!("kernel of size {} exceeds image {shape}", kernel.size()));
        }
        let flipped = kernel.flipped();
        Ok(Self { shape, kernel, flipped })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn kernel(&self) -> &Kernel2D<T> {
        &self.kernel
    }
}

impl<T: Scalar> LinearOperator<T> for DeblurOperator<T> {
    fn domain_dim(&self) -> usize {
        self.shape.len()
    }

    fn range_dim(&self) -> usize {
        self.shape.len()
    }

    fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("deblur forward", self.shape.len(), x.len())?;
        convolve_periodic_raw(self.shape, x, &self.kernel)
    }

    fn adjoint(&self, u: &[T]) -> Result<Vec<T>> {
        check_len("deblur adjoint", self.shape.len(), u.len())?;
        convolve_periodic_raw(self.shape, u, &self.flipped)
    }

    fn label(&self) -> String {
        format!("deblur {} kernel {}", self.shape, self.kernel.size())
    }
}
