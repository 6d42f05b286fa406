use crate::error::{check_len, Result};
use crate::Scalar;

use super::{Denoiser, DenoiserFlags};

/// `D(x) = x`. Makes `G` equal to the fidelity gradient.
#[derive(Debug, Clone, Copy)]
pub struct IdentityDenoiser {
    n: usize,
}

impl IdentityDenoiser {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl<T: Scalar> Denoiser<T> for IdentityDenoiser {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        check_len("identity denoiser", self.n, x.len())?;
        Ok(x.to_vec())
    }

    fn residual_vjp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_len("identity denoiser", self.n, x.len())?;
        check_len("identity denoiser", self.n, v.len())?;
        Ok(vec![T::zero(); self.n])
    }

    fn flags(&self) -> DenoiserFlags {
        DenoiserFlags { symmetric_jacobian: true, smooth: true, has_vjp: true }
    }

    fn nominal_lipschitz(&self) -> Option<T> {
        Some(T::one())
    }

    fn label(&self) -> String {
        "identity".into()
    }
}
