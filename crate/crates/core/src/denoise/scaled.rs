use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::Scalar;

use super::{Denoiser, DenoiserFlags};

/// `D(x) = s * inner(x)`. With `s > 1` around a Lipschitz-1 denoiser this
/// is expansive by construction.
#[derive(Debug, Clone)]
pub struct ScaledDenoiser<T: Scalar> {
    inner: Arc<dyn Denoiser<T>>,
    scale: T,
}

impl<T: Scalar> ScaledDenoiser<T> {
    pub fn new(inner: Arc<dyn Denoiser<T>>, scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return invalid("denoiser scale must be positive");
        }
        Ok(Self { inner, scale })
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    // (I - s J) v = v - s (v - (I - J) v)
    fn rescale(&self, v: &[T], inner_residual: Vec<T>) -> Vec<T> {
        v.iter()
            .zip(inner_residual)
            .map(|(&vi, ri)| vi - self.scale * (vi - ri))
            .collect()
    }
}

impl<T: Scalar> Denoiser<T> for ScaledDenoiser<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.inner.apply(x)?.into_iter().map(|v| self.scale * v).collect())
    }

    fn residual_vjp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        let r = self.inner.residual_vjp(x, v)?;
        Ok(self.rescale(v, r))
    }

    fn residual_jvp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        let r = self.inner.residual_jvp(x, v)?;
        Ok(self.rescale(v, r))
    }

    fn flags(&self) -> DenoiserFlags {
        self.inner.flags()
    }

    fn nominal_lipschitz(&self) -> Option<T> {
        self.inner.nominal_lipschitz().map(|l| l * self.scale)
    }

    fn label(&self) -> String {
        format!("scaled({}, s={})", self.inner.label(), self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::{IdentityDenoiser, LinearSmoother};
    use crate::imaging::{RngState, Shape};

    #[test]
    fn unit_scale_is_transparent() {
        let inner: Arc<dyn Denoiser<f64>> = Arc::new(LinearSmoother::new(Shape::new(12, 12), 1.0).unwrap());
        let d = ScaledDenoiser::new(inner.clone(), 1.0).unwrap();
        let mut rng = RngState::new(3);
        for _ in 0..5 {
            let x: Vec<f64> = rng.uniform_vec(144);
            let v: Vec<f64> = rng.gaussian_vec(144);
            let a = d.apply(&x).unwrap();
            let b = inner.apply(&x).unwrap();
            assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() <= 1e-15));
            let a = d.residual_vjp(&x, &v).unwrap();
            let b = inner.residual_vjp(&x, &v).unwrap();
            assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() <= 1e-15));
        }
    }

    #[test]
    fn scaled_identity_at_origin() {
        let d = ScaledDenoiser::new(Arc::new(IdentityDenoiser::new(4)), 1.5).unwrap();
        assert_eq!(d.apply(&[0.0; 4]).unwrap(), vec![0.0; 4]);
        let v = [1.0, -2.0, 0.5, 4.0];
        let r = d.residual_vjp(&[0.0; 4], &v).unwrap();
        assert_eq!(r, v.iter().map(|x| -0.5 * x).collect::<Vec<_>>());
        assert_eq!(d.nominal_lipschitz(), Some(1.5));
        assert!(ScaledDenoiser::<f64>::new(Arc::new(IdentityDenoiser::new(4)), 0.0).is_err());
    }
}
