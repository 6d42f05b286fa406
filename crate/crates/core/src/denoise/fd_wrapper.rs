use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::vector::{dot, norm};
use crate::Scalar;

use super::{residual, Denoiser, DenoiserFlags};

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Largest dimension for which the dense Jacobian fallback is allowed.
pub const DENSE_FALLBACK_CAP: usize = 4096;

/// Supplies residual Jacobian products for a denoiser that only offers
/// `apply`, using central differences of `R(x) = x - D(x)`.
///
/// For a symmetric Jacobian the VJP equals the JVP, so one directional
/// difference suffices. Otherwise `J_R` is assembled column by column
/// (`2n` applications), which is only permitted up to
/// [`DENSE_FALLBACK_CAP`].
#[derive(Debug, Clone)]
pub struct FdJacobianWrapper<T: Scalar> {
    base: Arc<dyn Denoiser<T>>,
    step: T,
}

impl<T: Scalar> FdJacobianWrapper<T> {
    pub fn new(base: Arc<dyn Denoiser<T>>, step: T) -> Result<Self> {
        if !(step > T::zero()) {
            return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
        }
        if !base.flags().symmetric_jacobian && base.dim() > DENSE_FALLBACK_CAP {
            return Err(Error::Unsupported(format!(
                "non-symmetric denoiser of dimension {} exceeds the dense fallback cap {DENSE_FALLBACK_CAP}",
                base.dim()
            )));
        }
        Ok(Self { base, step })
    }

    /// `J_R(x) v` by one central difference along `v / ||v||`.
    fn directional(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        let nv = norm(v);
        if nv == T::zero() {
            return Ok(vec![T::zero(); v.len()]);
        }
        let h = self.step;
        let xp: Vec<T> = x.iter().zip(v).map(|(&a, &b)| a + h * b / nv).collect();
        let xm: Vec<T> = x.iter().zip(v).map(|(&a, &b)| a - h * b / nv).collect();
        let rp = residual(self.base.as_ref(), &xp)?;
        let rm = residual(self.base.as_ref(), &xm)?;
        let s = nv / (T::of(2.0) * h);
        Ok(rp.iter().zip(rm).map(|(&p, m)| (p - m) * s).collect())
    }

    /// `J_R(x)^T v` with `(J_R^T v)_j = <J_R e_j, v>`.
    fn dense_transpose(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        let n = x.len();
        let mut e = vec![T::zero(); n];
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            e[j] = T::one();
            out.push(dot(&self.directional(x, &e)?, v));
            e[j] = T::zero();
        }
        Ok(out)
    }
}

impl<T: Scalar> Denoiser<T> for FdJacobianWrapper<T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.base.apply(x)
    }

    fn residual_vjp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_len("fd wrapper point", self.dim(), x.len())?;
        check_len("fd wrapper vector", self.dim(), v.len())?;
        if self.base.flags().symmetric_jacobian {
            self.directional(x, v)
        } else {
            self.dense_transpose(x, v)
        }
    }

    fn residual_jvp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_len("fd wrapper point", self.dim(), x.len())?;
        check_len("fd wrapper vector", self.dim(), v.len())?;
        self.directional(x, v)
    }

    fn flags(&self) -> DenoiserFlags {
        DenoiserFlags { has_vjp: true, ..self.base.flags() }
    }

    fn nominal_lipschitz(&self) -> Option<T> {
        self.base.nominal_lipschitz()
    }

    fn label(&self) -> String {
        format!("fd({})", self.base.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::{ConvNetConfig, LinearSmoother, RandomConvNet};
    use crate::imaging::{RngState, Shape};

    fn rel(a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm(&d) / norm(b)
    }

    #[test]
    fn symmetric_path_matches_smoother() {
        let shape = Shape::new(16, 16);
        let base = Arc::new(LinearSmoother::new(shape, 1.0).unwrap());
        let fd = FdJacobianWrapper::new(base.clone(), FD_STEP).unwrap();
        let mut rng = RngState::new(2);
        let x: Vec<f64> = rng.uniform_vec(256);
        let v: Vec<f64> = rng.gaussian_vec(256);
        let exact = base.residual_vjp(&x, &v).unwrap();
        assert!(rel(&fd.residual_vjp(&x, &v).unwrap(), &exact) < 1e-6);
        assert_eq!(fd.residual_vjp(&x, &[0.0; 256]).unwrap(), vec![0.0; 256]);
    }

    #[test]
    fn dense_fallback_matches_convnet() {
        let shape = Shape::new(8, 8);
        let cfg = ConvNetConfig { layers: 2, channels: 4, weight_scale: 1.0, seed: 3 };
        let base = Arc::new(RandomConvNet::new(shape, cfg).unwrap());
        let fd = FdJacobianWrapper::new(base.clone(), FD_STEP).unwrap();
        let mut rng = RngState::new(4);
        let x: Vec<f64> = rng.uniform_vec(64);
        let v: Vec<f64> = rng.gaussian_vec(64);
        let exact = base.residual_vjp(&x, &v).unwrap();
        assert!(rel(&fd.residual_vjp(&x, &v).unwrap(), &exact) < 1e-4);
    }

    #[test]
    fn large_nonsymmetric_rejected() {
        let shape = Shape::new(65, 64);
        let cfg = ConvNetConfig { layers: 2, channels: 1, weight_scale: 1.0, seed: 3 };
        let base = Arc::new(RandomConvNet::<f64>::new(shape, cfg).unwrap());
        assert!(matches!(FdJacobianWrapper::new(base, FD_STEP), Err(Error::Unsupported(_))));
    }
}
