//! The RED operator `G(x) = grad g(x) + tau (x - D(x))`, the fixed-point
//! loss `phi(x) = 0.5 ||G(x)||^2` and its gradient.

use std::sync::Arc;

use crate::denoise::Denoiser;
use crate::error::{check_len, invalid, Error, Result};
use crate::forward::LeastSquaresFidelity;
use crate::vector::{dot, norm_sq, sub};
use crate::Scalar;

/// Evaluation costs accumulated over one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounters {
    pub denoiser_applies: u64,
    pub vjp_evals: u64,
    pub operator_forwards: u64,
    pub operator_adjoints: u64,
    pub grad_phi_evals: u64,
}

/// Least-squares fidelity, denoiser and regularization weight `tau`.
#[derive(Debug, Clone)]
pub struct RedProblem<T: Scalar> {
    fidelity: LeastSquaresFidelity<T>,
    denoiser: Arc<dyn Denoiser<T>>,
    tau: T,
}

impl<T: Scalar> RedProblem<T> {
    pub fn new(fidelity: LeastSquaresFidelity<T>, denoiser: Arc<dyn Denoiser<T>>, tau: T) -> Result<Self> {
        check_len("denoiser dimension", fidelity.dim(), denoiser.dim())?;
        if !(tau > T::zero()) {
            return invalid(format!("tau must be positive, got {tau}"));
        }
        Ok(Self { fidelity, denoiser, tau })
    }

    pub fn fidelity(&self) -> &LeastSquaresFidelity<T> {
        &self.fidelity
    }

    pub fn denoiser(&self) -> &Arc<dyn Denoiser<T>> {
        &self.denoiser
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn dim(&self) -> usize {
        self.fidelity.dim()
    }

    /// `G(x)`. Costs one denoiser application, one forward and one adjoint.
    pub fn eval_g(&self, x: &[T], counters: &mut EvalCounters) -> Result<Vec<T>> {
        check_len("RED operator input", self.dim(), x.len())?;
        let grad = self.fidelity.gradient(x)?;
        let dx = self.denoiser.apply(x)?;
        counters.denoiser_applies += 1;
        counters.operator_forwards += 1;
        counters.operator_adjoints += 1;
        Ok(grad
            .iter()
            .zip(x.iter().zip(&dx))
            .map(|(&gi, (&xi, &di))| gi + self.tau * (xi - di))
            .collect())
    }

    pub fn eval_phi(&self, x: &[T], counters: &mut EvalCounters) -> Result<T> {
        Ok(phi_of(&self.eval_g(x, counters)?))
    }

    /// `grad phi(x) = H_g G(x) + tau (I - J_D(x))^T G(x)` given `gx = G(x)`.
    ///
    /// Costs one Hessian-vector product (forward + adjoint) and one VJP.
    pub fn eval_grad_phi_at(&self, x: &[T], gx: &[T], counters: &mut EvalCounters) -> Result<Vec<T>> {
        check_len("grad phi point", self.dim(), x.len())?;
        check_len("grad phi residual", self.dim(), gx.len())?;
        if !self.denoiser.flags().has_vjp {
            return Err(Error::Unsupported(format!(
                "denoiser {} lacks a vector-Jacobian product; wrap it first",
                self.denoiser.label()
            )));
        }
        let hg = self.fidelity.hessian_vp(gx)?;
        let rg = self.denoiser.residual_vjp(x, gx)?;
        counters.operator_forwards += 1;
        counters.operator_adjoints += 1;
        counters.vjp_evals += 1;
        counters.grad_phi_evals += 1;
        Ok(hg.iter().zip(&rg).map(|(&h, &r)| h + self.tau * r).collect())
    }

    /// Returns `(G(x), grad phi(x))`.
    pub fn eval_grad_phi(&self, x: &[T], counters: &mut EvalCounters) -> Result<(Vec<T>, Vec<T>)> {
        let gx = self.eval_g(x, counters)?;
        let grad = self.eval_grad_phi_at(x, &gx, counters)?;
        Ok((gx, grad))
    }

    pub fn g(&self, x: &[T]) -> Result<Vec<T>> {
        self.eval_g(x, &mut EvalCounters::default())
    }

    pub fn phi(&self, x: &[T]) -> Result<T> {
        self.eval_phi(x, &mut EvalCounters::default())
    }

    pub fn grad_phi(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.eval_grad_phi(x, &mut EvalCounters::default())?.1)
    }

    /// Diagnostic `h(x) = (tau/2) <x, x - D(x)>`.
    ///
    /// `G` is only the gradient of `g + h` for denoisers with a symmetric,
    /// locally homogeneous Jacobian; the value is reported for any denoiser.
    pub fn red_regularizer_value(&self, x: &[T]) -> Result<T> {
        check_len("regularizer input", self.dim(), x.len())?;
        let r = sub(x, &self.denoiser.apply(x)?);
        Ok(T::of(0.5) * self.tau * dot(x, &r))
    }

    /// `||G(x)||^2 / ||G(x0)||^2`.
    pub fn normalized_residual(&self, x0: &[T], x: &[T]) -> Result<T> {
        normalized_residual(&self.g(x0)?, &self.g(x)?)
    }
}

/// `0.5 ||g||^2`
pub fn phi_of<T: Scalar>(g: &[T]) -> T {
    T::of(0.5) * norm_sq(g)
}

/// `||g||^2 / ||g0||^2`; undefined when `g0 == 0` (the start is already a zero of `G`).
pub fn normalized_residual<T: Scalar>(g0: &[T], g: &[T]) -> Result<T> {
    let d = norm_sq(g0);
    if d == T::zero() {
        return Err(Error::Undefined("G(x0) = 0: normalized residual undefined".into()));
    }
    Ok(norm_sq(g) / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::{IdentityDenoiser, ScaledDenoiser};
    use crate::forward::DenseOperator;
    use crate::vector::norm;

    fn identity_problem(n: usize, y: Vec<f64>, tau: f64, d: Arc<dyn Denoiser<f64>>) -> RedProblem<f64> {
        let f = LeastSquaresFidelity::new(Arc::new(DenseOperator::identity(n)), y).unwrap();
        RedProblem::new(f, d, tau).unwrap()
    }

    #[test]
    fn identity_denoiser_reduces_to_fidelity_gradient() {
        let p = identity_problem(3, vec![1.0, 0.0, -1.0], 0.3, Arc::new(IdentityDenoiser::new(3)));
        let x = [0.5, 2.0, 1.0];
        assert_eq!(p.g(&x).unwrap(), p.fidelity().gradient(&x).unwrap());
        assert_eq!(p.red_regularizer_value(&x).unwrap(), 0.0);
    }

    // D(x) = 0, so G(x) = (1 + tau) x when A = I and y = 0.
    #[derive(Debug)]
    struct Zero(usize);

    impl Denoiser<f64> for Zero {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, _x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![0.0; self.0])
        }
        fn residual_vjp(&self, _x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
            Ok(v.to_vec())
        }
        fn flags(&self) -> crate::denoise::DenoiserFlags {
            crate::denoise::DenoiserFlags { symmetric_jacobian: true, smooth: true, has_vjp: true }
        }
        fn label(&self) -> String {
            "zero".into()
        }
    }

    #[test]
    fn grad_phi_closed_form_for_scaled_identity_problem() {
        let tau = 0.25;
        let p = identity_problem(4, vec![0.0; 4], tau, Arc::new(Zero(4)));
        let x = [1.0, -2.0, 3.0, 0.5];
        let grad = p.grad_phi(&x).unwrap();
        for (g, xi) in grad.iter().zip(&x) {
            assert_eq!(*g, (1.0 + tau) * (1.0 + tau) * xi);
        }
    }

    #[test]
    fn phi_is_half_squared_norm() {
        assert_eq!(phi_of(&[2.0, 0.0]), 2.0);
        assert_eq!(phi_of(&[0.0f64; 3]), 0.0);
    }

    #[test]
    fn counters_track_documented_costs() {
        let p = identity_problem(2, vec![0.0; 2], 1.0, Arc::new(IdentityDenoiser::new(2)));
        let mut c = EvalCounters::default();
        let gx = p.eval_g(&[1.0, 1.0], &mut c).unwrap();
        assert_eq!(
            c,
            EvalCounters { denoiser_applies: 1, vjp_evals: 0, operator_forwards: 1, operator_adjoints: 1, grad_phi_evals: 0 }
        );
        p.eval_grad_phi_at(&[1.0, 1.0], &gx, &mut c).unwrap();
        assert_eq!(
            c,
            EvalCounters { denoiser_applies: 1, vjp_evals: 1, operator_forwards: 2, operator_adjoints: 2, grad_phi_evals: 1 }
        );
    }

    #[test]
    fn scaled_identity_regularizer_is_negative() {
        let d = Arc::new(ScaledDenoiser::new(Arc::new(IdentityDenoiser::new(3)), 2.0).unwrap());
        let p = identity_problem(3, vec![0.0; 3], 0.5, d);
        let x = [1.0, 2.0, 2.0];
        assert!((p.red_regularizer_value(&x).unwrap() + 0.25 * 9.0).abs() < 1e-14);
    }

    #[test]
    fn normalized_residual_edges() {
        let p = identity_problem(2, vec![1.0, 1.0], 1.0, Arc::new(IdentityDenoiser::new(2)));
        let x0 = [0.0, 0.0];
        assert_eq!(p.normalized_residual(&x0, &x0).unwrap(), 1.0);
        assert_eq!(p.normalized_residual(&x0, &[1.0, 1.0]).unwrap(), 0.0);
        assert!(p.normalized_residual(&[1.0, 1.0], &x0).is_err());
        assert!(norm(&p.g(&[1.0, 1.0]).unwrap()) == 0.0);
    }

    #[test]
    fn rejects_bad_problems() {
        let f = LeastSquaresFidelity::new(Arc::new(DenseOperator::<f64>::identity(3)), vec![0.0; 3]).unwrap();
        assert!(RedProblem::new(f.clone(), Arc::new(IdentityDenoiser::new(4)), 1.0).is_err());
        assert!(RedProblem::new(f, Arc::new(IdentityDenoiser::new(3)), 0.0).is_err());
    }
}
