use crate::error::{invalid, Result};
use crate::imaging::RngState;
use crate::vector::{dot, norm, sub};
use crate::Scalar;

use super::Denoiser;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzMethod {
    /// Largest `sigma_max(J_D(x))` over seeded probe points, by power
    /// iteration on `J^T J` through JVP/VJP pairs.
    JacobianPowerIteration,
    /// Largest `||D(x) - D(z)|| / ||x - z||` over seeded pairs; a lower
    /// bound on the Lipschitz constant of any denoiser.
    PairwiseRatioSampling,
}

impl LipschitzMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::JacobianPowerIteration => "jacobian_power_iteration",
            Self::PairwiseRatioSampling => "pairwise_ratio_sampling",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate<T> {
    pub value: T,
    pub method: LipschitzMethod,
    pub probes: usize,
    pub converged: bool,
}

const POWER_TOL: f64 = 1e-12;
const PAIR_RADIUS: f64 = 1e-3;

/// Empirical Lipschitz constant of `d`.
///
/// Probe points are drawn uniformly from `[0, 1]^n`. Pairwise sampling
/// perturbs each probe by a random direction of length `1e-3`.
pub fn estimate_lipschitz<T: Scalar>(
    d: &dyn Denoiser<T>,
    method: LipschitzMethod,
    probes: usize,
    iters: usize,
    rng: &mut RngState,
) -> Result<LipschitzEstimate<T>> {
    if probes == 0 {
        return invalid("Lipschitz estimation needs at least one probe");
    }
    let n = d.dim();
    let mut best = T::zero();
    let mut converged = true;
    for _ in 0..probes {
        let x: Vec<T> = rng.uniform_vec(n);
        match method {
            LipschitzMethod::JacobianPowerIteration => {
                let (sigma, ok) = jacobian_norm(d, &x, iters.max(1), rng)?;
                best = best.max(sigma);
                converged &= ok;
            }
            LipschitzMethod::PairwiseRatioSampling => {
                let mut dir: Vec<T> = rng.gaussian_vec(n);
                let s = T::of(PAIR_RADIUS) / norm(&dir);
                dir.iter_mut().for_each(|v| *v = *v * s);
                let z: Vec<T> = x.iter().zip(&dir).map(|(&a, &b)| a + b).collect();
                let num = norm(&sub(&d.apply(&x)?, &d.apply(&z)?));
                best = best.max(num / norm(&sub(&x, &z)));
            }
        }
    }
    Ok(LipschitzEstimate { value: best, method, probes, converged })
}

/// `sigma_max(J_D(x))` via power iteration on `v -> J^T J v`, where
/// `J v = v - (I - J) v` comes from the residual products.
fn jacobian_norm<T: Scalar>(d: &dyn Denoiser<T>, x: &[T], iters: usize, rng: &mut RngState) -> Result<(T, bool)> {
    let mut v: Vec<T> = rng.gaussian_vec(x.len());
    let nv = norm(&v);
    v.iter_mut().for_each(|a| *a = *a / nv);
    let mut prev: Option<T> = None;
    for _ in 0..iters {
        let jv = sub(&v, &d.residual_jvp(x, &v)?);
        let jtjv = sub(&jv, &d.residual_vjp(x, &jv)?);
        let lambda = dot(&v, &jtjv);
        let nw = norm(&jtjv);
        if nw == T::zero() {
            return Ok((T::zero(), true));
        }
        if let Some(p) = prev {
            if (lambda - p).abs() <= T::of(POWER_TOL) * lambda.abs() {
                return Ok((lambda.max(T::zero()).sqrt(), true));
            }
        }
        prev = Some(lambda);
        v = jtjv.into_iter().map(|a| a / nw).collect();
    }
    Ok((prev.unwrap_or_else(T::zero).max(T::zero()).sqrt(), false))
}
