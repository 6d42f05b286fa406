use crate::imaging::RngState;
use crate::vector::{dot, norm};
use crate::Scalar;

use super::LinearOperator;

pub const DEFAULT_POWER_ITERS: usize = 200;
pub const DEFAULT_POWER_TOL: f64 = 1e-9;

/// Power-iteration estimate of `lambda_max(A^T A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate<T> {
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    /// Rayleigh quotient after each iteration.
    pub history: Vec<T>,
}

/// Power iteration on `v -> A^T A v` from a seeded random unit vector.
///
/// Stops when the Rayleigh quotient changes by less than `tol` relative to
/// its magnitude, or after `iters` iterations (then `converged == false`).
pub fn spectral_norm_sq<T: Scalar>(
    op: &dyn LinearOperator<T>,
    iters: usize,
    tol: T,
    rng: &mut RngState,
) -> crate::Result<SpectralEstimate<T>> {
    if iters == 0 {
        return Err(crate::Error::InvalidArgument("power iteration needs iters >= 1".into()));
    }
    let n = op.domain_dim();
    let mut v: Vec<T> = rng.gaussian_vec(n);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x = *x / nv);
    let mut history = Vec::with_capacity(iters);
    let mut converged = false;
    for _ in 0..iters {
        let w = op.normal(&v)?;
        let lambda = dot(&v, &w);
        let prev = history.last().copied();
        history.push(lambda);
        let nw = norm(&w);
        if nw == T::zero() {
            converged = true;
            break;
        }
        if let Some(p) = prev {
            if (lambda - p).abs() <= tol * lambda.abs() {
                converged = true;
                break;
            }
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    Ok(SpectralEstimate {
        value: *history.last().expect("at least one iteration"),
        iterations: history.len(),
        converged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{build_cs_operator, DeblurOperator, DenseOperator};
    use crate::imaging::{Kernel2D, Shape};

    fn estimate(op: &dyn LinearOperator<f64>) -> SpectralEstimate<f64> {
        spectral_norm_sq(op, DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL, &mut RngState::new(0)).unwrap()
    }

    fn assert_monotone(est: &SpectralEstimate<f64>) {
        for w in est.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "Rayleigh quotient decreased: {w:?}");
        }
    }

    #[test]
    fn diagonal_operator() {
        let op = DenseOperator::diagonal(&[3.0, 2.0, 1.0]);
        let est = estimate(&op);
        assert!((est.value - 9.0).abs() < 1e-8, "{est:?}");
        assert!(est.converged);
        assert_monotone(&est);
    }

    #[test]
    fn cs_operator_has_unit_norm() {
        let op = build_cs_operator::<f64>(41, 410, 3).unwrap();
        let est = estimate(&op);
        assert!((est.value - 1.0).abs() < 1e-6);
        assert_monotone(&est);
    }

    #[test]
    fn deblur_norm_is_max_squared_kernel_dft() {
        let shape = Shape::new(32, 32);
        let k = Kernel2D::gaussian(9, 1.5).unwrap();
        let oracle = k.dft_magnitudes(32, 32).into_iter().fold(0.0f64, f64::max).powi(2);
        assert!((oracle - 1.0).abs() < 1e-12);
        let op = DeblurOperator::new(shape, k).unwrap();
        let est = estimate(&op);
        assert!((est.value - oracle).abs() < 1e-6, "{} vs {oracle}", est.value);
        assert_monotone(&est);
    }

    #[test]
    fn unconverged_flag_at_iteration_cap() {
        let op = DenseOperator::diagonal(&[1.0, 0.999, 0.5]);
        let est = spectral_norm_sq(&op, 3, 1e-15, &mut RngState::new(1)).unwrap();
        assert_eq!(est.iterations, 3);
        assert!(!est.converged);
        assert!(spectral_norm_sq(&op, 0, 1e-9, &mut RngState::new(1)).is_err());
    }
}
