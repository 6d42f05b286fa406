use crate::error::{check_len, Error, Result};
use crate::imaging::RngState;
use crate::vector::{add, norm};
use crate::Scalar;

use super::LinearOperator;

/// Additive white Gaussian noise at an exact measurement-domain SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T> {
    /// `20 log10(||A x|| / ||e||)`; `+inf` means noiseless.
    pub input_snr_db: T,
    pub seed: u64,
}

impl<T: Scalar> NoiseSpec<T> {
    pub fn noiseless() -> Self {
        Self { input_snr_db: T::infinity(), seed: 0 }
    }
}

/// Returns `(y, e)` with `y = A x_true + e`.
///
/// The noise is a seeded standard normal vector rescaled so the realized
/// input SNR equals `spec.input_snr_db`.
pub fn add_noise_at_snr<T: Scalar>(
    op: &dyn LinearOperator<T>,
    x_true: &[T],
    spec: &NoiseSpec<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    check_len("clean signal", op.domain_dim(), x_true.len())?;
    let clean = op.forward(x_true)?;
    let signal = norm(&clean);
    if !(signal > T::zero()) {
        return Err(Error::Undefined("clean measurement A x is zero; SNR undefined".into()));
    }
    if spec.input_snr_db == T::infinity() {
        return Ok((clean, vec![T::zero(); op.range_dim()]));
    }
    let w: Vec<T> = RngState::new(spec.seed).gaussian_vec(op.range_dim());
    let target = signal / T::of(10.0).powf(spec.input_snr_db / T::of(20.0));
    let sigma = target / norm(&w);
    let e: Vec<T> = w.iter().map(|&v| sigma * v).collect();
    Ok((add(&clean, &e), e))
}

/// `20 log10(||clean|| / ||noise||)`
pub fn realized_snr_db<T: Scalar>(clean: &[T], noise: &[T]) -> T {
    T::of(20.0) * (norm(clean) / norm(noise)).log10()
}
