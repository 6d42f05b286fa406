//! Linear measurement operators, the least-squares data fidelity, noise
//! injection at a prescribed input SNR and spectral-norm estimation.

mod cs;
mod deblur;
mod fidelity;
mod noise;
mod operator;
mod spectral;

pub use cs::{build_cs_operator, CompressiveSensingOperator};
pub use deblur::DeblurOperator;
pub use fidelity::LeastSquaresFidelity;
pub use noise::{add_noise_at_snr, realized_snr_db, NoiseSpec};
pub use operator::{adjoint_mismatch, DenseOperator, LinearOperator};
pub use spectral::{spectral_norm_sq, SpectralEstimate, DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL};
