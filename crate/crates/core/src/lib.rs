//! Regularization by denoising (RED) for linear inverse problems.
//!
//! The crate provides measurement operators ([`forward`]), denoisers with
//! residual vector-Jacobian products ([`denoise`]), the RED operator
//! `G(x) = grad g(x) + tau (x - D(x))` together with the fixed-point loss
//! `phi(x) = 0.5 ||G(x)||^2` ([`red`]), and three solvers ([`solvers`]):
//! fixed-step RED, RED with backtracking line search and monotone RED.
//!
//! Everything numerical is generic over [`Scalar`] (`f32`/`f64`); the
//! `*64` aliases below are the double-precision instances used by the
//! experiment driver.

pub mod denoise;
mod error;
pub mod forward;
pub mod imaging;
pub mod red;
mod scalar;
pub mod solvers;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ImageGrid64 = imaging::ImageGrid<f64>;
pub type Kernel2D64 = imaging::Kernel2D<f64>;
pub type DeblurOperator64 = forward::DeblurOperator<f64>;
pub type CompressiveSensingOperator64 = forward::CompressiveSensingOperator<f64>;
pub type LeastSquaresFidelity64 = forward::LeastSquaresFidelity<f64>;
pub type RedProblem64 = red::RedProblem<f64>;
pub type SolverConfig64 = solvers::SolverConfig<f64>;
pub type SolveResult64 = solvers::SolveResult<f64>;

pub type ImageGrid32 = imaging::ImageGrid<f32>;
pub type RedProblem32 = red::RedProblem<f32>;
pub type SolverConfig32 = solvers::SolverConfig<f32>;
