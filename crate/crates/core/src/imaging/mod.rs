//! Image containers, sampling, periodic convolution, the orthonormal DCT,
//! PGM I/O, quality metrics and the synthetic test-image set.

mod conv;
mod dct;
mod grid;
mod kernel;
mod metrics;
pub mod pgm;
mod rng;
mod test_images;

pub use conv::{convolve2d_periodic, convolve_periodic_raw};
pub use dct::{dct2_orthonormal, idct2_orthonormal, Dct2Plan};
pub use grid::{ImageGrid, Shape};
pub use kernel::Kernel2D;
pub use metrics::psnr;
pub(crate) use metrics::psnr_slices as metrics_psnr;
pub use rng::{gaussian_samples, RngState, GENERATOR_FAMILY};
pub use test_images::{make_test_images, TestImage, TEST_IMAGE_NAMES};
