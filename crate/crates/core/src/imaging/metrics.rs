use super::ImageGrid;
use crate::error::{check_len, invalid, Result};
use crate::Scalar;

/// Peak signal-to-noise ratio in dB; `+inf` when the images are identical.
pub fn psnr<T: Scalar>(reference: &ImageGrid<T>, test: &ImageGrid<T>, peak: T) -> Result<T> {
    if reference.shape() != test.shape() {
        return invalid(format!(
            "psnr shape mismatch: {} vs {}",
            reference.shape(),
            test.shape()
        ));
    }
    psnr_slices(reference.values(), test.values(), peak)
}

pub(crate) fn psnr_slices<T: Scalar>(reference: &[T], test: &[T], peak: T) -> Result<T> {
    check_len("psnr", reference.len(), test.len())?;
    if !(peak > T::zero()) {
        return invalid("psnr peak must be positive");
    }
    let mut sse = T::zero();
    for (&a, &b) in reference.iter().zip(test) {
        sse = sse + (a - b) * (a - b);
    }
    let mse = sse / T::of_usize(reference.len());
    if mse == T::zero() {
        return Ok(T::infinity());
    }
    Ok(T::of(10.0) * (peak * peak / mse).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{RngState, Shape};

    #[test]
    fn identical_is_infinite() {
        let a = ImageGrid::filled(Shape::new(4, 4), 0.3);
        assert_eq!(psnr(&a, &a, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn constant_offset_gives_twenty_db() {
        let a = ImageGrid::<f64>::zeros(Shape::new(5, 3));
        let b = ImageGrid::filled(Shape::new(5, 3), 0.1);
        assert!((psnr(&a, &b, 1.0).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn random_pair_matches_per_pixel_formula() {
        let shape = Shape::new(7, 9);
        let mut rng = RngState::new(3);
        let a = ImageGrid::<f64>::new(shape, rng.uniform_vec(63)).unwrap();
        let b = ImageGrid::<f64>::new(shape, rng.uniform_vec(63)).unwrap();
        let mut mse = 0.0;
        for i in 0..7 {
            for j in 0..9 {
                mse += (a.get(i, j) - b.get(i, j)).powi(2) / 63.0;
            }
        }
        let expected = 10.0 * (4.0f64 / mse).log10();
        assert!((psnr(&a, &b, 2.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a = ImageGrid::<f64>::zeros(Shape::new(4, 4));
        let b = ImageGrid::<f64>::zeros(Shape::new(2, 8));
        assert!(psnr(&a, &b, 1.0).is_err());
    }
}
