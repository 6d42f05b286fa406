use super::{ImageGrid, Kernel2D, Shape};
use crate::error::{check_len, invalid, Result};
use crate::Scalar;

/// Periodic 2D convolution with a centered kernel:
/// `out[p] = sum_q k[q] * img[(p - q) mod shape]`.
pub fn convolve2d_periodic<T: Scalar>(img: &ImageGrid<T>, k: &Kernel2D<T>) -> Result<ImageGrid<T>> {
    let values = convolve_periodic_raw(img.shape(), img.values(), k)?;
    Ok(ImageGrid::from_raw(img.shape(), values))
}

/// Slice form of [`convolve2d_periodic`]; values may be non-finite.
pub fn convolve_periodic_raw<T: Scalar>(shape: Shape, values: &[T], k: &Kernel2D<T>) -> Result<Vec<T>> {
    check_len("convolution input", shape.len(), values.len())?;
    let (h, w) = (shape.height, shape.width);
    if k.size() > h.min(w) {
        return invalid(format!("kernel of size {} exceeds image {shape}", k.size()));
    }
    let c = k.radius() as isize;
    let mut out = vec![T::zero(); h * w];
    // Row and column offsets are precomputed modulo the image size.
    let rows: Vec<Vec<usize>> = (0..h as isize)
        .map(|i| (-c..=c).map(|a| (i - a).rem_euclid(h as isize) as usize).collect())
        .collect();
    let cols: Vec<Vec<usize>> = (0..w as isize)
        .map(|j| (-c..=c).map(|b| (j - b).rem_euclid(w as isize) as usize).collect())
        .collect();
    let kw = k.weights();
    let ks = k.size();
    for i in 0..h {
        let out_row = &mut out[i * w..(i + 1) * w];
        for (ai, &src_i) in rows[i].iter().enumerate() {
            let src = &values[src_i * w..(src_i + 1) * w];
            let krow = &kw[ai * ks..(ai + 1) * ks];
            for (j, o) in out_row.iter_mut().enumerate() {
                let mut acc = *o;
                for (&wt, &src_j) in krow.iter().zip(&cols[j]) {
                    acc = acc + wt * src[src_j];
                }
                *o = acc;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RngState;
    use crate::vector::dot;

    // Independent oracle: literal double loop over output pixels and kernel taps.
    fn direct(img: &ImageGrid<f64>, k: &Kernel2D<f64>) -> Vec<f64> {
        let (h, w) = (img.height() as isize, img.width() as isize);
        let c = k.radius() as isize;
        let mut out = vec![0.0; (h * w) as usize];
        for i in 0..h {
            for j in 0..w {
                let mut s = 0.0;
                for a in -c..=c {
                    for b in -c..=c {
                        let si = (i - a).rem_euclid(h) as usize;
                        let sj = (j - b).rem_euclid(w) as usize;
                        s += k.at(a, b) * img.get(si, sj);
                    }
                }
                out[(i * w + j) as usize] = s;
            }
        }
        out
    }

    fn random_image(shape: Shape, seed: u64) -> ImageGrid<f64> {
        ImageGrid::new(shape, RngState::new(seed).gaussian_vec(shape.len())).unwrap()
    }

    #[test]
    fn constant_image_is_preserved() {
        let img = ImageGrid::<f64>::filled(Shape::new(9, 11), 0.37);
        let k = Kernel2D::gaussian(5, 1.2).unwrap();
        let out = convolve2d_periodic(&img, &k).unwrap();
        for &v in out.values() {
            assert!((v - 0.37).abs() < 1e-15);
        }
    }

    #[test]
    fn impulse_response_stamps_kernel() {
        let shape = Shape::new(7, 7);
        let img = ImageGrid::from_fn(shape, |i, j| if i == 3 && j == 3 { 1.0 } else { 0.0 });
        let k = Kernel2D::new(3, (1..=9).map(f64::from).collect()).unwrap();
        let out = convolve2d_periodic(&img, &k).unwrap();
        for a in -1isize..=1 {
            for b in -1isize..=1 {
                let v = out.get((3 + a) as usize, (3 + b) as usize);
                assert_eq!(v, k.at(a, b));
            }
        }
        let total: f64 = out.values().iter().sum();
        assert_eq!(total, 45.0);
    }

    #[test]
    fn ramp_with_uniform_kernel_matches_direct_sum() {
        let shape = Shape::new(4, 4);
        let img = ImageGrid::from_fn(shape, |i, j| (i * 4 + j) as f64);
        let k = Kernel2D::uniform(3).unwrap();
        let out = convolve2d_periodic(&img, &k).unwrap();
        let oracle = direct(&img, &k);
        for (a, b) in out.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        // Pixel (0,0) averages 4i + j over rows {3,0,1} and cols {3,0,1}: 4 * 4/3 + 4/3.
        assert!((out.get(0, 0) - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_kernel_matches_direct_sum() {
        let shape = Shape::new(10, 13);
        let img = random_image(shape, 3);
        let k = Kernel2D::new(5, RngState::new(4).gaussian_vec(25)).unwrap();
        let out = convolve2d_periodic(&img, &k).unwrap();
        let oracle = direct(&img, &k);
        for (a, b) in out.values().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_kernel_rejected() {
        let img = ImageGrid::<f64>::zeros(Shape::new(4, 8));
        let k = Kernel2D::uniform(5).unwrap();
        assert!(convolve2d_periodic(&img, &k).is_err());
    }

    #[test]
    fn linear_and_adjoint_to_flipped_kernel() {
        let shape = Shape::new(12, 9);
        let k = Kernel2D::new(5, RngState::new(11).gaussian_vec(25)).unwrap();
        for seed in 0..10 {
            let x = random_image(shape, 100 + seed);
            let z = random_image(shape, 200 + seed);
            let (a, b) = (1.7, -0.3);
            let comb = ImageGrid::new(
                shape,
                x.values().iter().zip(z.values()).map(|(p, q)| a * p + b * q).collect(),
            )
            .unwrap();
            let lhs = convolve2d_periodic(&comb, &k).unwrap();
            let cx = convolve2d_periodic(&x, &k).unwrap();
            let cz = convolve2d_periodic(&z, &k).unwrap();
            for ((l, p), q) in lhs.values().iter().zip(cx.values()).zip(cz.values()) {
                assert!((l - (a * p + b * q)).abs() < 1e-12);
            }
            let adj = convolve2d_periodic(&z, &k.flipped()).unwrap();
            let lhs = dot(cx.values(), z.values());
            let rhs = dot(x.values(), adj.values());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
