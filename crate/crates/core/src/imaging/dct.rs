use super::{ImageGrid, Shape};
use crate::error::{check_len, Result};
use crate::Scalar;

/// Precomputed orthonormal DCT-II basis matrices for one image shape.
///
/// The 2D transform is separable: rows then columns, each a dense
/// matrix-vector product against the 1D basis.
#[derive(Debug, Clone)]
pub struct Dct2Plan<T> {
    shape: Shape,
    rows: Vec<T>,
    cols: Vec<T>,
}

fn basis<T: Scalar>(n: usize) -> Vec<T> {
    let mut m = Vec::with_capacity(n * n);
    let nf = n as f64;
    for k in 0..n {
        let s = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        for i in 0..n {
            let ang = std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf);
            m.push(T::of(s * ang.cos()));
        }
    }
    m
}

impl<T: Scalar> Dct2Plan<T> {
    pub fn new(shape: Shape) -> Self {
        Self { shape, rows: basis(shape.height), cols: basis(shape.width) }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn forward(&self, values: &[T]) -> Result<Vec<T>> {
        self.apply(values, false)
    }

    pub fn inverse(&self, coeffs: &[T]) -> Result<Vec<T>> {
        self.apply(coeffs, true)
    }

    fn apply(&self, values: &[T], inverse: bool) -> Result<Vec<T>> {
        check_len("dct input", self.shape.len(), values.len())?;
        let (h, w) = (self.shape.height, self.shape.width);
        // Entry (k, n) of the basis for a length-`len` axis, transposed for the inverse.
        let entry = |m: &[T], len: usize, k: usize, n: usize| {
            if inverse {
                m[n * len + k]
            } else {
                m[k * len + n]
            }
        };
        let mut tmp = vec![T::zero(); h * w];
        for i in 0..h {
            let src = &values[i * w..(i + 1) * w];
            for k in 0..w {
                let mut acc = T::zero();
                for (n, &x) in src.iter().enumerate() {
                    acc = acc + entry(&self.cols, w, k, n) * x;
                }
                tmp[i * w + k] = acc;
            }
        }
        let mut out = vec![T::zero(); h * w];
        for k in 0..h {
            for n in 0..h {
                let c = entry(&self.rows, h, k, n);
                let src = &tmp[n * w..(n + 1) * w];
                let dst = &mut out[k * w..(k + 1) * w];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = *d + c * s;
                }
            }
        }
        Ok(out)
    }
}

/// Orthonormal type-II 2D DCT.
pub fn dct2_orthonormal<T: Scalar>(img: &ImageGrid<T>) -> ImageGrid<T> {
    let plan = Dct2Plan::new(img.shape());
    let out = plan.forward(img.values()).expect("plan matches image shape");
    ImageGrid::from_raw(img.shape(), out)
}

/// Inverse of [`dct2_orthonormal`] (type-III, orthonormal).
pub fn idct2_orthonormal<T: Scalar>(coeffs: &ImageGrid<T>) -> ImageGrid<T> {
    let plan = Dct2Plan::new(coeffs.shape());
    let out = plan.inverse(coeffs.values()).expect("plan matches image shape");
    ImageGrid::from_raw(coeffs.shape(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RngState;
    use crate::vector::{dot, norm};

    fn random(shape: Shape, seed: u64) -> ImageGrid<f64> {
        ImageGrid::new(shape, RngState::new(seed).gaussian_vec(shape.len())).unwrap()
    }

    #[test]
    fn constant_image_has_only_dc() {
        let shape = Shape::new(6, 10);
        let c = dct2_orthonormal(&ImageGrid::filled(shape, 1.0));
        assert!((c.values()[0] - 60f64.sqrt()).abs() < 1e-12);
        for &v in &c.values()[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_and_energy() {
        let x = random(Shape::new(12, 7), 9);
        let c = dct2_orthonormal(&x);
        assert!((norm(c.values()) - norm(x.values())).abs() < 1e-12);
        let back = idct2_orthonormal(&c);
        for (a, b) in back.values().iter().zip(x.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let z = random(Shape::new(12, 7), 10);
        let cz = dct2_orthonormal(&z);
        assert!((dot(c.values(), cz.values()) - dot(x.values(), z.values())).abs() < 1e-10);
    }

    #[test]
    fn matches_basis_projection_oracle() {
        // Coefficient (u, v) is the inner product with the separable cosine atom.
        let shape = Shape::new(8, 8);
        let x = random(shape, 21);
        let c = dct2_orthonormal(&x);
        let n = 8.0f64;
        let s = |k: usize| if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        for u in 0..8 {
            for v in 0..8 {
                let mut acc = 0.0;
                for i in 0..8 {
                    for j in 0..8 {
                        let a = (std::f64::consts::PI * (2 * i + 1) as f64 * u as f64 / 16.0).cos();
                        let b = (std::f64::consts::PI * (2 * j + 1) as f64 * v as f64 / 16.0).cos();
                        acc += s(u) * s(v) * a * b * x.get(i, j);
                    }
                }
                assert!((c.get(u, v) - acc).abs() < 1e-10);
            }
        }
    }
}
