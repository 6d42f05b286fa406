use super::{convolve_periodic_raw, ImageGrid, Kernel2D, RngState, Shape};
use crate::error::{invalid, Result};
use crate::Scalar;

pub const TEST_IMAGE_NAMES: [&str; 6] = ["phantom", "ramp", "sinusoid", "checkerboard", "texture", "blocks"];

/// A named synthetic test image.
#[derive(Debug, Clone, PartialEq)]
pub struct TestImage<T> {
    pub name: &'static str,
    pub image: ImageGrid<T>,
}

// Modified Shepp-Logan ellipses: intensity, semi-axes (a, b), center (x, y), rotation in degrees.
const SHEPP_LOGAN: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

fn phantom(shape: Shape) -> Vec<f64> {
    let (h, w) = (shape.height as f64, shape.width as f64);
    let mut out = Vec::with_capacity(shape.len());
    for i in 0..shape.height {
        for j in 0..shape.width {
            let x = (2 * j + 1) as f64 / w - 1.0;
            let y = 1.0 - (2 * i + 1) as f64 / h;
            let mut v = 0.0;
            for &[amp, a, b, x0, y0, deg] in &SHEPP_LOGAN {
                let (s, c) = deg.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let u = dx * c + dy * s;
                let t = -dx * s + dy * c;
                if (u / a).powi(2) + (t / b).powi(2) <= 1.0 {
                    v += amp;
                }
            }
            out.push(v.clamp(0.0, 1.0));
        }
    }
    out
}

fn texture(shape: Shape, rng: &mut RngState) -> Result<Vec<f64>> {
    let noise: Vec<f64> = rng.uniform_vec(shape.len());
    let k = Kernel2D::gaussian(2 * 4 + 1, 2.0)?;
    let smooth = convolve_periodic_raw(shape, &noise, &k)?;
    let lo = smooth.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = smooth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(smooth.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

fn blocks(shape: Shape, rng: &mut RngState) -> Vec<f64> {
    const GRID: usize = 4;
    let levels: Vec<f64> = (0..GRID * GRID).map(|_| (rng.uniform() * 8.0).floor() / 7.0).collect();
    let mut out = Vec::with_capacity(shape.len());
    for i in 0..shape.height {
        for j in 0..shape.width {
            let bi = i * GRID / shape.height;
            let bj = j * GRID / shape.width;
            out.push(levels[bi * GRID + bj].min(1.0));
        }
    }
    out
}

/// The six deterministic synthetic test images, all valued in `[0, 1]`:
/// phantom, ramp, sinusoid, checkerboard, smoothed random texture and
/// piecewise-constant blocks.
pub fn make_test_images<T: Scalar>(rng: &mut RngState, shape: Shape) -> Result<Vec<TestImage<T>>> {
    if shape.height < 32 || shape.width < 32 {
        return invalid(format!("test images need at least 32x32, got {shape}"));
    }
    let (h, w) = (shape.height, shape.width);
    let ramp: Vec<f64> = (0..h)
        .flat_map(|i| std::iter::repeat_n(i as f64 / (h - 1) as f64, w))
        .collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    let sinusoid: Vec<f64> = (0..h)
        .flat_map(|i| {
            (0..w).map(move |j| {
                0.5 + 0.25 * (two_pi * 3.0 * j as f64 / w as f64).sin()
                    + 0.25 * (two_pi * 2.0 * i as f64 / h as f64).cos()
            })
        })
        .collect();
    let cell = (h.max(w) / 8).max(1);
    let checker: Vec<f64> = (0..h)
        .flat_map(|i| (0..w).map(move |j| if (i / cell + j / cell) % 2 == 0 { 0.2 } else { 0.8 }))
        .collect();
    let texture = texture(shape, rng)?;
    let blocks = blocks(shape, rng);

    [phantom(shape), ramp, sinusoid, checker, texture, blocks]
        .into_iter()
        .zip(TEST_IMAGE_NAMES)
        .map(|(values, name)| {
            let image = ImageGrid::new(shape, values.into_iter().map(T::of).collect())?;
            Ok(TestImage { name, image })
        })
        .collect()
}
