#![allow(dead_code)]

use std::sync::Arc;

use mred_core::denoise::{Denoiser, IdentityDenoiser, LinearSmoother};
use mred_core::forward::{
    add_noise_at_snr, build_cs_operator, DeblurOperator, LeastSquaresFidelity, LinearOperator, NoiseSpec,
};
use mred_core::imaging::{Kernel2D, RngState, Shape};
use mred_core::red::RedProblem;

/// Column-major dense assembly of a linear map `f: R^n -> R^m` by applying
/// it to the unit vectors; returns row-major `m x n`.
pub fn assemble(n: usize, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> (usize, Vec<f64>) {
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(f(&e));
    }
    let m = cols[0].len();
    let mut out = vec![0.0; m * n];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..m {
            out[i * n + j] = c[i];
        }
    }
    (m, out)
}

pub fn matvec(m: usize, n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..m).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
}

pub fn transpose(m: usize, n: usize, a: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            t[j * m + i] = a[i * n + j];
        }
    }
    t
}

pub fn matmul(m: usize, k: usize, n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; m * n];
    for i in 0..m {
        for l in 0..k {
            let ail = a[i * k + l];
            for j in 0..n {
                c[i * n + j] += ail * b[l * n + j];
            }
        }
    }
    c
}

/// Gaussian elimination with partial pivoting.
pub fn solve(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs())).unwrap();
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        assert!(d.abs() > 1e-14, "singular system");
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|j| a[r * n + j] * x[j]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn random_image(shape: Shape, seed: u64) -> Vec<f64> {
    RngState::new(seed).uniform_vec(shape.len())
}

pub fn deblur_op(shape: Shape, ksize: usize, sigma: f64) -> Arc<dyn LinearOperator<f64>> {
    Arc::new(DeblurOperator::new(shape, Kernel2D::gaussian(ksize, sigma).unwrap()).unwrap())
}

pub fn cs_op(m: usize, n: usize, seed: u64) -> Arc<dyn LinearOperator<f64>> {
    Arc::new(build_cs_operator::<f64>(m, n, seed).unwrap())
}

pub fn smoother(shape: Shape, sigma: f64) -> Arc<dyn Denoiser<f64>> {
    Arc::new(LinearSmoother::new(shape, sigma).unwrap())
}

pub fn identity(n: usize) -> Arc<dyn Denoiser<f64>> {
    Arc::new(IdentityDenoiser::new(n))
}

/// Noisy measurements of a seeded random image at 30 dB.
pub fn problem(
    op: Arc<dyn LinearOperator<f64>>,
    denoiser: Arc<dyn Denoiser<f64>>,
    tau: f64,
    seed: u64,
) -> (RedProblem<f64>, Vec<f64>) {
    let n = op.domain_dim();
    let x_true: Vec<f64> = RngState::new(seed).uniform_vec(n);
    let (y, _) = add_noise_at_snr(op.as_ref(), &x_true, &NoiseSpec { input_snr_db: 30.0, seed: seed + 1 }).unwrap();
    let fid = LeastSquaresFidelity::new(op, y).unwrap();
    (RedProblem::new(fid, denoiser, tau).unwrap(), x_true)
}
