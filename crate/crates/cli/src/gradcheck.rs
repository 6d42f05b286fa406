use anyhow::Result;
use mred_core::denoise::FD_STEP;
use mred_core::imaging::RngState;
use mred_core::red::RedProblem;
use mred_core::vector::{add_scaled, dot, norm};

pub const GRAD_CHECK_PROBES: usize = 20;
pub const GRAD_CHECK_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub enum GradCheck {
    /// Largest `|fd - <grad phi(x), d>| / (||grad phi(x)|| ||d||)` over all
    /// probes, where `fd` is the central difference of `phi` along `d`.
    Checked { max_rel_error: f64, probes: usize },
    /// The denoiser is flagged non-smooth (or has no VJP), so `phi` has no
    /// gradient everywhere and the comparison is meaningless.
    NotSmooth { label: String },
}

/// Compares `grad_phi` against central differences of `phi` at `probes`
/// seeded points in `[0, 1]^n`, each along a seeded Gaussian direction.
pub fn gradient_check(problem: &RedProblem<f64>, probes: usize, seed: u64) -> Result<GradCheck> {
    let d = problem.denoiser();
    let flags = d.flags();
    if !flags.smooth || !flags.has_vjp {
        return Ok(GradCheck::NotSmooth { label: d.label() });
    }
    let n = problem.dim();
    let mut rng = RngState::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let x: Vec<f64> = rng.uniform_vec(n);
        let dir: Vec<f64> = rng.gaussian_vec(n);
        let grad = problem.grad_phi(&x)?;
        let analytic = dot(&grad, &dir);
        let plus = problem.phi(&add_scaled(&x, FD_STEP, &dir))?;
        let minus = problem.phi(&add_scaled(&x, -FD_STEP, &dir))?;
        let fd = (plus - minus) / (2.0 * FD_STEP);
        let scale = (norm(&grad) * norm(&dir)).max(f64::MIN_POSITIVE);
        worst = worst.max((fd - analytic).abs() / scale);
    }
    Ok(GradCheck::Checked { max_rel_error: worst, probes })
}
