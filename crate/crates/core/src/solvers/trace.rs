use std::fmt;

use crate::imaging::metrics_psnr;
use crate::red::EvalCounters;
use crate::vector::norm_sq;
use crate::Scalar;

use super::{SolverConfig, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// The starting point, `k = 0`.
    Init,
    /// The RED trial step was accepted as is.
    RedStep,
    /// The trial was replaced by a gradient step on `phi`.
    GradientStep,
}

impl StepMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Init => "init",
            Self::RedStep => "red_step",
            Self::GradientStep => "gradient_step",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIters,
    StepFloor,
    Diverged,
    ConvergedTol,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MaxIters => "max_iters",
            Self::StepFloor => "step_floor",
            Self::Diverged => "diverged",
            Self::ConvergedTol => "converged_tol",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub k: usize,
    pub phi: T,
    pub g_norm: T,
    /// `||G(x^k)||^2 / ||G(x^0)||^2`, reported as 0 when `G(x^0) = 0`.
    pub normalized_residual: T,
    pub mode: StepMode,
    /// Line-search reductions spent on this iterate.
    pub backtracks: usize,
    /// Step size that produced the iterate (`gamma` or `alpha`); 0 at `k = 0`.
    pub step_used: T,
    pub psnr_db: Option<T>,
    pub counters: EvalCounters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub solver: SolverKind,
    pub x_star: Vec<T>,
    pub trace: Vec<IterationRecord<T>>,
    pub termination: Termination,
    pub config: SolverConfig<T>,
}

impl<T: Scalar> SolveResult<T> {
    pub fn final_record(&self) -> &IterationRecord<T> {
        self.trace.last().expect("trace holds at least the initial record")
    }

    pub fn final_normalized_residual(&self) -> T {
        self.final_record().normalized_residual
    }

    pub fn count_mode(&self, mode: StepMode) -> usize {
        self.trace.iter().filter(|r| r.mode == mode).count()
    }
}

/// Builds trace records relative to the initial residual.
pub(crate) struct Recorder<'a, T> {
    g0_sq: T,
    reference: Option<&'a [T]>,
    pub trace: Vec<IterationRecord<T>>,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    pub fn new(g0: &[T], reference: Option<&'a [T]>) -> Self {
        Self { g0_sq: norm_sq(g0), reference, trace: Vec::new() }
    }

    pub fn normalized(&self, g: &[T]) -> T {
        if self.g0_sq == T::zero() {
            T::zero()
        } else {
            norm_sq(g) / self.g0_sq
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        k: usize,
        x: &[T],
        g: &[T],
        mode: StepMode,
        backtracks: usize,
        step_used: T,
        counters: EvalCounters,
    ) -> T {
        let g_sq = norm_sq(g);
        let nr = self.normalized(g);
        let psnr_db = self.reference.and_then(|r| metrics_psnr(r, x, T::one()).ok());
        self.trace.push(IterationRecord {
            k,
            phi: T::of(0.5) * g_sq,
            g_norm: g_sq.sqrt(),
            normalized_residual: nr,
            mode,
            backtracks,
            step_used,
            psnr_db,
            counters,
        });
        nr
    }

    /// Post-acceptance stopping rules shared by every solver.
    pub fn check_stop(&self, nr: T, cfg: &SolverConfig<T>) -> Option<Termination> {
        if !nr.is_finite() || nr > cfg.divergence_cap {
            Some(Termination::Diverged)
        } else if cfg.residual_tol > T::zero() && nr <= cfg.residual_tol {
            Some(Termination::ConvergedTol)
        } else {
            None
        }
    }
}
