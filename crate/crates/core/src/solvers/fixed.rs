use crate::error::{check_len, Result};
use crate::red::{EvalCounters, RedProblem};
use crate::vector::{add_scaled, all_finite};
use crate::Scalar;

use super::trace::Recorder;
use super::{SolveResult, SolverConfig, SolverKind, StepMode, Termination};

/// Fixed-step RED: `x^k = x^{k-1} - gamma G(x^{k-1})`.
///
/// Stops early on divergence (normalized residual above the cap, or a
/// non-finite iterate, in which case the last finite iterate is returned)
/// or when the residual tolerance is met.
pub fn red_sd_fixed<T: Scalar>(
    problem: &RedProblem<T>,
    x0: &[T],
    cfg: &SolverConfig<T>,
    reference: Option<&[T]>,
) -> Result<SolveResult<T>> {
    cfg.validate()?;
    check_len("initial point", problem.dim(), x0.len())?;
    let mut counters = EvalCounters::default();
    let mut x = x0.to_vec();
    let mut g = problem.eval_g(&x, &mut counters)?;
    let mut rec = Recorder::new(&g, reference);
    rec.push(0, &x, &g, StepMode::Init, 0, T::zero(), counters);

    let mut termination = Termination::MaxIters;
    if !all_finite(&g) {
        termination = Termination::Diverged;
    } else {
        for k in 1..=cfg.max_iters {
            let x_next = add_scaled(&x, -cfg.gamma, &g);
            let g_next = problem.eval_g(&x_next, &mut counters)?;
            if !all_finite(&x_next) || !all_finite(&g_next) {
                termination = Termination::Diverged;
                break;
            }
            x = x_next;
            g = g_next;
            let nr = rec.push(k, &x, &g, StepMode::RedStep, 0, cfg.gamma, counters);
            if let Some(t) = rec.check_stop(nr, cfg) {
                termination = t;
                break;
            }
        }
    }
    Ok(SolveResult { solver: SolverKind::Red, x_star: x, trace: rec.trace, termination, config: *cfg })
}
