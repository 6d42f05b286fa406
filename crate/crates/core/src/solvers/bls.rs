use crate::error::{check_len, Result};
use crate::red::{EvalCounters, RedProblem};
use crate::vector::{add_scaled, all_finite, norm};
use crate::Scalar;

use super::trace::Recorder;
use super::{SolveResult, SolverConfig, SolverKind, StepMode, Termination};

/// RED with backtracking line search on `||G||`.
///
/// Each RED trial must not increase `||G||`; otherwise `gamma` is shrunk by
/// `beta` and the trial retried. The reduction persists across iterations.
/// When `gamma` drops below `epsilon` the previous iterate is returned with
/// [`Termination::StepFloor`].
pub fn red_bls<T: Scalar>(
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

    let mut gamma = cfg.gamma;
    let mut termination = Termination::MaxIters;
    if !all_finite(&g) {
        termination = Termination::Diverged;
    } else {
        'outer: for k in 1..=cfg.max_iters {
            let g_norm = norm(&g);
            let mut x_next = add_scaled(&x, -gamma, &g);
            let mut g_next = problem.eval_g(&x_next, &mut counters)?;
            let mut backtracks = 0;
            // Written as a negated `<=` so NaN norms count as failures.
            while !(norm(&g_next) <= g_norm) {
                gamma = gamma * cfg.beta;
                backtracks += 1;
                if gamma < cfg.epsilon {
                    termination = Termination::StepFloor;
                    break 'outer;
                }
                x_next = add_scaled(&x, -gamma, &g);
                g_next = problem.eval_g(&x_next, &mut counters)?;
            }
            x = x_next;
            g = g_next;
            let nr = rec.push(k, &x, &g, StepMode::RedStep, backtracks, gamma, counters);
            if let Some(t) = rec.check_stop(nr, cfg) {
                termination = t;
                break;
            }
        }
    }
    Ok(SolveResult { solver: SolverKind::RedBls, x_star: x, trace: rec.trace, termination, config: *cfg })
}
