use crate::error::{check_len, Result};
use crate::red::{phi_of, EvalCounters, RedProblem};
use crate::vector::{add_scaled, all_finite, norm_sq};
use crate::Scalar;

use super::trace::Recorder;
use super::{SolveResult, SolverConfig, SolverKind, StepMode, Termination};

/// Monotone RED.
///
/// Every outer iteration first tries the plain RED step with the fixed
/// `gamma`. The trial is kept if it satisfies the sufficient-decrease test
///
/// `phi(x^k) <= phi(x^{k-1}) - alpha * theta * ||grad phi(x^{k-1})||^2`
///
/// with `alpha = alpha0`. Otherwise it is replaced by gradient steps
/// `x^{k-1} - alpha grad phi(x^{k-1})` with `alpha` shrinking by `beta`,
/// until the test passes or `alpha < epsilon` (then the previous iterate is
/// returned with [`Termination::StepFloor`]).
///
/// In the default order a gradient step of size `alpha` is tested against
/// the already-shrunk `beta * alpha`; `test_before_shrink` tests it against
/// its own `alpha`. Either way accepted iterates never increase `phi`.
///
/// `phi(x^{k-1})` and `grad phi(x^{k-1})` are evaluated once per outer
/// iteration.
pub fn mred<T: Scalar>(
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
    let mut phi = phi_of(&g);
    let mut rec = Recorder::new(&g, reference);
    rec.push(0, &x, &g, StepMode::Init, 0, T::zero(), counters);

    let mut termination = Termination::MaxIters;
    if !all_finite(&g) {
        termination = Termination::Diverged;
    } else {
        for k in 1..=cfg.max_iters {
            let grad = problem.eval_grad_phi_at(&x, &g, &mut counters)?;
            let grad_sq = norm_sq(&grad);
            let decrease = |alpha: T| phi - alpha * cfg.theta * grad_sq;

            let mut x_next = add_scaled(&x, -cfg.gamma, &g);
            let mut g_next = problem.eval_g(&x_next, &mut counters)?;
            let mut phi_next = phi_of(&g_next);
            let mut mode = StepMode::RedStep;
            let mut step = cfg.gamma;
            let mut backtracks = 0;
            let mut alpha = cfg.alpha0;

            // Negated comparisons treat NaN as a failed test.
            if !(phi_next <= decrease(alpha)) {
                if grad_sq == T::zero() {
                    termination = Termination::StepFloor;
                    break;
                }
                mode = StepMode::GradientStep;
                let mut floor_hit = false;
                loop {
                    x_next = add_scaled(&x, -alpha, &grad);
                    step = alpha;
                    backtracks += 1;
                    if cfg.test_before_shrink {
                        g_next = problem.eval_g(&x_next, &mut counters)?;
                        phi_next = phi_of(&g_next);
                        if phi_next <= decrease(alpha) {
                            break;
                        }
                        alpha = alpha * cfg.beta;
                        if alpha < cfg.epsilon {
                            floor_hit = true;
                            break;
                        }
                    } else {
                        alpha = alpha * cfg.beta;
                        if alpha < cfg.epsilon {
                            floor_hit = true;
                            break;
                        }
                        g_next = problem.eval_g(&x_next, &mut counters)?;
                        phi_next = phi_of(&g_next);
                        if phi_next <= decrease(alpha) {
                            break;
                        }
                    }
                }
                if floor_hit {
                    termination = Termination::StepFloor;
                    break;
                }
            }
            if !all_finite(&x_next) {
                termination = Termination::Diverged;
                break;
            }
            x = x_next;
            g = g_next;
            phi = phi_next;
            let nr = rec.push(k, &x, &g, mode, backtracks, step, counters);
            if let Some(t) = rec.check_stop(nr, cfg) {
                termination = t;
                break;
            }
        }
    }
    Ok(SolveResult { solver: SolverKind::Mred, x_star: x, trace: rec.trace, termination, config: *cfg })
}
