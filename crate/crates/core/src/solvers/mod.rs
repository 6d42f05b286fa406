//! Fixed-step RED, RED with backtracking line search, and monotone RED.
//!
//! All three record one [`IterationRecord`] per accepted iterate, starting
//! with `k = 0` for the initial point.

mod bls;
mod config;
mod fixed;
mod mred;
mod trace;

use std::fmt;
use std::str::FromStr;

pub use bls::red_bls;
pub use config::{default_gamma, SolverConfig};
pub use fixed::red_sd_fixed;
pub use mred::mred;
pub use trace::{IterationRecord, SolveResult, StepMode, Termination};

use crate::error::{Error, Result};
use crate::red::RedProblem;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Red,
    RedBls,
    Mred,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Red, SolverKind::RedBls, SolverKind::Mred];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Red => "red",
            Self::RedBls => "red_bls",
            Self::Mred => "mred",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "red" => Ok(Self::Red),
            "red_bls" => Ok(Self::RedBls),
            "mred" => Ok(Self::Mred),
            other => Err(Error::InvalidArgument(format!(
                "unknown solver {other:?} (expected red, red_bls or mred)"
            ))),
        }
    }
}

/// Dispatches to one of the three solvers. `reference`, when given, adds
/// PSNR (peak 1) to every trace record.
pub fn run_solver<T: Scalar>(
    kind: SolverKind,
    problem: &RedProblem<T>,
    x0: &[T],
    cfg: &SolverConfig<T>,
    reference: Option<&[T]>,
) -> Result<SolveResult<T>> {
    match kind {
        SolverKind::Red => red_sd_fixed(problem, x0, cfg, reference),
        SolverKind::RedBls => red_bls(problem, x0, cfg, reference),
        SolverKind::Mred => mred(problem, x0, cfg, reference),
    }
}
