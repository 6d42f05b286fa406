//! Per-run outputs: `trace.csv`, the `run.json` sidecar and `recon.pgm`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mred_core::denoise::LipschitzEstimate;
use mred_core::imaging::pgm::pgm_write;
use mred_core::imaging::{ImageGrid, GENERATOR_FAMILY};
use mred_core::solvers::{IterationRecord, SolveResult, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::experiment::{Experiment, Seeds};

pub const TRACE_FILE: &str = "trace.csv";
pub const SIDECAR_FILE: &str = "run.json";
pub const RECON_FILE: &str = "recon.pgm";
pub const TRACE_HEADER: &str = "k,phi,g_norm,norm_resid,mode,backtracks,step_used,psnr_db,denoiser_applies,vjp_evals";

/// One CSV row of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub phi: f64,
    pub g_norm: f64,
    pub norm_resid: f64,
    pub mode: String,
    pub backtracks: usize,
    pub step_used: f64,
    pub psnr_db: Option<f64>,
    pub denoiser_applies: u64,
    pub vjp_evals: u64,
}

impl From<&IterationRecord<f64>> for TraceRow {
    fn from(r: &IterationRecord<f64>) -> Self {
        Self {
            k: r.k,
            phi: r.phi,
            g_norm: r.g_norm,
            norm_resid: r.normalized_residual,
            mode: r.mode.name().into(),
            backtracks: r.backtracks,
            step_used: r.step_used,
            psnr_db: r.psnr_db,
            denoiser_applies: r.counters.denoiser_applies,
            vjp_evals: r.counters.vjp_evals,
        }
    }
}

pub fn write_trace(path: &Path, trace: &[IterationRecord<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in trace {
        w.serialize(TraceRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    anyhow::ensure!(header == TRACE_HEADER, "{}: unexpected header {header:?}", path.display());
    r.deserialize().collect::<Result<Vec<TraceRow>, _>>().with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorInfo {
    pub label: String,
    pub rows: usize,
    pub cols: usize,
    /// Power-iteration estimate of `lambda_max(A^T A)`.
    pub lipschitz: f64,
    pub power_iterations: usize,
    pub power_converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzInfo {
    pub value: f64,
    pub method: String,
    pub probes: usize,
    pub converged: bool,
}

impl From<&LipschitzEstimate<f64>> for LipschitzInfo {
    fn from(e: &LipschitzEstimate<f64>) -> Self {
        Self { value: e.value, method: e.method.name().into(), probes: e.probes, converged: e.converged }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiserInfo {
    pub label: String,
    pub nominal_lipschitz: Option<f64>,
    pub estimate: LipschitzInfo,
}

/// The solver settings actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEcho {
    pub name: String,
    pub gamma: f64,
    pub alpha0: f64,
    pub beta: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub divergence_cap: f64,
    pub residual_tol: f64,
    pub test_before_shrink: bool,
}

impl SolverEcho {
    fn new(name: &str, c: &SolverConfig<f64>) -> Self {
        Self {
            name: name.into(),
            gamma: c.gamma,
            alpha0: c.alpha0,
            beta: c.beta,
            theta: c.theta,
            epsilon: c.epsilon,
            max_iters: c.max_iters,
            divergence_cap: c.divergence_cap,
            residual_tol: c.residual_tol,
            test_before_shrink: c.test_before_shrink,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultInfo {
    pub termination: String,
    pub iterations: usize,
    pub final_norm_resid: Option<f64>,
    pub final_phi: Option<f64>,
    pub final_psnr_db: Option<f64>,
}

/// Everything needed to reproduce a run, plus a summary of its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub version: String,
    pub generator_family: String,
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub image: String,
    pub operator: OperatorInfo,
    pub denoiser: DenoiserInfo,
    pub gamma: f64,
    pub solver: SolverEcho,
    pub result: ResultInfo,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Sidecar {
    pub fn new(exp: &Experiment, result: &SolveResult<f64>) -> Result<Self> {
        let op = exp.problem.fidelity().operator();
        let den = exp.problem.denoiser();
        let last = result.final_record();
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").into(),
            generator_family: GENERATOR_FAMILY.into(),
            config: exp.config.clone(),
            seeds: exp.seeds,
            image: exp.image_name.clone(),
            operator: OperatorInfo {
                label: op.label(),
                rows: op.range_dim(),
                cols: op.domain_dim(),
                lipschitz: exp.operator_lipschitz.value,
                power_iterations: exp.operator_lipschitz.iterations,
                power_converged: exp.operator_lipschitz.converged,
            },
            denoiser: DenoiserInfo {
                label: den.label(),
                nominal_lipschitz: den.nominal_lipschitz(),
                estimate: (&exp.denoiser_lipschitz()?).into(),
            },
            gamma: exp.gamma,
            solver: SolverEcho::new(result.solver.name(), &result.config),
            result: ResultInfo {
                termination: result.termination.name().into(),
                iterations: last.k,
                final_norm_resid: finite(last.normalized_residual),
                final_phi: finite(last.phi),
                final_psnr_db: last.psnr_db.and_then(finite),
            },
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Paths of the files written for one run.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub trace: PathBuf,
    pub sidecar: PathBuf,
    pub recon: Option<PathBuf>,
}

/// Writes the trace, sidecar and reconstruction into `dir` (created if
/// needed). The reconstruction is skipped if the iterate is not finite.
pub fn write_run(dir: &Path, exp: &Experiment, result: &SolveResult<f64>) -> Result<RunFiles> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let trace = dir.join(TRACE_FILE);
    write_trace(&trace, &result.trace)?;
    let sidecar = dir.join(SIDECAR_FILE);
    let meta = Sidecar::new(exp, result)?;
    fs::write(&sidecar, serde_json::to_string_pretty(&meta)? + "\n")?;
    let recon = match ImageGrid::new(exp.shape, result.x_star.clone()) {
        Ok(img) => {
            let p = dir.join(RECON_FILE);
            pgm_write(&img, &p, 16)?;
            Some(p)
        }
        Err(_) => None,
    };
    Ok(RunFiles { trace, sidecar, recon })
}
