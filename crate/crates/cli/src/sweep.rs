//! The tau x solver x image sweep and its averaged residual curves.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mred_core::imaging::{make_test_images, RngState, Shape};
use mred_core::solvers::{SolverKind, Termination};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ImageSource, DEFAULT_SHAPE};
use crate::experiment::{build_operator, Experiment, Seeds};
use crate::tracefile::write_run;

pub struct SweepPlan {
    pub base: ExperimentConfig,
    pub taus: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    pub out: PathBuf,
    pub parallel: bool,
}

/// Outcome of one run of the sweep.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub tau: f64,
    pub solver: SolverKind,
    pub image: String,
    pub dir: PathBuf,
    /// Normalized residual per iteration, or the error that stopped the run.
    pub outcome: std::result::Result<(Termination, Vec<f64>), String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub runs: Vec<RunSummary>,
    pub aggregates: Vec<PathBuf>,
}

impl SweepReport {
    pub fn failures(&self) -> impl Iterator<Item = &RunSummary> {
        self.runs.iter().filter(|r| r.outcome.is_err())
    }
}

pub fn tau_label(tau: f64) -> String {
    format!("tau_{tau}")
}

pub fn run_dir(out: &Path, tau: f64, solver: SolverKind, image: &str) -> PathBuf {
    out.join(tau_label(tau)).join(solver.name()).join(image)
}

pub fn aggregate_path(out: &Path, tau: f64) -> PathBuf {
    out.join(format!("aggregate_{}.csv", tau_label(tau)))
}

/// Runs every combination, writing one output directory per run and one
/// aggregate CSV per tau. Individual failures are recorded and skipped.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    let base = &plan.base;
    base.validate()?;
    let seeds = Seeds::from_base(base.seed);
    let [h, w] = base.shape.unwrap_or(DEFAULT_SHAPE);
    let shape = Shape::new(h, w);
    let images = make_test_images::<f64>(&mut RngState::new(seeds.image), shape)?;
    let bundle = build_operator(base, shape, &seeds)?;

    let mut jobs = Vec::new();
    for &tau in &plan.taus {
        for &solver in &plan.solvers {
            for img in &images {
                jobs.push((tau, solver, img));
            }
        }
    }
    let run_one = |&(tau, solver, img): &(f64, SolverKind, &mred_core::imaging::TestImage<f64>)| {
        let dir = run_dir(&plan.out, tau, solver, img.name);
        let outcome = (|| -> Result<(Termination, Vec<f64>)> {
            let mut cfg = base.clone();
            cfg.tau = tau;
            cfg.solver.name = solver.name().into();
            cfg.image = ImageSource::Preset(img.name.into());
            cfg.output = None;
            let exp = Experiment::from_parts(&cfg, (img.name.into(), img.image.clone()), &bundle)?;
            let result = exp.solve()?;
            write_run(&dir, &exp, &result)?;
            Ok((result.termination, result.trace.iter().map(|r| r.normalized_residual).collect()))
        })()
        .map_err(|e| format!("{e:#}"));
        RunSummary { tau, solver, image: img.name.into(), dir, outcome }
    };
    let runs: Vec<RunSummary> =
        if plan.parallel { jobs.par_iter().map(run_one).collect() } else { jobs.iter().map(run_one).collect() };

    fs::create_dir_all(&plan.out).with_context(|| format!("creating {}", plan.out.display()))?;
    let mut aggregates = Vec::new();
    for &tau in &plan.taus {
        let columns: Vec<(String, Option<Vec<f64>>)> = plan
            .solvers
            .iter()
            .map(|&s| {
                let curves: Vec<&[f64]> = runs
                    .iter()
                    .filter(|r| r.tau == tau && r.solver == s)
                    .filter_map(|r| r.outcome.as_ref().ok().map(|(_, c)| c.as_slice()))
                    .collect();
                (s.name().to_string(), average_curves(&curves))
            })
            .collect();
        let path = aggregate_path(&plan.out, tau);
        write_aggregate(&path, &columns)?;
        aggregates.push(path);
    }
    Ok(SweepReport { runs, aggregates })
}

/// Pointwise mean of per-run normalized residual curves. Shorter curves
/// hold their final value. `None` when there are no curves.
pub fn average_curves(curves: &[&[f64]]) -> Option<Vec<f64>> {
    let len = curves.iter().map(|c| c.len()).max()?;
    if len == 0 {
        return None;
    }
    let count = curves.len() as f64;
    Some(
        (0..len)
            .map(|k| {
                let sum: f64 = curves.iter().map(|c| c[k.min(c.len() - 1)]).sum();
                sum / count
            })
            .collect(),
    )
}

/// Header `k,<solver>...`; a solver without any curve gets empty cells.
pub fn write_aggregate(path: &Path, columns: &[(String, Option<Vec<f64>>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["k".to_string()];
    header.extend(columns.iter().map(|(n, _)| n.clone()));
    w.write_record(&header)?;
    let len = columns.iter().filter_map(|(_, c)| c.as_ref().map(Vec::len)).max().unwrap_or(0);
    for k in 0..len {
        let mut row = vec![k.to_string()];
        for (_, c) in columns {
            row.push(match c {
                Some(v) => v[k.min(v.len() - 1)].to_string(),
                None => String::new(),
            });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
