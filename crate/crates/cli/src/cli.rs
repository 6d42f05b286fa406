//! Argument parsing and the six subcommands.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mred_core::denoise::{estimate_lipschitz, LipschitzMethod};
use mred_core::imaging::pgm::pgm_write;
use mred_core::imaging::{make_test_images, Kernel2D, RngState, Shape};
use mred_core::solvers::{SolverKind, Termination};

use crate::config::{DenoiserSpec, ExperimentConfig, DEFAULT_BLUR_SIGMA, DEFAULT_BLUR_SIZE, DEFAULT_SEED};
use crate::error::{exit, ConfigError};
use crate::experiment::{build_denoiser, Experiment};
use crate::gradcheck::{gradient_check, GradCheck, GRAD_CHECK_PROBES, GRAD_CHECK_TOL};
use crate::plot::{read_aggregate, render_svg};
use crate::sweep::{run_sweep, SweepPlan};
use crate::tracefile::write_run;

/// Lipschitz bounds used by `lipschitz --certify`.
pub const NONEXPANSIVE_MAX: f64 = 1.0 + 1e-6;
pub const EXPANSIVE_MIN: f64 = 1.5;

#[derive(Debug, Parser)]
#[command(name = "mred", version, about = "RED, RED with backtracking and monotone RED experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one configured problem and write its trace.
    Run(RunArgs),
    /// Run every tau x solver combination on the six synthetic images.
    Sweep(SweepArgs),
    /// Draw aggregate CSVs as SVG line plots.
    Plot(PlotArgs),
    /// Compare grad phi with finite differences of phi.
    GradCheck(GradCheckArgs),
    /// Estimate a denoiser's Lipschitz constant.
    Lipschitz(LipschitzArgs),
    /// Write the synthetic test images and the default blur kernel.
    MakeData(MakeDataArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub solver: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `out/run`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.1, 0.01])]
    pub tau: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = ["red".to_string(), "red_bls".to_string(), "mred".to_string()])]
    pub solver: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `out/sweep`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the individual solves on a thread pool.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Aggregate CSVs written by `sweep`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// An `.svg` file (single input only) or a directory; defaults to
    /// writing next to each input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradCheckArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Power,
    Pairwise,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Certify {
    Nonexpansive,
    Expansive,
}

#[derive(Debug, Args)]
pub struct LipschitzArgs {
    /// A preset name or an inline JSON denoiser spec.
    #[arg(long)]
    pub denoiser: String,
    #[arg(long, default_value = "64x64", value_parser = parse_shape)]
    pub shape: Shape,
    #[arg(long, value_enum, default_value = "power")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 4)]
    pub probes: usize,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Exit with the check-failure code unless the estimate qualifies.
    #[arg(long, value_enum)]
    pub certify: Option<Certify>,
}

#[derive(Debug, Args)]
pub struct MakeDataArgs {
    #[arg(long, default_value = "data")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "64x64", value_parser = parse_shape)]
    pub shape: Shape,
}

pub fn parse_shape(s: &str) -> std::result::Result<Shape, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad shape {s:?}; expected HxW"));
    let (h, w) = match s.split_once(['x', 'X']) {
        Some((h, w)) => (parse(h)?, parse(w)?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if h == 0 || w == 0 {
        return Err("shape sides must be positive".into());
    }
    Ok(Shape::new(h, w))
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Plot(a) => cmd_plot(&a),
        Command::GradCheck(a) => cmd_grad_check(&a),
        Command::Lipschitz(a) => cmd_lipschitz(&a),
        Command::MakeData(a) => cmd_make_data(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::USAGE
        }
    }
}

pub fn exit_code(t: Termination) -> i32 {
    match t {
        Termination::MaxIters | Termination::ConvergedTol => exit::SUCCESS,
        Termination::Diverged => exit::DIVERGED,
        Termination::StepFloor => exit::STEP_FLOOR,
    }
}

fn load_with_overrides(
    path: &Path,
    tau: Option<f64>,
    solver: Option<&str>,
    seed: Option<u64>,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(t) = tau {
        cfg.tau = t;
    }
    if let Some(s) = solver {
        cfg.solver.name = s.to_string();
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| format!("{x:.4}"))
}

pub fn cmd_run(a: &RunArgs) -> Result<i32> {
    let mut cfg = load_with_overrides(&a.config, a.tau, a.solver.as_deref(), a.seed)?;
    let out = a.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out/run"));
    cfg.output = Some(out.clone());
    let exp = Experiment::prepare(&cfg)?;
    let result = exp.solve()?;
    write_run(&out, &exp, &result)?;
    let last = result.final_record();
    println!(
        "solver={} image={} tau={} termination={} iterations={} norm_resid={:e} phi={:e} psnr_db={} L={:.6} gamma={:.6} out={}",
        result.solver,
        exp.image_name,
        cfg.tau,
        result.termination,
        last.k,
        last.normalized_residual,
        last.phi,
        fmt_opt(last.psnr_db),
        exp.operator_lipschitz.value,
        exp.gamma,
        out.display()
    );
    Ok(exit_code(result.termination))
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<i32> {
    let cfg = load_with_overrides(&a.config, None, None, a.seed)?;
    if a.tau.is_empty() || a.solver.is_empty() {
        return Err(ConfigError::invalid("--tau/--solver", "need at least one value each").into());
    }
    for &t in &a.tau {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError::invalid("--tau", format!("must be positive, got {t}")).into());
        }
    }
    let solvers = a
        .solver
        .iter()
        .map(|s| s.parse::<SolverKind>().map_err(|e| ConfigError::invalid("--solver", e.to_string())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let out = a.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out/sweep"));
    let plan = SweepPlan { base: cfg, taus: a.tau.clone(), solvers, out, parallel: a.parallel };
    let report = run_sweep(&plan)?;
    for r in &report.runs {
        match &r.outcome {
            Ok((t, curve)) => println!(
                "tau={} solver={} image={} termination={} iterations={} norm_resid={:e}",
                r.tau,
                r.solver,
                r.image,
                t,
                curve.len() - 1,
                curve.last().copied().unwrap_or(f64::NAN)
            ),
            Err(e) => println!("tau={} solver={} image={} failed: {e}", r.tau, r.solver, r.image),
        }
    }
    for p in &report.aggregates {
        println!("aggregate {}", p.display());
    }
    let failures: Vec<_> = report.failures().collect();
    println!("sweep: {} runs, {} failed", report.runs.len(), failures.len());
    for f in &failures {
        println!("  failed: tau={} solver={} image={}", f.tau, f.solver, f.image);
    }
    Ok(if failures.is_empty() { exit::SUCCESS } else { exit::USAGE })
}

pub fn cmd_plot(a: &PlotArgs) -> Result<i32> {
    let single_file = a.inputs.len() == 1
        && a.out.as_ref().is_some_and(|o| o.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg")));
    // Read everything first so a bad input leaves no partial output.
    let mut plots = Vec::new();
    for input in &a.inputs {
        let series = read_aggregate(input)?;
        let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
        let title = stem.strip_prefix("aggregate_").unwrap_or(&stem).replacen("tau_", "tau = ", 1);
        let target = match &a.out {
            Some(o) if single_file => o.clone(),
            Some(dir) => dir.join(format!("{stem}.svg")),
            None => input.with_extension("svg"),
        };
        plots.push((target, render_svg(&title, &series)));
    }
    for (target, svg) in plots {
        if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(&target, svg).with_context(|| format!("writing {}", target.display()))?;
        println!("wrote {}", target.display());
    }
    Ok(exit::SUCCESS)
}

pub fn cmd_grad_check(a: &GradCheckArgs) -> Result<i32> {
    let cfg = load_with_overrides(&a.config, a.tau, None, a.seed)?;
    let exp = Experiment::prepare(&cfg)?;
    match gradient_check(&exp.problem, GRAD_CHECK_PROBES, exp.seeds.probe)? {
        GradCheck::Checked { max_rel_error, probes } => {
            let pass = max_rel_error <= GRAD_CHECK_TOL;
            println!(
                "grad-check denoiser={} probes={probes} max_rel_error={max_rel_error:e} tol={GRAD_CHECK_TOL:e} {}",
                exp.problem.denoiser().label(),
                if pass { "pass" } else { "FAIL" }
            );
            Ok(if pass { exit::SUCCESS } else { exit::CHECK_FAILED })
        }
        GradCheck::NotSmooth { label } => {
            println!("grad-check denoiser={label} non-smooth: phi is not differentiable at threshold kinks; check skipped");
            Ok(exit::CHECK_FAILED)
        }
    }
}

pub fn parse_denoiser(text: &str) -> Result<DenoiserSpec> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| {
            ConfigError::Parse { origin: "--denoiser".into(), line: e.line(), column: e.column(), message: e.to_string() }
                .into()
        });
    }
    match DenoiserSpec::named(t) {
        Some(d) => Ok(d),
        None => bail!("unknown denoiser {t:?}; expected JSON or one of {}", DenoiserSpec::NAMES.join(", ")),
    }
}

pub fn cmd_lipschitz(a: &LipschitzArgs) -> Result<i32> {
    let spec = parse_denoiser(&a.denoiser)?;
    let d = build_denoiser(&spec, a.shape)?;
    let method = match a.method {
        MethodArg::Power => LipschitzMethod::JacobianPowerIteration,
        MethodArg::Pairwise => LipschitzMethod::PairwiseRatioSampling,
    };
    let est = estimate_lipschitz(d.as_ref(), method, a.probes, a.iters, &mut RngState::new(a.seed))?;
    println!(
        "lipschitz denoiser={} shape={} method={} value={:.6} probes={} converged={} nominal={}",
        d.label(),
        a.shape,
        method.name(),
        est.value,
        est.probes,
        est.converged,
        fmt_opt(d.nominal_lipschitz())
    );
    let ok = match a.certify {
        None => true,
        Some(Certify::Nonexpansive) => est.value <= NONEXPANSIVE_MAX,
        Some(Certify::Expansive) => est.value >= EXPANSIVE_MIN,
    };
    if let Some(c) = a.certify {
        println!("certify {:?}: {}", c, if ok { "pass" } else { "FAIL" });
    }
    Ok(if ok { exit::SUCCESS } else { exit::CHECK_FAILED })
}

pub fn cmd_make_data(a: &MakeDataArgs) -> Result<i32> {
    let images = make_test_images::<f64>(&mut RngState::new(a.seed), a.shape)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for t in &images {
        let p = a.out.join(format!("{}.pgm", t.name));
        pgm_write(&t.image, &p, 16)?;
        println!("wrote {}", p.display());
    }
    let kernel = Kernel2D::<f64>::gaussian(DEFAULT_BLUR_SIZE, DEFAULT_BLUR_SIGMA)?;
    let p = a.out.join("kernel.txt");
    let mut f = fs::File::create(&p)?;
    kernel.write_text(&mut f)?;
    println!("wrote {}", p.display());
    Ok(exit::SUCCESS)
}
