//! Turning an [`ExperimentConfig`] into a ready-to-solve problem.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use mred_core::denoise::{
    estimate_lipschitz, ConvNetConfig, DctSoftThreshold, Denoiser, FdJacobianWrapper, IdentityDenoiser,
    LinearSmoother, LipschitzEstimate, LipschitzMethod, RandomConvNet, ScaledDenoiser,
};
use mred_core::forward::{
    add_noise_at_snr, build_cs_operator, spectral_norm_sq, DeblurOperator, LeastSquaresFidelity, LinearOperator,
    NoiseSpec, SpectralEstimate, DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL,
};
use mred_core::imaging::pgm::pgm_read;
use mred_core::imaging::{make_test_images, ImageGrid, Kernel2D, RngState, Shape};
use mred_core::red::RedProblem;
use mred_core::solvers::{default_gamma, run_solver, SolveResult, SolverConfig, SolverKind};
use serde::{Deserialize, Serialize};

use crate::config::{DenoiserSpec, ExperimentConfig, ImageSource, ProblemKind, DEFAULT_SHAPE};

/// Probes used for the denoiser Lipschitz figure recorded with every run.
pub const SIDECAR_LIPSCHITZ_PROBES: usize = 4;

/// Per-purpose seeds derived from the config's base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub base: u64,
    pub image: u64,
    pub cs: u64,
    pub noise: u64,
    pub power: u64,
    pub probe: u64,
}

impl Seeds {
    pub fn from_base(base: u64) -> Self {
        Self {
            base,
            image: base,
            cs: base.wrapping_add(1),
            noise: base.wrapping_add(2),
            power: base.wrapping_add(4),
            probe: base.wrapping_add(5),
        }
    }
}

/// The measurement operator with its power-iteration estimate of `L`.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub op: Arc<dyn LinearOperator<f64>>,
    pub lipschitz: SpectralEstimate<f64>,
}

/// Resolves the image named by the config and its shape.
pub fn load_image(cfg: &ExperimentConfig, seeds: &Seeds) -> Result<(String, ImageGrid<f64>)> {
    match &cfg.image {
        ImageSource::Preset(name) => {
            let [h, w] = cfg.shape.unwrap_or(DEFAULT_SHAPE);
            let images = make_test_images::<f64>(&mut RngState::new(seeds.image), Shape::new(h, w))?;
            let found = images.into_iter().find(|t| t.name == name.as_str());
            let img = found.with_context(|| format!("unknown image preset {name:?}"))?;
            Ok((name.clone(), img.image))
        }
        ImageSource::Path(path) => {
            let img = pgm_read::<f64>(path).with_context(|| format!("reading {}", path.display()))?;
            if let Some([h, w]) = cfg.shape {
                if Shape::new(h, w) != img.shape() {
                    bail!("config shape {h}x{w} does not match {} ({})", path.display(), img.shape());
                }
            }
            Ok((cfg.image.name(), img))
        }
    }
}

pub fn cs_rows(ratio: f64, n: usize) -> usize {
    ((ratio * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1))
}

pub fn build_operator(cfg: &ExperimentConfig, shape: Shape, seeds: &Seeds) -> Result<OperatorBundle> {
    let op: Arc<dyn LinearOperator<f64>> = match cfg.problem {
        ProblemKind::Deblur => {
            let kernel = match &cfg.blur.kernel_path {
                Some(p) => Kernel2D::read_text(p).with_context(|| format!("reading kernel {}", p.display()))?,
                None => Kernel2D::gaussian(cfg.blur.size, cfg.blur.sigma)?,
            };
            Arc::new(DeblurOperator::new(shape, kernel)?)
        }
        ProblemKind::Cs => {
            let n = shape.len();
            Arc::new(build_cs_operator::<f64>(cs_rows(cfg.cs.ratio, n), n, seeds.cs)?)
        }
    };
    let lipschitz =
        spectral_norm_sq(op.as_ref(), DEFAULT_POWER_ITERS, DEFAULT_POWER_TOL, &mut RngState::new(seeds.power))?;
    Ok(OperatorBundle { op, lipschitz })
}

pub fn build_denoiser(spec: &DenoiserSpec, shape: Shape) -> Result<Arc<dyn Denoiser<f64>>> {
    Ok(match spec {
        DenoiserSpec::Identity {} => Arc::new(IdentityDenoiser::new(shape.len())),
        DenoiserSpec::Smoother { sigma } => Arc::new(LinearSmoother::new(shape, *sigma)?),
        DenoiserSpec::DctThreshold { lambda, mu } => Arc::new(DctSoftThreshold::new(shape, *lambda, *mu)?),
        DenoiserSpec::Scaled { scale, inner } => Arc::new(ScaledDenoiser::new(build_denoiser(inner, shape)?, *scale)?),
        DenoiserSpec::Convnet { layers, channels, weight_scale, seed } => Arc::new(RandomConvNet::new(
            shape,
            ConvNetConfig { layers: *layers, channels: *channels, weight_scale: *weight_scale, seed: *seed },
        )?),
        DenoiserSpec::FdWrapped { inner, step } => {
            Arc::new(FdJacobianWrapper::new(build_denoiser(inner, shape)?, *step)?)
        }
    })
}

/// A fully built run: problem, starting point and solver settings.
#[derive(Debug, Clone)]
pub struct Experiment {
    /// The config with every default made explicit.
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub image_name: String,
    pub shape: Shape,
    pub x_true: Vec<f64>,
    pub x0: Vec<f64>,
    pub problem: RedProblem<f64>,
    pub operator_lipschitz: SpectralEstimate<f64>,
    pub gamma: f64,
    pub solver: SolverKind,
    pub solver_config: SolverConfig<f64>,
}

impl Experiment {
    pub fn prepare(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let seeds = Seeds::from_base(cfg.seed);
        let image = load_image(cfg, &seeds)?;
        let bundle = build_operator(cfg, image.1.shape(), &seeds)?;
        Self::from_parts(cfg, image, &bundle)
    }

    /// Builds a run around an existing image and operator (the sweep shares
    /// both across runs).
    pub fn from_parts(cfg: &ExperimentConfig, image: (String, ImageGrid<f64>), bundle: &OperatorBundle) -> Result<Self> {
        cfg.validate()?;
        let seeds = Seeds::from_base(cfg.seed);
        let (image_name, img) = image;
        let shape = img.shape();
        let mut config = cfg.clone();
        config.shape = Some([shape.height, shape.width]);

        let x_true = img.into_values();
        let noise = match cfg.noise.input_snr_db {
            Some(snr) => NoiseSpec { input_snr_db: snr, seed: seeds.noise },
            None => NoiseSpec::noiseless(),
        };
        let (y, _) = add_noise_at_snr(bundle.op.as_ref(), &x_true, &noise)?;
        let x0 = match cfg.problem {
            ProblemKind::Deblur => y.clone(),
            ProblemKind::Cs => bundle.op.adjoint(&y)?,
        };
        let denoiser = build_denoiser(&cfg.denoiser, shape)?;
        let fidelity = LeastSquaresFidelity::new(bundle.op.clone(), y)?;
        let problem = RedProblem::new(fidelity, denoiser, cfg.tau)?;
        let gamma = match cfg.solver.gamma {
            Some(g) => g,
            None => default_gamma(bundle.lipschitz.value, cfg.tau)?,
        };
        let solver = cfg.solver.kind()?;
        let solver_config = cfg.solver.build(gamma)?;
        Ok(Self {
            config,
            seeds,
            image_name,
            shape,
            x_true,
            x0,
            problem,
            operator_lipschitz: bundle.lipschitz.clone(),
            gamma,
            solver,
            solver_config,
        })
    }

    pub fn solve(&self) -> Result<SolveResult<f64>> {
        Ok(run_solver(self.solver, &self.problem, &self.x0, &self.solver_config, Some(&self.x_true))?)
    }

    /// Cheap pairwise lower bound on the denoiser's Lipschitz constant.
    pub fn denoiser_lipschitz(&self) -> Result<LipschitzEstimate<f64>> {
        Ok(estimate_lipschitz(
            self.problem.denoiser().as_ref(),
            LipschitzMethod::PairwiseRatioSampling,
            SIDECAR_LIPSCHITZ_PROBES,
            0,
            &mut RngState::new(self.seeds.probe),
        )?)
    }
}
