//! Experiment configuration files.
//!
//! Configs are JSON objects. Unknown keys are rejected everywhere. Every
//! field except `problem`, `denoiser` and `tau` has a default:
//!
//! ```json
//! {
//!   "problem": "deblur",
//!   "image": { "preset": "phantom" },
//!   "shape": [64, 64],
//!   "blur": { "kernel_path": null, "size": 17, "sigma": 3.0 },
//!   "cs": { "ratio": 0.1 },
//!   "noise": { "input_snr_db": 30.0 },
//!   "denoiser": { "kind": "smoother", "sigma": 1.0 },
//!   "tau": 0.1,
//!   "solver": { "name": "mred", "max_iters": 1000 },
//!   "seed": 1,
//!   "output": "out/run"
//! }
//! ```
//!
//! `image` is either `{"preset": name}` (one of the six synthetic images) or
//! `{"path": file}` (binary PGM; `shape` is then taken from the file).
//! `noise.input_snr_db: null` means noiseless measurements. Solver fields
//! left out fall back to [`SolverConfig::with_gamma`], and `gamma` itself
//! defaults to `1 / (L + 2 tau)` with `L` from power iteration.
//!
//! Relative paths are resolved against the directory holding the config.

use std::fmt;
use std::path::{Path, PathBuf};

use mred_core::imaging::TEST_IMAGE_NAMES;
use mred_core::solvers::{SolverConfig, SolverKind};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub const DEFAULT_SHAPE: [usize; 2] = [64, 64];
pub const DEFAULT_BLUR_SIZE: usize = 17;
pub const DEFAULT_BLUR_SIGMA: f64 = 3.0;
pub const DEFAULT_CS_RATIO: f64 = 0.1;
pub const DEFAULT_SNR_DB: f64 = 30.0;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Deblur,
    Cs,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Deblur => "deblur",
            Self::Cs => "cs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ImageSource {
    Preset(String),
    Path(PathBuf),
}

impl Default for ImageSource {
    fn default() -> Self {
        Self::Preset("phantom".into())
    }
}

impl ImageSource {
    /// Short name used for output directories.
    pub fn name(&self) -> String {
        match self {
            Self::Preset(p) => p.clone(),
            Self::Path(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlurConfig {
    /// Kernel text file; overrides `size` and `sigma` when set.
    #[serde(default)]
    pub kernel_path: Option<PathBuf>,
    #[serde(default = "default_blur_size")]
    pub size: usize,
    #[serde(default = "default_blur_sigma")]
    pub sigma: f64,
}

impl Default for BlurConfig {
    fn default() -> Self {
        Self { kernel_path: None, size: DEFAULT_BLUR_SIZE, sigma: DEFAULT_BLUR_SIGMA }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsConfig {
    /// `m / n`; `m` is rounded to the nearest integer.
    #[serde(default = "default_cs_ratio")]
    pub ratio: f64,
}

impl Default for CsConfig {
    fn default() -> Self {
        Self { ratio: DEFAULT_CS_RATIO }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default = "default_snr")]
    pub input_snr_db: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { input_snr_db: default_snr() }
    }
}

/// Denoiser presets, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DenoiserSpec {
    Identity {},
    Smoother {
        sigma: f64,
    },
    DctThreshold {
        lambda: f64,
        /// Smoothing width; 0 gives the exact (non-smooth) soft threshold.
        #[serde(default)]
        mu: f64,
    },
    Scaled {
        scale: f64,
        inner: Box<DenoiserSpec>,
    },
    Convnet {
        layers: usize,
        channels: usize,
        weight_scale: f64,
        seed: u64,
    },
    /// Finite-difference residual VJP around `inner`.
    FdWrapped {
        inner: Box<DenoiserSpec>,
        #[serde(default = "default_fd_step")]
        step: f64,
    },
}

impl DenoiserSpec {
    /// Named denoiser presets accepted on the command line.
    pub const NAMES: [&'static str; 7] = [
        "identity",
        "smoother",
        "dct_threshold",
        "dct_threshold_exact",
        "scaled_smoother",
        "expansive_smoother",
        "expansive_convnet",
    ];

    pub fn named(name: &str) -> Option<Self> {
        let smoother = || Box::new(Self::Smoother { sigma: 1.0 });
        Some(match name {
            "identity" => Self::Identity {},
            "smoother" => Self::Smoother { sigma: 1.0 },
            "dct_threshold" => Self::DctThreshold { lambda: 0.05, mu: 0.05 },
            "dct_threshold_exact" => Self::DctThreshold { lambda: 0.05, mu: 0.0 },
            "scaled_smoother" => Self::Scaled { scale: 1.5, inner: smoother() },
            "expansive_smoother" => Self::Scaled { scale: 3.0, inner: smoother() },
            "expansive_convnet" => Self::Convnet { layers: 2, channels: 4, weight_scale: 1.0, seed: 11 },
            _ => return None,
        })
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(format!("{field}.{name}"), format!("must be positive, got {v}")))
            }
        };
        match self {
            Self::Identity {} => Ok(()),
            Self::Smoother { sigma } => pos(*sigma, "sigma"),
            Self::DctThreshold { lambda, mu } => {
                pos(*lambda, "lambda")?;
                if !(*mu >= 0.0 && *mu <= 2.0 * lambda) {
                    return Err(ConfigError::invalid(format!("{field}.mu"), "must lie in [0, 2 lambda]"));
                }
                Ok(())
            }
            Self::Scaled { scale, inner } => {
                pos(*scale, "scale")?;
                inner.validate(&format!("{field}.inner"))
            }
            Self::Convnet { layers, channels, weight_scale, .. } => {
                if !(2..=3).contains(layers) {
                    return Err(ConfigError::invalid(format!("{field}.layers"), "must be 2 or 3"));
                }
                if *channels == 0 {
                    return Err(ConfigError::invalid(format!("{field}.channels"), "must be at least 1"));
                }
                pos(*weight_scale, "weight_scale")
            }
            Self::FdWrapped { inner, step } => {
                pos(*step, "step")?;
                inner.validate(&format!("{field}.inner"))
            }
        }
    }
}

impl fmt::Display for DenoiserSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// Solver name plus optional overrides of [`SolverConfig`] fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_solver")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_before_shrink: Option<bool>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            name: default_solver(),
            gamma: None,
            alpha0: None,
            beta: None,
            theta: None,
            epsilon: None,
            max_iters: None,
            divergence_cap: None,
            residual_tol: None,
            test_before_shrink: None,
        }
    }
}

impl SolverSection {
    pub fn kind(&self) -> Result<SolverKind, ConfigError> {
        self.name.parse().map_err(|e: mred_core::Error| ConfigError::invalid("solver.name", e.to_string()))
    }

    /// Applies the overrides on top of the defaults for step size `gamma`.
    pub fn build(&self, default_gamma: f64) -> Result<SolverConfig<f64>, ConfigError> {
        let mut c = SolverConfig::with_gamma(self.gamma.unwrap_or(default_gamma));
        if let Some(v) = self.alpha0 {
            c.alpha0 = v;
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        if let Some(v) = self.theta {
            c.theta = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.max_iters {
            c.max_iters = v;
        }
        if let Some(v) = self.divergence_cap {
            c.divergence_cap = v;
        }
        if let Some(v) = self.residual_tol {
            c.residual_tol = v;
        }
        if let Some(v) = self.test_before_shrink {
            c.test_before_shrink = v;
        }
        c.validate().map_err(|e| ConfigError::invalid("solver", e.to_string()))?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    #[serde(default)]
    pub image: ImageSource,
    /// `[height, width]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<[usize; 2]>,
    #[serde(default)]
    pub blur: BlurConfig,
    #[serde(default)]
    pub cs: CsConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub denoiser: DenoiserSpec,
    pub tau: f64,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            origin: "<input>".into(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Reads, parses and validates a config file. Relative paths inside it
    /// are made absolute against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            origin: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.rebase_paths(&base);
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn rebase_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ImageSource::Path(p) = &mut self.image {
            fix(p);
        }
        if let Some(p) = &mut self.blur.kernel_path {
            fix(p);
        }
        if let Some(p) = &mut self.output {
            fix(p);
        }
    }

    /// Checks everything that can be checked without building operators.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(ConfigError::invalid("tau", format!("must be positive, got {}", self.tau)));
        }
        match &self.image {
            ImageSource::Preset(name) => {
                if !TEST_IMAGE_NAMES.contains(&name.as_str()) {
                    return Err(ConfigError::invalid(
                        "image.preset",
                        format!("unknown image {name:?}; expected one of {}", TEST_IMAGE_NAMES.join(", ")),
                    ));
                }
                let [h, w] = self.shape.unwrap_or(DEFAULT_SHAPE);
                if h < 32 || w < 32 {
                    return Err(ConfigError::invalid("shape", "synthetic images need at least 32x32"));
                }
            }
            ImageSource::Path(p) => {
                if !p.is_file() {
                    return Err(ConfigError::invalid("image.path", format!("{} does not exist", p.display())));
                }
            }
        }
        match self.problem {
            ProblemKind::Deblur => match &self.blur.kernel_path {
                Some(p) if !p.is_file() => {
                    return Err(ConfigError::invalid("blur.kernel_path", format!("{} does not exist", p.display())));
                }
                Some(_) => {}
                None => {
                    if self.blur.size % 2 == 0 {
                        return Err(ConfigError::invalid("blur.size", "must be odd"));
                    }
                    if !(self.blur.sigma > 0.0) {
                        return Err(ConfigError::invalid("blur.sigma", "must be positive"));
                    }
                }
            },
            ProblemKind::Cs => {
                if !(self.cs.ratio > 0.0 && self.cs.ratio < 1.0) {
                    return Err(ConfigError::invalid("cs.ratio", format!("must lie in (0, 1), got {}", self.cs.ratio)));
                }
            }
        }
        if let Some(snr) = self.noise.input_snr_db {
            if snr.is_nan() {
                return Err(ConfigError::invalid("noise.input_snr_db", "must be a number or null"));
            }
        }
        self.denoiser.validate("denoiser")?;
        self.solver.kind()?;
        // Overrides are checked against a placeholder step when gamma is derived.
        self.solver.build(self.solver.gamma.unwrap_or(1.0))?;
        Ok(())
    }
}

fn default_blur_size() -> usize {
    DEFAULT_BLUR_SIZE
}

fn default_blur_sigma() -> f64 {
    DEFAULT_BLUR_SIGMA
}

fn default_cs_ratio() -> f64 {
    DEFAULT_CS_RATIO
}

fn default_snr() -> Option<f64> {
    Some(DEFAULT_SNR_DB)
}

fn default_fd_step() -> f64 {
    mred_core::denoise::FD_STEP
}

fn default_solver() -> String {
    "mred".into()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}
