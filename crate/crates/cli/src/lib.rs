//! Experiment driver around `mred-core`: JSON configs, single runs, tau
//! sweeps with averaged residual curves, SVG plots, gradient checks and
//! Lipschitz certification of denoisers.
//!
//! The `mred` binary is a thin wrapper over [`run_cli`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod gradcheck;
pub mod plot;
pub mod presets;
pub mod sweep;
pub mod tracefile;

pub use cli::run_cli;
pub use config::ExperimentConfig;
pub use error::{exit, ConfigError};
pub use experiment::Experiment;
