//! Experiment harness for Monte Carlo verification of Wigner-matrix
//! counting statistics: validated configurations, deterministic parallel
//! replicate execution, experiment runners, and CSV/JSON/SVG reporting.
//!
//! Determinism contract: for a fixed configuration and master seed, every
//! runner produces bit-identical canonical JSON regardless of worker count.
//! Replicates draw from generators keyed by (seed, replicate index) and all
//! floating-point reduction happens in a fixed tree order.

pub mod config;
pub mod driver;
pub mod experiments;
pub mod report;
pub mod svg;

pub use config::{ConfigError, ConfigOverlay, EnsembleId, ExperimentConfig, OutputFormat};
pub use experiments::{
    run_clt, run_counting, run_fluctuation, run_interlacing, run_rigidity, run_universality,
    run_variance_slope, InterlaceRecipe, RunError,
};
pub use report::ExperimentReport;
