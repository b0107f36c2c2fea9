//! Experiment runners: each one ties samplers, spectral kernels, theory
//! predictions and statistics into a verdict-carrying report.

mod clt;
mod counting;
mod fluctuation;
mod interlacing;
mod rigidity;
mod universality;
mod variance_slope;

pub use clt::run_clt;
pub use counting::run_counting;
pub use fluctuation::run_fluctuation;
pub use interlacing::{run_interlacing, InterlaceRecipe};
pub use rigidity::run_rigidity;
pub use universality::run_universality;
pub use variance_slope::run_variance_slope;

use wigner_core::ensembles::{
    sample_dense, sample_tridiagonal_beta, EnsembleSpec,
};
use wigner_core::spectral::{householder_tridiagonalize, SpectralError, TridiagonalMatrix};
use wigner_core::stats::StatsError;
use wigner_core::{Beta, SeedStream};

use crate::config::{ConfigError, EnsembleId};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("spectral failure: {0}")]
    Spectral(#[from] SpectralError),
    #[error("statistics failure: {0}")]
    Stats(#[from] StatsError),
    #[error("prediction failure: {0}")]
    Semicircle(#[from] wigner_core::semicircle::SemicircleError),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl RunError {
    /// CLI exit code: 2 for usage/config problems, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// Ensemble spec for the dense samplers.
fn dense_spec(ensemble: EnsembleId, n: usize) -> EnsembleSpec {
    let spec = match ensemble {
        EnsembleId::GueDense => EnsembleSpec::gue(n),
        EnsembleId::GoeDense => EnsembleSpec::goe(n),
        EnsembleId::WignerThreepoint => EnsembleSpec::three_point_matched(n),
        EnsembleId::WignerRademacher => EnsembleSpec::rademacher_signs(n),
        EnsembleId::GueTridiag | EnsembleId::GoeTridiag => {
            unreachable!("tridiagonal ensembles have no dense spec")
        }
    };
    spec.expect("n validated at configuration time")
}

/// One replicate's matrix, reduced to tridiagonal form. Tridiagonal
/// ensembles sample it directly; dense ensembles go through the Householder
/// reduction.
pub(crate) fn sample_reduced(
    ensemble: EnsembleId,
    n: usize,
    stream: SeedStream,
) -> TridiagonalMatrix {
    match ensemble {
        EnsembleId::GueTridiag => {
            sample_tridiagonal_beta(n, Beta::Two, stream).expect("n validated")
        }
        EnsembleId::GoeTridiag => {
            sample_tridiagonal_beta(n, Beta::One, stream).expect("n validated")
        }
        dense => householder_tridiagonalize(&sample_dense(&dense_spec(dense, n), stream)),
    }
}

/// Sorted copy of values wrapped as a capped sample set.
pub(crate) fn sample_set(
    values: Vec<f64>,
) -> Result<wigner_core::stats::SampleSet, StatsError> {
    wigner_core::stats::SampleSet::from_values_default(values)
}
