//! Numerical core for Monte Carlo experiments on the eigenvalue counting
//! function of Wigner random matrices.
//!
//! - [`rng`]: splittable, reproducible per-replicate generators
//! - [`ensembles`]: entry distributions, dense Wigner samplers, tridiagonal
//!   β-ensemble samplers
//! - [`spectral`]: tridiagonalization, Sturm counts, eigenvalue solvers
//! - [`semicircle`]: semicircle-law quantities and bulk predictions
//! - [`stats`]: mergeable accumulators and hypothesis tests

pub mod ensembles;
#[cfg(feature = "oracles")]
pub mod oracles;
pub mod rng;
pub mod semicircle;
pub mod spectral;
pub mod stats;

pub use ensembles::Beta;
pub use rng::SeedStream;
