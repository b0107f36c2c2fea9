//! Superposition/decimation experiment: merge the spectra of independent
//! GOE_n and GOE_{n+1} draws, keep the even-position values (ascending,
//! 1-based, positions 2..2n), and compare two statistics of the kept set
//! against an independent GUE_n — all at the shared unnormalized scale,
//! normalized by √n only for reporting.
//!
//! The control recipe replaces GOE_{n+1} by a second GOE_n; its kept set is
//! detectably different (the even-position selection gains a parity bias),
//! which is what the rejection verdict checks.

use std::time::Instant;

use wigner_core::semicircle::predict;
use wigner_core::spectral::{all_eigenvalues, SpectralError};
use wigner_core::stats::{ks_two_sample, tree_reduce, KsResult, StreamingMoments};
use wigner_core::{Beta, SeedStream};

use crate::config::{
    ConfigError, EnsembleId, ExperimentConfig, INTERLACE_MIN_REPS, INTERLACE_N_CAP,
};
use crate::driver::map_replicates;
use crate::report::{
    Comparison, ConfigEcho, Details, ExperimentReport, MomentsSummary, NResult, Timing, Verdict,
};

use super::{sample_set, RunError};

/// Two-sample rejection level (harness constant).
pub const ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterlaceRecipe {
    /// GOE_n ∪ GOE_{n+1}: equals GUE_n in law.
    Matched,
    /// GOE_n ∪ GOE_n: the deliberately wrong recipe.
    Control,
}

struct Outcome {
    kept_count: usize,
    kept_median: f64,
    gue_count: usize,
    gue_median: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn run_interlacing(
    cfg: &ExperimentConfig,
    recipe: InterlaceRecipe,
) -> Result<ExperimentReport, RunError> {
    cfg.validate_common()?;
    if cfg.n_list.len() != 1 {
        return Err(ConfigError::SingleSizeRequired {
            experiment: "interlace",
            got: cfg.n_list.len(),
        }
        .into());
    }
    if cfg.replicates < INTERLACE_MIN_REPS {
        return Err(ConfigError::TooFewReplicates {
            experiment: "interlace",
            need: INTERLACE_MIN_REPS,
            got: cfg.replicates,
        }
        .into());
    }
    let n = cfg.single_n();
    if n > INTERLACE_N_CAP {
        return Err(ConfigError::NCapExceeded {
            experiment: "interlace",
            cap: INTERLACE_N_CAP,
            got: n,
        }
        .into());
    }
    // the experiment is defined on the tridiagonal Gaussian route
    if cfg.ensemble != EnsembleId::GueTridiag {
        return Err(ConfigError::WrongEnsemble {
            experiment: "interlace",
            need: "gue-tridiag",
            got: cfg.ensemble,
        }
        .into());
    }

    let t0 = Instant::now();
    let sqrt_n = (n as f64).sqrt();
    let threshold = cfg.y * sqrt_n;
    let tol = cfg.eigen_tol * sqrt_n;
    let second_size = match recipe {
        InterlaceRecipe::Matched => n + 1,
        InterlaceRecipe::Control => n,
    };
    let outcomes: Vec<Result<Outcome, SpectralError>> =
        map_replicates(cfg.replicates, cfg.threads, |r| {
            let seed = cfg.master_seed;
            let goe_a = wigner_core::ensembles::sample_tridiagonal_beta(
                n,
                Beta::One,
                SeedStream::new(seed, 3 * r),
            )
            .expect("validated");
            let goe_b = wigner_core::ensembles::sample_tridiagonal_beta(
                second_size,
                Beta::One,
                SeedStream::new(seed, 3 * r + 1),
            )
            .expect("validated");
            let gue = wigner_core::ensembles::sample_tridiagonal_beta(
                n,
                Beta::Two,
                SeedStream::new(seed, 3 * r + 2),
            )
            .expect("validated");

            let ev_a = all_eigenvalues(&goe_a, tol)?;
            let ev_b = all_eigenvalues(&goe_b, tol)?;
            let ev_g = all_eigenvalues(&gue, tol)?;

            let mut merged: Vec<f64> = ev_a
                .values()
                .iter()
                .chain(ev_b.values())
                .copied()
                .collect();
            merged.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            // even 1-based positions 2, 4, .., 2n
            let kept: Vec<f64> = merged
                .iter()
                .enumerate()
                .filter_map(|(idx, &v)| (idx % 2 == 1 && idx < 2 * n).then_some(v))
                .collect();
            debug_assert_eq!(kept.len(), n);

            let kept_count = kept.len() - kept.partition_point(|&v| v < threshold);
            let gue_values = ev_g.values();
            let gue_count = gue_values.len() - gue_values.partition_point(|&v| v < threshold);
            Ok(Outcome {
                kept_count,
                kept_median: median(&kept) / sqrt_n,
                gue_count,
                gue_median: median(gue_values) / sqrt_n,
            })
        });
    let mut results = Vec::with_capacity(outcomes.len());
    for out in outcomes {
        results.push(out?);
    }

    let kept_counts: Vec<f64> = results.iter().map(|o| o.kept_count as f64).collect();
    let gue_counts: Vec<f64> = results.iter().map(|o| o.gue_count as f64).collect();
    let kept_medians: Vec<f64> = results.iter().map(|o| o.kept_median).collect();
    let gue_medians: Vec<f64> = results.iter().map(|o| o.gue_median).collect();

    let count_ks = ks_two_sample(
        &sample_set(kept_counts.clone())?,
        &sample_set(gue_counts.clone())?,
    )?;
    let median_ks = ks_two_sample(
        &sample_set(kept_medians.clone())?,
        &sample_set(gue_medians.clone())?,
    )?;

    let moments_of = |values: &[f64]| {
        MomentsSummary::from_moments(
            &tree_reduce(
                values.iter().map(|&x| StreamingMoments::of(x)).collect(),
                |a: StreamingMoments, b| a.merge(&b),
            )
            .expect("nonempty"),
        )
    };
    let kept_count_moments = moments_of(&kept_counts);

    let verdicts = build_verdicts(recipe, count_ks, median_ks);
    let passed = verdicts.iter().all(|v| v.passed);
    let timing = Timing {
        total_seconds: t0.elapsed().as_secs_f64(),
        per_n_seconds: vec![(n, t0.elapsed().as_secs_f64())],
    };
    let result = NResult {
        n,
        statistic: "kept-count".into(),
        moments: kept_count_moments,
        theory: predict(n, cfg.y, Beta::Two)?,
        z_theory: Vec::new(),
        z_empirical: Vec::new(),
        ks_theory: None,
        ks_empirical: None,
        lattice_d: None,
        skewness: None,
        variance_undefined: false,
    };
    Ok(ExperimentReport {
        experiment: "interlace".into(),
        config: ConfigEcho::from_config(cfg),
        results: vec![result],
        details: Details::Interlacing {
            control: recipe == InterlaceRecipe::Control,
            count_ks,
            median_ks,
            kept_count: moments_of(&kept_counts),
            reference_count: moments_of(&gue_counts),
            kept_median: moments_of(&kept_medians),
            reference_median: moments_of(&gue_medians),
        },
        verdicts,
        passed,
        timing,
    })
}

fn build_verdicts(recipe: InterlaceRecipe, count_ks: KsResult, median_ks: KsResult) -> Vec<Verdict> {
    match recipe {
        InterlaceRecipe::Matched => vec![
            Verdict::new(
                "count-ks-not-rejected",
                count_ks.p_approx,
                Comparison::Ge,
                ALPHA,
                "two-sample KS p-value, kept-set count vs GUE count",
            ),
            Verdict::new(
                "median-ks-not-rejected",
                median_ks.p_approx,
                Comparison::Ge,
                ALPHA,
                "two-sample KS p-value, kept-set median vs GUE median",
            ),
        ],
        InterlaceRecipe::Control => vec![
            Verdict::new(
                "control-count-ks-rejects",
                count_ks.p_approx,
                Comparison::Le,
                ALPHA,
                "the wrong recipe must be detected",
            ),
            Verdict::new(
                "control-median-ks-rejects",
                median_ks.p_approx,
                Comparison::Le,
                ALPHA,
                "the wrong recipe must be detected",
            ),
        ],
    }
}
