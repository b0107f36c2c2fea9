//! Counting experiment: per replicate, draw the ensemble, normalize by √n
//! and record N_{[y, ∞)}; accumulate moments and z-scores.

use std::time::Instant;

use wigner_core::semicircle::{clt_normalize, predict, TheoryPrediction};
use wigner_core::spectral::counting_function;
use wigner_core::stats::{ks_one_sample, normal_cdf, sample_skewness, tree_reduce, StreamingMoments};
use wigner_core::SeedStream;

use crate::config::ExperimentConfig;
use crate::driver::map_replicates;
use crate::report::{
    Comparison, ConfigEcho, Details, ExperimentReport, MomentsSummary, NResult, Timing, Verdict,
};

use super::{sample_reduced, sample_set, RunError};

/// Mean-consistency envelope in standard errors (harness constant from
/// pilot-run variability; the prediction itself is leading-order).
pub const MEAN_SE_LIMIT: f64 = 4.0;

pub(crate) struct CountData {
    pub counts: Vec<usize>,
    pub theory: TheoryPrediction,
    pub moments: StreamingMoments,
    pub result: NResult,
}

/// Core of every counting-style experiment: all replicate counts for one
/// matrix size plus the assembled per-n result.
pub(crate) fn counts_for_n(cfg: &ExperimentConfig, n: usize) -> Result<CountData, RunError> {
    let theory = predict(n, cfg.y, cfg.ensemble.beta())?;
    let counts: Vec<usize> = map_replicates(cfg.replicates, cfg.threads, |r| {
        let t = sample_reduced(cfg.ensemble, n, SeedStream::new(cfg.master_seed, r));
        counting_function(&t, cfg.y, true)
    });
    let moments = tree_reduce(
        counts.iter().map(|&c| StreamingMoments::of(c as f64)).collect(),
        |a, b| a.merge(&b),
    )
    .expect("at least one replicate");

    let z_theory_set = sample_set(counts.iter().map(|&c| clt_normalize(c, &theory)).collect())?;
    let mean = moments.mean().expect("nonempty");
    let variance = moments.sample_variance();
    let sd = variance.unwrap_or(0.0).sqrt();
    let z_empirical_set = if sd > 0.0 {
        Some(sample_set(
            counts.iter().map(|&c| (c as f64 - mean) / sd).collect(),
        )?)
    } else {
        None
    };

    let ks_theory = ks_one_sample(&z_theory_set).ok();
    let ks_empirical = z_empirical_set.as_ref().and_then(|s| ks_one_sample(s).ok());
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let skewness = sample_skewness(&values);

    let result = NResult {
        n,
        statistic: "count".into(),
        moments: MomentsSummary::from_moments(&moments),
        theory,
        z_theory: z_theory_set.sorted_values().to_vec(),
        z_empirical: z_empirical_set
            .map(|s| s.sorted_values().to_vec())
            .unwrap_or_default(),
        ks_theory,
        ks_empirical,
        lattice_d: None,
        skewness,
        variance_undefined: variance.is_none(),
    };
    Ok(CountData {
        counts,
        theory,
        moments,
        result,
    })
}

/// Lattice-aware shape distance for an integer statistic: empirical CDF at
/// every attained value k against Φ((k + 1/2 − mean)/sd).
pub(crate) fn lattice_distance(counts: &[usize], mean: f64, sd: f64) -> f64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let m = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let k = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == k {
            j += 1;
        }
        let f_emp = j as f64 / m;
        let phi = normal_cdf((k as f64 + 0.5 - mean) / sd);
        d = d.max((f_emp - phi).abs());
        i = j;
    }
    d
}

pub fn run_counting(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate_common()?;
    let t0 = Instant::now();
    let mut results = Vec::new();
    let mut verdicts = Vec::new();
    let mut timing = Timing::default();
    for &n in &cfg.n_list {
        let tn = Instant::now();
        let data = counts_for_n(cfg, n)?;
        timing.per_n_seconds.push((n, tn.elapsed().as_secs_f64()));
        if let Some(se) = data.result.moments.std_error() {
            if se > 0.0 {
                verdicts.push(Verdict::new(
                    &format!("mean-consistent-n{n}"),
                    (data.result.moments.mean - data.theory.mean).abs() / se,
                    Comparison::Le,
                    MEAN_SE_LIMIT,
                    "|mean - predicted mean| in standard errors; leading-order prediction",
                ));
            }
        }
        results.push(data.result);
    }
    timing.total_seconds = t0.elapsed().as_secs_f64();
    let passed = verdicts.iter().all(|v| v.passed);
    Ok(ExperimentReport {
        experiment: "counting".into(),
        config: ConfigEcho::from_config(cfg),
        results,
        details: Details::Counting,
        verdicts,
        passed,
        timing,
    })
}
