//! CLT experiment: two z-score families per replicate set — standardized by
//! the empirical mean/std and by the theory prediction — each tested against
//! the standard normal.

use std::time::Instant;

use crate::config::{ConfigError, ExperimentConfig, CLT_MIN_REPS};
use crate::report::{Comparison, ConfigEcho, Details, ExperimentReport, Timing, Verdict};

use super::counting::{counts_for_n, lattice_distance};
use super::RunError;

/// KS distance limit (harness constant).
pub const KS_D_LIMIT: f64 = 0.02;
/// Sample skewness limit (harness constant).
pub const SKEWNESS_LIMIT: f64 = 0.1;

pub fn run_clt(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate_common()?;
    if cfg.replicates < CLT_MIN_REPS {
        return Err(ConfigError::TooFewReplicates {
            experiment: "clt",
            need: CLT_MIN_REPS,
            got: cfg.replicates,
        }
        .into());
    }

    let t0 = Instant::now();
    let mut timing = Timing::default();
    let mut results = Vec::new();
    let mut verdicts = Vec::new();
    for &n in &cfg.n_list {
        let tn = Instant::now();
        let data = counts_for_n(cfg, n)?;
        timing.per_n_seconds.push((n, tn.elapsed().as_secs_f64()));
        let mut result = data.result;

        let variance = result.moments.variance.unwrap_or(0.0);
        if variance <= 0.0 {
            return Err(RunError::InsufficientData(format!(
                "counting statistic is degenerate at n={n}: zero sample variance over {} replicates",
                cfg.replicates
            )));
        }
        let sd = variance.sqrt();
        let lattice = lattice_distance(&data.counts, result.moments.mean, sd);
        result.lattice_d = Some(lattice);

        let ks_emp = result
            .ks_empirical
            .expect("enough replicates for the KS statistic");
        let ks_th = result.ks_theory.expect("enough replicates");
        let skew = result.skewness.expect("three or more replicates");

        verdicts.push(Verdict::new(
            &format!("ks-empirical-n{n}"),
            ks_emp.d,
            Comparison::Le,
            KS_D_LIMIT,
            "sup-distance of empirically standardized z-scores to the normal CDF; \
             saturates near max-mass/2 for an integer statistic with O(1) sigma",
        ));
        verdicts.push(Verdict::new(
            &format!("ks-theory-n{n}"),
            ks_th.d,
            Comparison::Le,
            KS_D_LIMIT,
            "sup-distance of theory-normalized z-scores to the normal CDF",
        ));
        verdicts.push(Verdict::new(
            &format!("lattice-ks-n{n}"),
            lattice,
            Comparison::Le,
            KS_D_LIMIT,
            "continuity-corrected distance at attained integers",
        ));
        verdicts.push(Verdict::new(
            &format!("skewness-n{n}"),
            skew.abs(),
            Comparison::Le,
            SKEWNESS_LIMIT,
            "absolute sample skewness of the counts",
        ));
        results.push(result);
    }
    timing.total_seconds = t0.elapsed().as_secs_f64();
    let passed = verdicts.iter().all(|v| v.passed);
    Ok(ExperimentReport {
        experiment: "clt".into(),
        config: ConfigEcho::from_config(cfg),
        results,
        details: Details::Clt,
        verdicts,
        passed,
        timing,
    })
}
