//! Variance-slope experiment: estimate Var(Y_n) on a geometric ladder of
//! sizes and regress against ln n. The β = 2 target slope is 1/(2π²), the
//! β = 1 target is 1/π².

use std::f64::consts::PI;
use std::time::Instant;

use wigner_core::stats::regress_slope;
use wigner_core::Beta;

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{
    Comparison, ConfigEcho, Details, ExperimentReport, SlopePoint, Timing, Verdict,
};

use super::counting::counts_for_n;
use super::RunError;

/// Relative slope tolerance (harness constant from pilot-run variability).
pub const SLOPE_REL_TOL: f64 = 0.12;
/// Minimum regression quality.
pub const R2_MIN: f64 = 0.95;

pub fn slope_target(beta: Beta) -> f64 {
    match beta {
        Beta::Two => 1.0 / (2.0 * PI * PI),
        Beta::One => 1.0 / (PI * PI),
    }
}

fn validate_geometric(n_list: &[usize]) -> Result<(), ConfigError> {
    if n_list.len() < 3 {
        return Err(ConfigError::TooFewSizes(n_list.len()));
    }
    let ratios: Vec<f64> = n_list
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect();
    let first = ratios[0];
    let geometric = first >= 1.5
        && ratios
            .iter()
            .all(|&r| (r / first - 1.0).abs() <= 0.1);
    if !geometric {
        return Err(ConfigError::NotGeometric(n_list.to_vec()));
    }
    Ok(())
}

pub fn run_variance_slope(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate_common()?;
    validate_geometric(&cfg.n_list)?;
    if cfg.replicates < 2 {
        return Err(ConfigError::TooFewReplicates {
            experiment: "variance-slope",
            need: 2,
            got: cfg.replicates,
        }
        .into());
    }

    let t0 = Instant::now();
    let mut timing = Timing::default();
    let mut results = Vec::new();
    let mut points = Vec::new();
    for &n in &cfg.n_list {
        let tn = Instant::now();
        let data = counts_for_n(cfg, n)?;
        timing.per_n_seconds.push((n, tn.elapsed().as_secs_f64()));
        let variance = data
            .moments
            .sample_variance()
            .expect("two or more replicates");
        points.push(SlopePoint {
            n,
            ln_n: (n as f64).ln(),
            variance,
        });
        results.push(data.result);
    }
    let regression = regress_slope(
        &points
            .iter()
            .map(|p| (p.ln_n, p.variance))
            .collect::<Vec<_>>(),
    )?;
    let target = slope_target(cfg.ensemble.beta());
    let relative_error = (regression.slope / target - 1.0).abs();

    let verdicts = vec![
        Verdict::new(
            "slope-relative-error",
            relative_error,
            Comparison::Le,
            SLOPE_REL_TOL,
            "|slope/target - 1| for Var(Y_n) against ln n",
        ),
        Verdict::new(
            "regression-r2",
            regression.r2,
            Comparison::Ge,
            R2_MIN,
            "ordinary least squares fit quality",
        ),
    ];
    timing.total_seconds = t0.elapsed().as_secs_f64();
    let passed = verdicts.iter().all(|v| v.passed);
    Ok(ExperimentReport {
        experiment: "variance-slope".into(),
        config: ConfigEcho::from_config(cfg),
        results,
        details: Details::VarianceSlope {
            points,
            regression,
            slope_target: target,
            relative_error,
        },
        verdicts,
        passed,
        timing,
    })
}
