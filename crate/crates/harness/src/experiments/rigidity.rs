//! Rigidity experiment: full normalized spectra, per-index deviations from
//! the classical locations, and violation counts against the polylog window
//! (ln n)^{C ln ln n} · min(i, n−i+1)^{−1/3} · n^{−2/3}.

use std::time::Instant;

use wigner_core::semicircle::{predict, quantile, rigidity_window};
use wigner_core::spectral::all_eigenvalues;
use wigner_core::stats::{regress_slope, tree_reduce, StreamingMoments};
use wigner_core::SeedStream;

use crate::config::{ConfigError, ExperimentConfig, RIGIDITY_REPS_CAP};
use crate::driver::map_replicates;
use crate::report::{
    Comparison, ConfigEcho, Details, ExperimentReport, MomentsSummary, NResult, ProfileSummary,
    Timing, Verdict,
};

use super::{sample_reduced, RunError};

/// Required fraction of replicates whose max bulk deviation stays inside
/// (ln n)²/n (harness constant).
pub const LOG_SQ_FRACTION_MIN: f64 = 0.99;
/// Grid size cap for the serialized deviation profile.
const PROFILE_POINTS: usize = 256;

struct ReplicateOutcome {
    max_dev: f64,
    violations: u64,
    /// |λ_i − t(i/n)| over the bulk indices.
    profile: Vec<f64>,
}

struct ProfileAcc {
    count: u64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl ProfileAcc {
    fn from_profile(profile: &[f64]) -> Self {
        Self {
            count: 1,
            sum: profile.to_vec(),
            sum_sq: profile.iter().map(|&x| x * x).collect(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self
    }
}

pub fn run_rigidity(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate_common()?;
    if cfg.n_list.len() != 1 {
        return Err(ConfigError::SingleSizeRequired {
            experiment: "rigidity",
            got: cfg.n_list.len(),
        }
        .into());
    }
    if cfg.replicates > RIGIDITY_REPS_CAP {
        return Err(ConfigError::TooManyReplicates {
            experiment: "rigidity",
            cap: RIGIDITY_REPS_CAP,
            got: cfg.replicates,
        }
        .into());
    }
    let n = cfg.single_n();
    let nf = n as f64;
    let bulk_first = (cfg.epsilon * nf).ceil() as usize;
    let bulk_last = ((1.0 - cfg.epsilon) * nf).floor() as usize;
    if bulk_first < 1 || bulk_last <= bulk_first {
        return Err(ConfigError::EpsilonOutOfRange(cfg.epsilon).into());
    }
    let bulk_len = bulk_last - bulk_first + 1;

    // classical locations and windows are shared read-only across replicates
    let mut centers = Vec::with_capacity(bulk_len);
    let mut windows = Vec::with_capacity(bulk_len);
    for i in bulk_first..=bulk_last {
        centers.push(quantile(i as f64 / nf)?);
        windows.push(rigidity_window(i, n, cfg.rigidity_c));
    }

    let t0 = Instant::now();
    let sqrt_n = nf.sqrt();
    let tol = cfg.eigen_tol * sqrt_n;
    let outcomes: Vec<Result<ReplicateOutcome, wigner_core::spectral::SpectralError>> =
        map_replicates(cfg.replicates, cfg.threads, |r| {
            let t = sample_reduced(cfg.ensemble, n, SeedStream::new(cfg.master_seed, r));
            let spectrum = all_eigenvalues(&t, tol)?.into_normalized();
            let values = spectrum.values();
            let mut profile = Vec::with_capacity(bulk_len);
            let mut max_dev: f64 = 0.0;
            let mut violations = 0u64;
            for (k, i) in (bulk_first..=bulk_last).enumerate() {
                let dev = (values[i - 1] - centers[k]).abs();
                profile.push(dev);
                max_dev = max_dev.max(dev);
                if dev >= windows[k] {
                    violations += 1;
                }
            }
            Ok(ReplicateOutcome {
                max_dev,
                violations,
                profile,
            })
        });
    let mut replicates = Vec::with_capacity(outcomes.len());
    for out in outcomes {
        replicates.push(out?);
    }

    let max_dev_moments = tree_reduce(
        replicates
            .iter()
            .map(|o| StreamingMoments::of(o.max_dev))
            .collect(),
        |a, b| a.merge(&b),
    )
    .expect("at least one replicate");
    let profile_acc = tree_reduce(
        replicates
            .iter()
            .map(|o| ProfileAcc::from_profile(&o.profile))
            .collect(),
        ProfileAcc::merge,
    )
    .expect("at least one replicate");

    let reps = cfg.replicates as f64;
    let log_sq_window = nf.ln().powi(2) / nf;
    let within = replicates
        .iter()
        .filter(|o| o.max_dev <= log_sq_window)
        .count() as f64
        / reps;
    let violating_total: u64 = replicates.iter().map(|o| o.violations).sum();
    let violation_replicate_fraction =
        replicates.iter().filter(|o| o.violations > 0).count() as f64 / reps;

    // per-index mean and standard error of the deviation
    let mean_dev: Vec<f64> = profile_acc.sum.iter().map(|s| s / reps).collect();
    let se_dev: Vec<f64> = profile_acc
        .sum_sq
        .iter()
        .zip(&mean_dev)
        .map(|(&sq, &m)| {
            if cfg.replicates >= 2 {
                (((sq / reps - m * m).max(0.0)) * reps / (reps - 1.0) / reps).sqrt()
            } else {
                0.0
            }
        })
        .collect();

    // diagnostic exponent: ln(mean dev) against ln(min(i, n-i+1))
    let fit_points: Vec<(f64, f64)> = (bulk_first..=bulk_last)
        .zip(&mean_dev)
        .filter(|&(_, &m)| m > 0.0)
        .map(|(i, &m)| ((i.min(n - i + 1) as f64).ln(), m.ln()))
        .collect();
    let fitted_exponent = regress_slope(&fit_points).map(|r| r.slope).unwrap_or(0.0);

    // decimated, symmetry-closed profile grid
    let mut grid: Vec<usize> = Vec::new();
    let steps = PROFILE_POINTS.min(bulk_len) / 2;
    for k in 0..steps.max(1) {
        let off = if steps > 1 {
            (k as f64 / (steps - 1) as f64 * (bulk_len - 1) as f64).round() as usize
        } else {
            0
        };
        let i = bulk_first + off;
        grid.push(i);
        let mirror = n + 1 - i;
        if (bulk_first..=bulk_last).contains(&mirror) {
            grid.push(mirror);
        }
    }
    grid.sort_unstable();
    grid.dedup();
    let profile = ProfileSummary {
        indices: grid.clone(),
        mean_dev: grid.iter().map(|&i| mean_dev[i - bulk_first]).collect(),
        se_dev: grid.iter().map(|&i| se_dev[i - bulk_first]).collect(),
    };

    let verdicts = vec![Verdict::new(
        "max-dev-within-log-sq-window",
        within,
        Comparison::Ge,
        LOG_SQ_FRACTION_MIN,
        "fraction of replicates with max bulk |λ_i - t(i/n)| <= (ln n)²/n",
    )];
    let passed = verdicts.iter().all(|v| v.passed);
    let timing = Timing {
        total_seconds: t0.elapsed().as_secs_f64(),
        per_n_seconds: vec![(n, t0.elapsed().as_secs_f64())],
    };
    let result = NResult {
        n,
        statistic: "max-deviation".into(),
        moments: MomentsSummary::from_moments(&max_dev_moments),
        theory: predict(n, cfg.y, cfg.ensemble.beta())?,
        z_theory: Vec::new(),
        z_empirical: Vec::new(),
        ks_theory: None,
        ks_empirical: None,
        lattice_d: None,
        skewness: None,
        variance_undefined: max_dev_moments.sample_variance().is_none(),
    };
    Ok(ExperimentReport {
        experiment: "rigidity".into(),
        config: ConfigEcho::from_config(cfg),
        results: vec![result],
        details: Details::Rigidity {
            epsilon: cfg.epsilon,
            c: cfg.rigidity_c,
            bulk_first,
            bulk_last,
            log_sq_window,
            frac_replicates_within_log_sq_window: within,
            violation_replicate_fraction,
            violating_indices_total: violating_total,
            expected_violations_per_replicate_bound: bulk_len as f64 * nf.powi(-3),
            fitted_exponent,
            profile,
        },
        verdicts,
        passed,
        timing,
    })
}
