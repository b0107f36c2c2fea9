//! Experiment reports: a serializable record of configuration, per-n
//! statistics, test results and verdicts.
//!
//! JSON serialization is canonical and deterministic: field order is fixed,
//! floats use shortest round-trip formatting, and execution metadata that
//! varies between runs (wall-clock timings, worker count) is deliberately
//! excluded so that reports from the same (config, seed) compare bit-equal.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wigner_core::semicircle::TheoryPrediction;
use wigner_core::stats::{KsResult, Regression, StreamingMoments};

use crate::config::{EnsembleId, ExperimentConfig, OutputFormat};

/// Columns of CSV schema v1, in order.
pub const CSV_HEADER: &str = "experiment,ensemble,beta,n,y,replicates,seed,mean,var,theory_mean,theory_var,ks_d,ks_p,slope,slope_target,verdict";

/// Shortest round-trip decimal, switching to scientific notation for
/// extreme magnitudes so CSV cells stay readable.
fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && (a < 1e-4 || a >= 1e15) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Scientific configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub ensemble: EnsembleId,
    pub beta: u8,
    pub n_list: Vec<usize>,
    pub y: f64,
    pub replicates: usize,
    pub seed: u64,
    pub eigen_tol: f64,
    pub epsilon: f64,
    pub rigidity_c: f64,
    pub index: Option<usize>,
}

impl ConfigEcho {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            ensemble: cfg.ensemble,
            beta: cfg.ensemble.beta().as_int(),
            n_list: cfg.n_list.clone(),
            y: cfg.y,
            replicates: cfg.replicates,
            seed: cfg.master_seed,
            eigen_tol: cfg.eigen_tol,
            epsilon: cfg.epsilon,
            rigidity_c: cfg.rigidity_c,
            index: cfg.index,
        }
    }
}

/// Plain-data snapshot of a [`StreamingMoments`] accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentsSummary {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance; absent below two samples.
    pub variance: Option<f64>,
    pub min: f64,
    pub max: f64,
}

impl MomentsSummary {
    pub fn from_moments(m: &StreamingMoments) -> Self {
        assert!(m.count() > 0, "summary of an empty accumulator");
        Self {
            count: m.count(),
            mean: m.mean().unwrap(),
            variance: m.sample_variance(),
            min: m.min().unwrap(),
            max: m.max().unwrap(),
        }
    }

    pub fn std_error(&self) -> Option<f64> {
        self.variance.map(|v| (v / self.count as f64).sqrt())
    }
}

/// Statistics for one matrix size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NResult {
    pub n: usize,
    /// What the moments describe: "count", "eigenvalue", "max-deviation", ...
    pub statistic: String,
    pub moments: MomentsSummary,
    pub theory: TheoryPrediction,
    /// Sorted z-scores normalized by the theory prediction (empty when the
    /// experiment does not produce them).
    #[serde(default)]
    pub z_theory: Vec<f64>,
    /// Sorted z-scores standardized by the empirical mean/std.
    #[serde(default)]
    pub z_empirical: Vec<f64>,
    pub ks_theory: Option<KsResult>,
    pub ks_empirical: Option<KsResult>,
    /// Lattice-aware alternative to `ks_empirical` for integer statistics:
    /// empirical CDF at each attained integer against the continuity-
    /// corrected normal. The plain KS statistic saturates near max-mass/2
    /// when σ is O(1), so this is the shape distance that can converge.
    pub lattice_d: Option<f64>,
    pub skewness: Option<f64>,
    /// Set when a single replicate makes the variance estimate undefined.
    #[serde(default)]
    pub variance_undefined: bool,
}

/// One point of the variance-vs-log-size regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePoint {
    pub n: usize,
    pub ln_n: f64,
    pub variance: f64,
}

/// Deviation profile on a decimated, symmetry-closed index grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub indices: Vec<usize>,
    pub mean_dev: Vec<f64>,
    pub se_dev: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexProbe {
    pub index: usize,
    pub p_matched: f64,
    pub p_reference: f64,
    pub diff: f64,
    pub combined_se: f64,
}

/// Experiment-specific payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Details {
    Counting,
    VarianceSlope {
        points: Vec<SlopePoint>,
        regression: Regression,
        slope_target: f64,
        relative_error: f64,
    },
    Clt,
    Fluctuation {
        index: usize,
        center: f64,
        theory_std: f64,
        sample_std: f64,
        std_ratio: f64,
    },
    Rigidity {
        epsilon: f64,
        c: f64,
        bulk_first: usize,
        bulk_last: usize,
        /// (ln n)²/n, the acceptance envelope for the max bulk deviation.
        log_sq_window: f64,
        frac_replicates_within_log_sq_window: f64,
        /// Fraction of replicates with at least one index outside the
        /// configured rigidity window.
        violation_replicate_fraction: f64,
        violating_indices_total: u64,
        /// Qualitative comparison point: bulk size · n⁻³ per replicate.
        expected_violations_per_replicate_bound: f64,
        /// OLS exponent of ln(mean deviation) against ln(min(i, n−i+1)).
        fitted_exponent: f64,
        profile: ProfileSummary,
    },
    Interlacing {
        control: bool,
        count_ks: KsResult,
        median_ks: KsResult,
        kept_count: MomentsSummary,
        reference_count: MomentsSummary,
        kept_median: MomentsSummary,
        reference_median: MomentsSummary,
    },
    Universality {
        reference: EnsembleId,
        matched_to_order: usize,
        verdict_claimed: bool,
        reference_moments: MomentsSummary,
        count_mean_diff: f64,
        count_combined_se: f64,
        variance_ratio: Option<f64>,
        probes: Vec<IndexProbe>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparison {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Le => value <= threshold,
            Comparison::Ge => value >= threshold,
        }
    }
}

/// A recorded pass/fail decision with its threshold, recomputable from the
/// stored value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub op: Comparison,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

impl Verdict {
    pub fn new(name: &str, value: f64, op: Comparison, threshold: f64, note: &str) -> Self {
        Self {
            name: name.to_string(),
            value,
            op,
            threshold,
            passed: op.holds(value, threshold),
            note: note.to_string(),
        }
    }
}

/// Wall-clock execution record; printed, never serialized.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_n_seconds: Vec<(usize, f64)>,
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}s total", self.total_seconds)?;
        if self.per_n_seconds.len() > 1 {
            write!(f, " (")?;
            for (i, (n, s)) in self.per_n_seconds.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "n={n}: {s:.2}s")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ConfigEcho,
    pub results: Vec<NResult>,
    pub details: Details,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    #[serde(skip)]
    pub timing: Timing,
}

impl ExperimentReport {
    /// Canonical JSON (compact, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// CSV schema v1: header plus one row per matrix size.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let (slope, slope_target) = match &self.details {
            Details::VarianceSlope {
                regression,
                slope_target,
                ..
            } => (Some(regression.slope), Some(*slope_target)),
            _ => (None, None),
        };
        for r in &self.results {
            let ks = match &self.details {
                Details::Interlacing { count_ks, .. } => Some(*count_ks),
                _ => r.ks_empirical.or(r.ks_theory),
            };
            let field = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                self.experiment,
                self.config.ensemble,
                self.config.beta,
                r.n,
                self.config.y,
                self.config.replicates,
                self.config.seed,
                fmt_f64(r.moments.mean),
                field(r.moments.variance),
                fmt_f64(r.theory.mean),
                fmt_f64(r.theory.variance),
                field(ks.map(|k| k.d)),
                field(ks.map(|k| k.p_approx)),
                field(slope),
                field(slope_target),
                if self.passed { "pass" } else { "fail" },
            ));
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn write_to(&self, path: &Path, format: OutputFormat) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render(format).as_bytes())
    }

    /// One-line human summary for stderr.
    pub fn summary_line(&self) -> String {
        let verdicts: Vec<String> = self
            .verdicts
            .iter()
            .map(|v| {
                format!(
                    "{}: {} ({:.6} {} {:.6})",
                    v.name,
                    if v.passed { "pass" } else { "FAIL" },
                    v.value,
                    match v.op {
                        Comparison::Le => "<=",
                        Comparison::Ge => ">=",
                    },
                    v.threshold
                )
            })
            .collect();
        format!(
            "{} [{}] {} | {}",
            self.experiment,
            if self.passed { "PASS" } else { "FAIL" },
            self.timing,
            if verdicts.is_empty() {
                "no verdicts claimed".to_string()
            } else {
                verdicts.join("; ")
            }
        )
    }
}
