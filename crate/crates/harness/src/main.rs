//! `wigner-lab`: Monte Carlo experiments on eigenvalue counting statistics
//! of Wigner random matrices.
//!
//! Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 usage error,
//! 3 numerical/runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wigner_core::ensembles::{gue_matched_three_point, verify_moment_match, EntryDistribution};
use wigner_core::semicircle::predict;

use wigner_harness::config::{ConfigOverlay, EnsembleId, ExperimentConfig, OutputFormat};
use wigner_harness::experiments::{
    run_clt, run_counting, run_fluctuation, run_interlacing, run_rigidity, run_universality,
    run_variance_slope, InterlaceRecipe, RunError,
};
use wigner_harness::report::ExperimentReport;
use wigner_harness::svg;

#[derive(Parser)]
#[command(
    name = "wigner-lab",
    version,
    about = "Monte Carlo laboratory for eigenvalue counting statistics of Wigner matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample N_{[y,∞)} of the normalized spectrum over many replicates.
    Counting(RunArgs),
    /// Estimate Var(N) across a geometric ladder of sizes and regress
    /// against ln n.
    VarianceSlope(RunArgs),
    /// Test the counting statistic against the normal law (two z-score
    /// families).
    Clt(RunArgs),
    /// Bulk eigenvalue fluctuations around the classical location t(i/n).
    Fluctuation(RunArgs),
    /// Full-spectrum deviation profile against the rigidity window.
    Rigidity(RunArgs),
    /// Even-position superposition of GOE_n and GOE_{n+1} against GUE_n
    /// (tridiagonal route).
    Interlace(InterlaceArgs),
    /// Moment-matched ensemble against the dense Gaussian reference.
    Universality(RunArgs),
    /// Print the asymptotic prediction for one (n, y, beta).
    Predict(PredictArgs),
    /// Print the GUE-matched three-point laws and their moment tables.
    MatchMoments(MatchMomentsArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Ensemble: gue-tridiag | goe-tridiag | gue-dense | goe-dense |
    /// wigner-threepoint | wigner-rademacher
    #[arg(long)]
    ensemble: Option<EnsembleId>,
    /// Matrix size; repeat for a ladder (variance-slope)
    #[arg(long = "n")]
    n: Vec<usize>,
    /// Left end of the counting interval [y, ∞)
    #[arg(long)]
    y: Option<f64>,
    /// Monte Carlo replicates
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed; replicate k draws from (seed, k)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores, 1 = sequential)
    #[arg(long)]
    threads: Option<usize>,
    /// Eigenvalue index for fluctuation runs (1-based; default n/2)
    #[arg(long)]
    index: Option<usize>,
    /// Bulk margin for rigidity runs
    #[arg(long)]
    epsilon: Option<f64>,
    /// Rigidity window constant C
    #[arg(long = "rigidity-c")]
    rigidity_c: Option<f64>,
    /// Eigenvalue tolerance on the normalized scale
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Write a z-score histogram (with normal overlay) here
    #[arg(long)]
    svg: Option<PathBuf>,
    /// key=value config file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct InterlaceArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Replace GOE_{n+1} by a second GOE_n (the wrong recipe; the KS tests
    /// must then reject)
    #[arg(long)]
    negative_control: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Ensemble that fixes beta
    #[arg(long, default_value = "gue-tridiag")]
    ensemble: EnsembleId,
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    y: f64,
}

#[derive(Args)]
struct MatchMomentsArgs {
    /// Target variances for the matched three-point laws
    #[arg(long = "variance", default_values_t = [0.5, 1.0])]
    variances: Vec<f64>,
    /// Comparison order for the moment tables
    #[arg(long, default_value_t = 6)]
    order: usize,
}

impl RunArgs {
    fn overlay(&self) -> ConfigOverlay {
        ConfigOverlay {
            ensemble: self.ensemble,
            n_list: (!self.n.is_empty()).then(|| self.n.clone()),
            y: self.y,
            replicates: self.reps,
            master_seed: self.seed,
            threads: self.threads,
            eigen_tol: self.tol,
            epsilon: self.epsilon,
            rigidity_c: self.rigidity_c,
            index: self.index,
            format: self.format,
            out: self.out.clone(),
            svg: self.svg.clone(),
        }
    }

    /// defaults <- config file <- CLI flags
    fn resolve(
        &self,
        defaults: ExperimentConfig,
    ) -> Result<(ExperimentConfig, ConfigOverlay), wigner_harness::ConfigError> {
        let file_overlay = match &self.config {
            Some(path) => ConfigOverlay::from_file(path)?,
            None => ConfigOverlay::default(),
        };
        let merged = file_overlay.merged_with(self.overlay());
        let cfg = merged.clone().over(defaults);
        Ok((cfg, merged))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.command {
        Command::Counting(args) => {
            run_and_emit_with(&args, ExperimentConfig::default(), run_counting)
        }
        Command::VarianceSlope(args) => {
            run_and_emit_with(&args, ExperimentConfig::default(), run_variance_slope)
        }
        Command::Clt(args) => {
            let defaults = ExperimentConfig {
                replicates: 20_000,
                n_list: vec![16384],
                ..Default::default()
            };
            run_and_emit_with(&args, defaults, run_clt)
        }
        Command::Fluctuation(args) => {
            let defaults = ExperimentConfig {
                n_list: vec![16384],
                replicates: 20_000,
                ..Default::default()
            };
            run_and_emit_with(&args, defaults, run_fluctuation)
        }
        Command::Rigidity(args) => {
            let defaults = ExperimentConfig {
                n_list: vec![16384],
                replicates: 200,
                ..Default::default()
            };
            run_and_emit_with(&args, defaults, run_rigidity)
        }
        Command::Interlace(args) => {
            let recipe = if args.negative_control {
                InterlaceRecipe::Control
            } else {
                InterlaceRecipe::Matched
            };
            let defaults = ExperimentConfig {
                n_list: vec![256],
                replicates: 4000,
                ..Default::default()
            };
            run_and_emit_with(&args.run, defaults, move |cfg| run_interlacing(cfg, recipe))
        }
        Command::Universality(args) => {
            let defaults = ExperimentConfig {
                ensemble: EnsembleId::WignerThreepoint,
                n_list: vec![512],
                replicates: 4000,
                ..Default::default()
            };
            run_and_emit_with(&args, defaults, run_universality)
        }
        Command::Predict(args) => {
            let prediction = predict(args.n, args.y, args.ensemble.beta())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&prediction).expect("prediction serializes")
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::MatchMoments(args) => {
            let mut tables = Vec::new();
            for &variance in &args.variances {
                let law = gue_matched_three_point(variance).map_err(|e| {
                    RunError::InsufficientData(format!("invalid variance {variance}: {e}"))
                })?;
                let gaussian = EntryDistribution::gaussian(variance).map_err(|e| {
                    RunError::InsufficientData(format!("invalid variance {variance}: {e}"))
                })?;
                let report = verify_moment_match(&law, &gaussian, args.order.max(1))
                    .expect("order validated");
                tables.push(serde_json::json!({
                    "target_variance": variance,
                    "law": law.describe(),
                    "comparison_vs_gaussian": report,
                }));
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&tables).expect("tables serialize")
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_and_emit_with(
    args: &RunArgs,
    defaults: ExperimentConfig,
    runner: impl Fn(&ExperimentConfig) -> Result<ExperimentReport, RunError>,
) -> Result<ExitCode, RunError> {
    let (cfg, overlay) = args.resolve(defaults)?;
    let report = runner(&cfg)?;

    let format = overlay.format.unwrap_or_default();
    match &overlay.out {
        Some(path) => report
            .write_to(path, format)
            .map_err(|e| RunError::InsufficientData(format!("cannot write {path:?}: {e}")))?,
        None => print!("{}", report.render(format)),
    }
    if let Some(path) = &overlay.svg {
        let z = report
            .results
            .first()
            .map(|r| {
                if r.z_empirical.is_empty() {
                    r.z_theory.as_slice()
                } else {
                    r.z_empirical.as_slice()
                }
            })
            .unwrap_or(&[]);
        let title = format!(
            "{} {} n={}",
            report.experiment,
            report.config.ensemble,
            report.results.first().map(|r| r.n).unwrap_or(0)
        );
        std::fs::write(path, svg::zscore_histogram(z, &title))
            .map_err(|e| RunError::InsufficientData(format!("cannot write {path:?}: {e}")))?;
    }
    eprintln!("{}", report.summary_line());
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
