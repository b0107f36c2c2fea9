//! Experiment configuration: ensemble identifiers, validated parameter sets,
//! and the plain-text `key=value` config file format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wigner_core::Beta;

/// Dense sampling is capped here; the cubic reduction cost dominates beyond.
pub const DENSE_N_CAP: usize = 2048;
/// Full-spectrum experiments are capped to keep the suite affordable.
pub const RIGIDITY_REPS_CAP: usize = 1000;
pub const CLT_MIN_REPS: usize = 5000;
pub const INTERLACE_MIN_REPS: usize = 2000;
pub const INTERLACE_N_CAP: usize = 1024;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown ensemble `{0}` (expected gue-tridiag, goe-tridiag, gue-dense, goe-dense, wigner-threepoint or wigner-rademacher)")]
    UnknownEnsemble(String),
    #[error("replicates must be at least 1")]
    NoReplicates,
    #[error("at least one matrix size is required")]
    NoSizes,
    #[error("matrix size must be at least {need}, got {got}")]
    SizeTooSmall { got: usize, need: usize },
    #[error("location y={0} must lie strictly inside (-2, 2)")]
    YOutsideBulk(f64),
    #[error("epsilon={0} must lie in (0, 0.5)")]
    EpsilonOutOfRange(f64),
    #[error("rigidity constant must be positive, got {0}")]
    NonPositiveRigidityC(f64),
    #[error("eigenvalue tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("dense ensembles are capped at n <= {cap}, got {got}")]
    DenseCapExceeded { got: usize, cap: usize },
    #[error("{experiment} requires at least {need} replicates, got {got}")]
    TooFewReplicates {
        experiment: &'static str,
        need: usize,
        got: usize,
    },
    #[error("{experiment} is capped at {cap} replicates, got {got}")]
    TooManyReplicates {
        experiment: &'static str,
        cap: usize,
        got: usize,
    },
    #[error("{experiment} is capped at n <= {cap}, got {got}")]
    NCapExceeded {
        experiment: &'static str,
        cap: usize,
        got: usize,
    },
    #[error("variance-slope needs at least 3 sizes, got {0}")]
    TooFewSizes(usize),
    #[error("{experiment} runs on a single matrix size, got {got}")]
    SingleSizeRequired { experiment: &'static str, got: usize },
    #[error("sizes must be strictly increasing and geometrically spaced: {0:?}")]
    NotGeometric(Vec<usize>),
    #[error("fluctuation index {index} is outside the bulk window for n={n}")]
    IndexOutsideBulk { index: usize, n: usize },
    #[error("{experiment} requires ensemble {need}, got {got}")]
    WrongEnsemble {
        experiment: &'static str,
        need: &'static str,
        got: EnsembleId,
    },
    #[error("config file: {0}")]
    Io(String),
    #[error("config file line {line}: expected key=value, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config file line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config file line {line}: invalid value for `{key}`: {value}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
}

/// The six samplable ensembles exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleId {
    GueTridiag,
    GoeTridiag,
    GueDense,
    GoeDense,
    WignerThreepoint,
    WignerRademacher,
}

impl EnsembleId {
    pub const ALL: [EnsembleId; 6] = [
        EnsembleId::GueTridiag,
        EnsembleId::GoeTridiag,
        EnsembleId::GueDense,
        EnsembleId::GoeDense,
        EnsembleId::WignerThreepoint,
        EnsembleId::WignerRademacher,
    ];

    pub fn beta(self) -> Beta {
        match self {
            EnsembleId::GoeTridiag | EnsembleId::GoeDense => Beta::One,
            _ => Beta::Two,
        }
    }

    pub fn is_dense(self) -> bool {
        !matches!(self, EnsembleId::GueTridiag | EnsembleId::GoeTridiag)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleId::GueTridiag => "gue-tridiag",
            EnsembleId::GoeTridiag => "goe-tridiag",
            EnsembleId::GueDense => "gue-dense",
            EnsembleId::GoeDense => "goe-dense",
            EnsembleId::WignerThreepoint => "wigner-threepoint",
            EnsembleId::WignerRademacher => "wigner-rademacher",
        }
    }
}

impl fmt::Display for EnsembleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EnsembleId::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownEnsemble(s.to_string()))
    }
}

/// Output format for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// A fully resolved experiment configuration.
///
/// `threads` controls execution only; it never changes results and is not
/// part of the serialized config echo.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleId,
    pub n_list: Vec<usize>,
    pub y: f64,
    pub replicates: usize,
    pub master_seed: u64,
    pub threads: usize,
    /// Eigenvalue tolerance on the normalized scale (multiplied by √n for
    /// the unnormalized solvers).
    pub eigen_tol: f64,
    pub epsilon: f64,
    pub rigidity_c: f64,
    /// Target index for the fluctuation experiment (1-based); defaults to
    /// n/2 when unset.
    pub index: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ensemble: EnsembleId::GueTridiag,
            n_list: vec![1024],
            y: 0.0,
            replicates: 10_000,
            master_seed: 1,
            threads: 0,
            eigen_tol: 1e-10,
            epsilon: 0.1,
            rigidity_c: 1.0,
            index: None,
        }
    }
}

impl ExperimentConfig {
    /// Checks every constraint shared by all experiments.
    pub fn validate_common(&self) -> Result<(), ConfigError> {
        if self.replicates == 0 {
            return Err(ConfigError::NoReplicates);
        }
        if self.n_list.is_empty() {
            return Err(ConfigError::NoSizes);
        }
        for &n in &self.n_list {
            if n < 2 {
                return Err(ConfigError::SizeTooSmall { got: n, need: 2 });
            }
            if self.ensemble.is_dense() && n > DENSE_N_CAP {
                return Err(ConfigError::DenseCapExceeded {
                    got: n,
                    cap: DENSE_N_CAP,
                });
            }
        }
        if self.y.is_nan() || self.y <= -2.0 || self.y >= 2.0 {
            return Err(ConfigError::YOutsideBulk(self.y));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 || self.epsilon >= 0.5 {
            return Err(ConfigError::EpsilonOutOfRange(self.epsilon));
        }
        if self.rigidity_c.is_nan() || self.rigidity_c <= 0.0 {
            return Err(ConfigError::NonPositiveRigidityC(self.rigidity_c));
        }
        if self.eigen_tol.is_nan() || self.eigen_tol <= 0.0 {
            return Err(ConfigError::NonPositiveTolerance(self.eigen_tol));
        }
        Ok(())
    }

    pub fn single_n(&self) -> usize {
        self.n_list[0]
    }
}

/// Partial configuration from a config file or CLI flags. `None` means "not
/// provided here"; later layers override earlier ones field by field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverlay {
    pub ensemble: Option<EnsembleId>,
    pub n_list: Option<Vec<usize>>,
    pub y: Option<f64>,
    pub replicates: Option<usize>,
    pub master_seed: Option<u64>,
    pub threads: Option<usize>,
    pub eigen_tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub rigidity_c: Option<f64>,
    pub index: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<std::path::PathBuf>,
    pub svg: Option<std::path::PathBuf>,
}

impl ConfigOverlay {
    /// Apply `self` on top of `base` (fields set here win).
    pub fn over(self, mut base: ExperimentConfig) -> ExperimentConfig {
        if let Some(v) = self.ensemble {
            base.ensemble = v;
        }
        if let Some(v) = self.n_list {
            base.n_list = v;
        }
        if let Some(v) = self.y {
            base.y = v;
        }
        if let Some(v) = self.replicates {
            base.replicates = v;
        }
        if let Some(v) = self.master_seed {
            base.master_seed = v;
        }
        if let Some(v) = self.threads {
            base.threads = v;
        }
        if let Some(v) = self.eigen_tol {
            base.eigen_tol = v;
        }
        if let Some(v) = self.epsilon {
            base.epsilon = v;
        }
        if let Some(v) = self.rigidity_c {
            base.rigidity_c = v;
        }
        if let Some(v) = self.index {
            base.index = Some(v);
        }
        base
    }

    /// Merge two overlays; fields set in `top` shadow `self`.
    pub fn merged_with(mut self, top: ConfigOverlay) -> ConfigOverlay {
        macro_rules! take {
            ($($f:ident),*) => {$( if top.$f.is_some() { self.$f = top.$f; } )*};
        }
        take!(
            ensemble, n_list, y, replicates, master_seed, threads, eigen_tol, epsilon,
            rigidity_c, index, format, out, svg
        );
        self
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{path:?}: {e}")))?;
        Self::parse(&text)
    }

    /// Parse the `key=value` format: one assignment per line, `#` comments,
    /// blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut overlay = ConfigOverlay::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |k: &str, v: &str| ConfigError::BadValue {
                line,
                key: k.to_string(),
                value: v.to_string(),
            };
            match key {
                "ensemble" => {
                    overlay.ensemble =
                        Some(value.parse().map_err(|_| bad(key, value))?);
                }
                "n" => {
                    let list = value
                        .split(',')
                        .map(|tok| tok.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| bad(key, value))?;
                    overlay.n_list = Some(list);
                }
                "y" => overlay.y = Some(value.parse().map_err(|_| bad(key, value))?),
                "reps" => {
                    overlay.replicates = Some(value.parse().map_err(|_| bad(key, value))?)
                }
                "seed" => {
                    overlay.master_seed = Some(value.parse().map_err(|_| bad(key, value))?)
                }
                "threads" => {
                    overlay.threads = Some(value.parse().map_err(|_| bad(key, value))?)
                }
                "tol" => overlay.eigen_tol = Some(value.parse().map_err(|_| bad(key, value))?),
                "epsilon" => {
                    overlay.epsilon = Some(value.parse().map_err(|_| bad(key, value))?)
                }
                "rigidity-c" => {
                    overlay.rigidity_c = Some(value.parse().map_err(|_| bad(key, value))?)
                }
                "index" => overlay.index = Some(value.parse().map_err(|_| bad(key, value))?),
                "format" => {
                    overlay.format = Some(value.parse().map_err(|_| bad(key, value))?)
                }
                "out" => overlay.out = Some(value.into()),
                "svg" => overlay.svg = Some(value.into()),
                other => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(overlay)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_ids_roundtrip() {
        for id in EnsembleId::ALL {
            assert_eq!(id.as_str().parse::<EnsembleId>().unwrap(), id);
        }
        assert!("gue".parse::<EnsembleId>().is_err());
    }

    #[test]
    fn common_validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate_common().is_ok());
        cfg.y = 2.0;
        assert_eq!(cfg.validate_common().unwrap_err(), ConfigError::YOutsideBulk(2.0));
        cfg.y = 0.0;
        cfg.replicates = 0;
        assert_eq!(cfg.validate_common().unwrap_err(), ConfigError::NoReplicates);
        cfg.replicates = 10;
        cfg.ensemble = EnsembleId::GueDense;
        cfg.n_list = vec![4096];
        assert!(matches!(
            cfg.validate_common().unwrap_err(),
            ConfigError::DenseCapExceeded { got: 4096, cap: DENSE_N_CAP }
        ));
    }

    #[test]
    fn config_file_parses_and_overrides() {
        let text = "\
# comment line
ensemble = goe-tridiag
n = 128, 256,512
y = -0.5   # trailing comment
reps = 777
seed = 99
format = csv
";
        let overlay = ConfigOverlay::parse(text).unwrap();
        assert_eq!(overlay.ensemble, Some(EnsembleId::GoeTridiag));
        assert_eq!(overlay.n_list, Some(vec![128, 256, 512]));
        assert_eq!(overlay.y, Some(-0.5));
        assert_eq!(overlay.replicates, Some(777));
        assert_eq!(overlay.format, Some(OutputFormat::Csv));

        // CLI layer wins field-by-field
        let cli = ConfigOverlay {
            y: Some(0.25),
            ..Default::default()
        };
        let merged = overlay.merged_with(cli);
        let cfg = merged.over(ExperimentConfig::default());
        assert_eq!(cfg.y, 0.25);
        assert_eq!(cfg.ensemble, EnsembleId::GoeTridiag);
        assert_eq!(cfg.replicates, 777);
        assert_eq!(cfg.master_seed, 99);
    }

    #[test]
    fn config_file_rejects_garbage() {
        assert!(matches!(
            ConfigOverlay::parse("this is not an assignment").unwrap_err(),
            ConfigError::Malformed { line: 1, .. }
        ));
        assert!(matches!(
            ConfigOverlay::parse("volume=11").unwrap_err(),
            ConfigError::UnknownKey { line: 1, .. }
        ));
        assert!(matches!(
            ConfigOverlay::parse("reps=many").unwrap_err(),
            ConfigError::BadValue { line: 1, .. }
        ));
    }
}
