//! Wigner-class random matrix ensembles.
//!
//! Entry distributions carry their analytic moments so moment matching can
//! be checked without sampling. Matrices come in two distributionally
//! equivalent forms for the Gaussian case: dense Hermitian/symmetric draws
//! and the sparse tridiagonal β-ensemble model (diagonal Gaussians, χ
//! subdiagonals), which makes O(n) sampling and counting possible.
//!
//! Samplers return the *unnormalized* matrix; the 1/√n scaling happens
//! exactly once, downstream in the spectral statistics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rng::{ReplicateRng, SeedStream};
use crate::spectral::{HermitianMatrix, TridiagonalMatrix};

/// Absolute tolerance for declaring two analytic moments equal.
pub const MOMENT_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EnsembleError {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("beta must be 1 or 2, got {0}")]
    InvalidBeta(u64),
    #[error("variance must be positive, got {0}")]
    InvalidVariance(f64),
    #[error("three-point atom probability must lie in (0, 1/2], got {0}")]
    InvalidAtomProbability(f64),
    #[error("three-point atom must be finite and nonzero, got {0}")]
    InvalidAtom(f64),
    #[error("moment order must be at least 1")]
    InvalidMomentOrder,
}

/// Dyson index: β = 1 real symmetric, β = 2 complex Hermitian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Beta {
    One,
    Two,
}

impl Beta {
    pub fn from_int(beta: u64) -> Result<Self, EnsembleError> {
        match beta {
            1 => Ok(Beta::One),
            2 => Ok(Beta::Two),
            other => Err(EnsembleError::InvalidBeta(other)),
        }
    }

    pub fn as_int(self) -> u8 {
        match self {
            Beta::One => 1,
            Beta::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryKind {
    /// Centered real Gaussian with the given variance.
    GaussianReal { variance: f64 },
    /// ±atom with probability atomProb each, 0 otherwise.
    ThreePoint { atom: f64, atom_prob: f64 },
    /// Unit signs: ±1 with probability 1/2.
    Rademacher,
}

/// A samplable symmetric scalar law with queryable analytic moments.
///
/// All provided kinds are bounded or Gaussian, so every ensemble built from
/// them has exponentially decaying entries by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryDistribution {
    kind: EntryKind,
    /// Cached m1..m6.
    moments: [f64; 6],
}

impl EntryDistribution {
    pub fn gaussian(variance: f64) -> Result<Self, EnsembleError> {
        if variance.is_nan() || variance <= 0.0 || !variance.is_finite() {
            return Err(EnsembleError::InvalidVariance(variance));
        }
        let kind = EntryKind::GaussianReal { variance };
        Ok(Self {
            kind,
            moments: Self::compute_moments(kind),
        })
    }

    pub fn three_point(atom: f64, atom_prob: f64) -> Result<Self, EnsembleError> {
        if atom_prob.is_nan() || atom_prob <= 0.0 || atom_prob > 0.5 {
            return Err(EnsembleError::InvalidAtomProbability(atom_prob));
        }
        if !atom.is_finite() || atom == 0.0 {
            return Err(EnsembleError::InvalidAtom(atom));
        }
        let kind = EntryKind::ThreePoint {
            atom: atom.abs(),
            atom_prob,
        };
        Ok(Self {
            kind,
            moments: Self::compute_moments(kind),
        })
    }

    pub fn rademacher() -> Self {
        let kind = EntryKind::Rademacher;
        Self {
            kind,
            moments: Self::compute_moments(kind),
        }
    }

    fn compute_moments(kind: EntryKind) -> [f64; 6] {
        let mut m = [0.0; 6];
        for k in 1..=6 {
            m[k - 1] = Self::analytic_moment(kind, k);
        }
        m
    }

    fn analytic_moment(kind: EntryKind, order: usize) -> f64 {
        if order % 2 == 1 {
            return 0.0; // all kinds are symmetric about zero
        }
        match kind {
            EntryKind::GaussianReal { variance } => {
                // (2k-1)!! σ^{2k}
                let k = order / 2;
                let mut double_factorial = 1.0;
                for j in 1..=k {
                    double_factorial *= (2 * j - 1) as f64;
                }
                double_factorial * variance.powi(k as i32)
            }
            EntryKind::ThreePoint { atom, atom_prob } => {
                2.0 * atom_prob * atom.powi(order as i32)
            }
            EntryKind::Rademacher => 1.0,
        }
    }

    /// k-th analytic moment, any k ≥ 1 (first six are cached).
    pub fn moment(&self, order: usize) -> f64 {
        if (1..=6).contains(&order) {
            self.moments[order - 1]
        } else {
            Self::analytic_moment(self.kind, order)
        }
    }

    pub fn variance(&self) -> f64 {
        self.moments[1]
    }

    pub fn kind(&self) -> EntryKind {
        self.kind
    }

    pub fn sample(&self, rng: &mut ReplicateRng) -> f64 {
        match self.kind {
            EntryKind::GaussianReal { variance } => variance.sqrt() * rng.standard_normal(),
            EntryKind::ThreePoint { atom, atom_prob } => {
                let u = rng.uniform();
                if u < atom_prob {
                    atom
                } else if u < 2.0 * atom_prob {
                    -atom
                } else {
                    0.0
                }
            }
            EntryKind::Rademacher => {
                if rng.uniform() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Human-readable label used in reports.
    pub fn describe(&self) -> String {
        match self.kind {
            EntryKind::GaussianReal { variance } => format!("gaussian(var={variance})"),
            EntryKind::ThreePoint { atom, atom_prob } => {
                format!("three-point(atom={atom}, prob={atom_prob})")
            }
            EntryKind::Rademacher => "rademacher".to_string(),
        }
    }
}

/// Three-point law matching a centered Gaussian of the given variance up to
/// the fourth moment: atoms ±√(3σ²) with probability 1/6 each.
///
/// Solves 2pa² = σ², 2pa⁴ = 3σ⁴.
pub fn gue_matched_three_point(target_variance: f64) -> Result<EntryDistribution, EnsembleError> {
    if target_variance.is_nan() || target_variance <= 0.0 || !target_variance.is_finite() {
        return Err(EnsembleError::InvalidVariance(target_variance));
    }
    EntryDistribution::three_point((3.0 * target_variance).sqrt(), 1.0 / 6.0)
}

/// One marginal-moment comparison inside a [`MatchReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub order: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub matches: bool,
}

/// Mixed moment E[Re^m Im^l] comparison; with independent symmetric parts it
/// reduces to the product of marginals, which is what gets recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedMomentComparison {
    pub re_order: usize,
    pub im_order: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub order: usize,
    pub marginal: Vec<MomentComparison>,
    pub mixed: Vec<MixedMomentComparison>,
    pub matches: bool,
}

impl MatchReport {
    /// Smallest mismatching marginal order, if any.
    pub fn first_mismatch(&self) -> Option<&MomentComparison> {
        self.marginal.iter().find(|c| !c.matches)
    }
}

/// Compare analytic moments of two entry laws up to `order` (absolute
/// tolerance 10⁻¹²), including the induced mixed moments for independent
/// real/imaginary parts.
pub fn verify_moment_match(
    d1: &EntryDistribution,
    d2: &EntryDistribution,
    order: usize,
) -> Result<MatchReport, EnsembleError> {
    if order < 1 {
        return Err(EnsembleError::InvalidMomentOrder);
    }
    let mut marginal = Vec::with_capacity(order);
    for k in 1..=order {
        let (lhs, rhs) = (d1.moment(k), d2.moment(k));
        let abs_diff = (lhs - rhs).abs();
        marginal.push(MomentComparison {
            order: k,
            lhs,
            rhs,
            abs_diff,
            matches: abs_diff <= MOMENT_MATCH_TOL,
        });
    }
    let mut mixed = Vec::new();
    for m in 1..order {
        for l in 1..=(order - m) {
            let lhs = d1.moment(m) * d1.moment(l);
            let rhs = d2.moment(m) * d2.moment(l);
            mixed.push(MixedMomentComparison {
                re_order: m,
                im_order: l,
                lhs,
                rhs,
                matches: (lhs - rhs).abs() <= MOMENT_MATCH_TOL,
            });
        }
    }
    let matches = marginal.iter().all(|c| c.matches) && mixed.iter().all(|c| c.matches);
    Ok(MatchReport {
        order,
        marginal,
        mixed,
        matches,
    })
}

/// Full description of a samplable Wigner ensemble.
///
/// For β = 2 `off_diag` is the law of each of the real and imaginary parts of
/// an off-diagonal entry; for β = 1 it is the law of the entry itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    beta: Beta,
    off_diag: EntryDistribution,
    diag: EntryDistribution,
    n: usize,
}

impl EnsembleSpec {
    pub fn new(
        beta: Beta,
        off_diag: EntryDistribution,
        diag: EntryDistribution,
        n: usize,
    ) -> Result<Self, EnsembleError> {
        if n == 0 {
            return Err(EnsembleError::EmptyMatrix);
        }
        Ok(Self {
            beta,
            off_diag,
            diag,
            n,
        })
    }

    /// GUE convention: off-diagonal parts N(0, 1/2), diagonal N(0, 1).
    pub fn gue(n: usize) -> Result<Self, EnsembleError> {
        Self::new(
            Beta::Two,
            EntryDistribution::gaussian(0.5)?,
            EntryDistribution::gaussian(1.0)?,
            n,
        )
    }

    /// GOE convention: off-diagonal N(0, 1), diagonal N(0, 2).
    pub fn goe(n: usize) -> Result<Self, EnsembleError> {
        Self::new(
            Beta::One,
            EntryDistribution::gaussian(1.0)?,
            EntryDistribution::gaussian(2.0)?,
            n,
        )
    }

    /// Hermitian ensemble whose entries match GUE moments to order 4: the
    /// three-point laws with variances 1/2 (off-diagonal parts) and 1
    /// (diagonal).
    pub fn three_point_matched(n: usize) -> Result<Self, EnsembleError> {
        Self::new(
            Beta::Two,
            gue_matched_three_point(0.5)?,
            gue_matched_three_point(1.0)?,
            n,
        )
    }

    /// Sign-entry Hermitian ensemble, matched to GUE only to order 2:
    /// off-diagonal parts ±√(1/2), diagonal ±1. The contrast case.
    pub fn rademacher_signs(n: usize) -> Result<Self, EnsembleError> {
        Self::new(
            Beta::Two,
            EntryDistribution::three_point(0.5f64.sqrt(), 0.5)?,
            EntryDistribution::rademacher(),
            n,
        )
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn off_diag(&self) -> &EntryDistribution {
        &self.off_diag
    }

    pub fn diag(&self) -> &EntryDistribution {
        &self.diag
    }
}

/// Draw the unnormalized matrix M_n.
///
/// Entries above the diagonal are iid; the matrix equals its conjugate
/// transpose exactly because only the upper triangle is stored. Draw order is
/// fixed (row-major upper triangle) so a (seed, replicate) pair is bit-stable.
pub fn sample_dense(spec: &EnsembleSpec, stream: SeedStream) -> HermitianMatrix {
    let n = spec.n;
    let mut rng = stream.rng();
    let mut h = HermitianMatrix::zeros(n);
    for i in 0..n {
        h.set_upper(i, i, Complex64::new(spec.diag.sample(&mut rng), 0.0));
        for j in i + 1..n {
            let re = spec.off_diag.sample(&mut rng);
            let im = match spec.beta {
                Beta::One => 0.0,
                Beta::Two => spec.off_diag.sample(&mut rng),
            };
            h.set_upper(i, j, Complex64::new(re, im));
        }
    }
    h
}

/// Draw the unnormalized tridiagonal β-ensemble matrix T.
///
/// β = 2: diagonal N(0, 1), subdiagonal b_i = χ_{2(n−i)}/√2.
/// β = 1: diagonal N(0, 2), subdiagonal b_i = χ_{n−i}.
///
/// The eigenvalue law of T equals that of the dense Gaussian ensemble with
/// the matching convention (GUE/GOE), at O(n) sampling cost.
pub fn sample_tridiagonal_beta(
    n: usize,
    beta: Beta,
    stream: SeedStream,
) -> Result<TridiagonalMatrix, EnsembleError> {
    if n == 0 {
        return Err(EnsembleError::EmptyMatrix);
    }
    let mut rng = stream.rng();
    let mut diag = Vec::with_capacity(n);
    let diag_scale = match beta {
        Beta::One => std::f64::consts::SQRT_2,
        Beta::Two => 1.0,
    };
    for _ in 0..n {
        diag.push(diag_scale * rng.standard_normal());
    }
    let mut subdiag = Vec::with_capacity(n - 1);
    for i in 1..n {
        let remaining = (n - i) as u64;
        let b = match beta {
            Beta::One => rng.chi(remaining),
            Beta::Two => rng.chi(2 * remaining) / std::f64::consts::SQRT_2,
        };
        subdiag.push(b);
    }
    Ok(TridiagonalMatrix::new(diag, subdiag).expect("sampler output is canonical"))
}
