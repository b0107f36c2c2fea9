//! Semicircle-law quantities and the asymptotic predictions for counting
//! statistics in the bulk.
//!
//! Everything here is closed-form or a Newton inversion of the closed-form
//! CDF; quadrature exists only as a test oracle. All bulk formulas are
//! restricted to y strictly inside (−2, 2) and indices with i/n in
//! (0.01, 0.99) — edge statistics are out of scope.

use serde::{Deserialize, Serialize};

use crate::ensembles::Beta;

use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SemicircleError {
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("quantile derivative is only defined for q in [1e-6, 1 - 1e-6], got {0}")]
    DerivativeOutOfDomain(f64),
    #[error("location y={0} is outside the open bulk (-2, 2)")]
    EdgeRegime(f64),
    #[error("matrix size must be at least {need}, got {got}")]
    SizeTooSmall { got: usize, need: usize },
    #[error("index {index} of {n} is outside the bulk window (0.01, 0.99)")]
    EdgeIndex { index: usize, n: usize },
}

/// Semicircle density (1/2π)√(4−x²) on [−2, 2].
pub fn rho_sc_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Semicircle CDF, closed form: F(y) = 1/2 + y√(4−y²)/(4π) + arcsin(y/2)/π.
pub fn semicircle_cdf(y: f64) -> f64 {
    if y <= -2.0 {
        0.0
    } else if y >= 2.0 {
        1.0
    } else {
        0.5 + y * (4.0 - y * y).sqrt() / (4.0 * PI) + (y / 2.0).asin() / PI
    }
}

/// Classical location t(q): F(t(q)) = q within 10⁻¹⁰ for q in
/// [10⁻⁶, 1−10⁻⁶]. Newton iteration with a bisection fallback where the
/// density degenerates near ±2.
pub fn quantile(q: f64) -> Result<f64, SemicircleError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(SemicircleError::InvalidProbability(q));
    }
    if q == 0.0 {
        return Ok(-2.0);
    }
    if q == 1.0 {
        return Ok(2.0);
    }
    const DENSITY_FLOOR: f64 = 1e-8;
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    let mut t = 0.0f64;
    for _ in 0..200 {
        let f = semicircle_cdf(t) - q;
        if f > 0.0 {
            hi = t;
        } else if f < 0.0 {
            lo = t;
        }
        if f.abs() <= 1e-13 {
            break;
        }
        let density = rho_sc_density(t);
        let newton = if density > DENSITY_FLOOR {
            t - f / density
        } else {
            f64::NAN
        };
        t = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < f64::EPSILON {
            break;
        }
    }
    Ok(t)
}

/// t′(q) = 1/ρ_sc(t(q)); diverges toward the edges, reported out of domain
/// beyond q in [10⁻⁶, 1−10⁻⁶].
pub fn quantile_derivative(q: f64) -> Result<f64, SemicircleError> {
    if !(1e-6..=1.0 - 1e-6).contains(&q) {
        return Err(SemicircleError::DerivativeOutOfDomain(q));
    }
    let t = quantile(q)?;
    Ok(1.0 / rho_sc_density(t))
}

/// Asymptotic mean/variance of the counting statistic N_{[y,∞)} for one
/// (n, y, β), plus the dual index-side view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub n: usize,
    pub y: f64,
    pub beta: u8,
    /// n·ρ_sc([y, ∞)) — leading term; the O(log n/n) correction has an
    /// unspecified constant and is not modeled.
    pub mean: f64,
    /// ln(n)/(2π²) for β = 2, twice that for β = 1.
    pub variance: f64,
    pub sigma_numerics: f64,
    /// n·F(y): fractional index of the eigenvalue sitting at y.
    pub bulk_index: f64,
    /// Classical location at that index (= y).
    pub center: f64,
    /// Predicted per-index fluctuation √(2 ln n / ((4−y²) n²)).
    pub fluctuation_std: f64,
}

/// Prediction formulas for the bulk counting statistic. `log n` is the
/// natural logarithm throughout.
pub fn predict(n: usize, y: f64, beta: Beta) -> Result<TheoryPrediction, SemicircleError> {
    if n < 2 {
        return Err(SemicircleError::SizeTooSmall { got: n, need: 2 });
    }
    if !(-2.0 < y && y < 2.0) {
        return Err(SemicircleError::EdgeRegime(y));
    }
    let nf = n as f64;
    let cdf = semicircle_cdf(y);
    let base_variance = nf.ln() / (2.0 * PI * PI);
    let variance = match beta {
        Beta::Two => base_variance,
        Beta::One => 2.0 * base_variance,
    };
    Ok(TheoryPrediction {
        n,
        y,
        beta: beta.as_int(),
        mean: nf * (1.0 - cdf),
        variance,
        sigma_numerics: variance.sqrt(),
        bulk_index: nf * cdf,
        center: y,
        fluctuation_std: (2.0 * nf.ln() / ((4.0 - y * y) * nf * nf)).sqrt(),
    })
}

/// Normalize a count by the predicted mean and standard deviation.
pub fn clt_normalize(count: usize, p: &TheoryPrediction) -> f64 {
    (count as f64 - p.mean) / p.sigma_numerics
}

/// Center t(i/n) and predicted standard deviation of the i-th bulk
/// eigenvalue (1-based).
pub fn fluctuation_params(i: usize, n: usize) -> Result<(f64, f64), SemicircleError> {
    if i < 1 || i > n {
        return Err(SemicircleError::EdgeIndex { index: i, n });
    }
    let ratio = i as f64 / n as f64;
    if !(0.01 < ratio && ratio < 0.99) {
        return Err(SemicircleError::EdgeIndex { index: i, n });
    }
    let center = quantile(ratio)?;
    let nf = n as f64;
    let std = (2.0 * nf.ln() / ((4.0 - center * center) * nf * nf)).sqrt();
    Ok((center, std))
}

/// The index map used to transport the count CLT onto eigenvalues:
/// i_n = n F(y) − x √(ln n / 2π²) and the rescaled threshold
/// x_n = √((4 − t(i_n/n)²)/2) · (y − t(i_n/n)) / (√(ln n)/n).
///
/// x_n → x as n → ∞.
pub fn clt_index_map(y: f64, x: f64, n: usize) -> Result<(f64, f64), SemicircleError> {
    if n < 3 {
        return Err(SemicircleError::SizeTooSmall { got: n, need: 3 });
    }
    if !(-2.0 < y && y < 2.0) {
        return Err(SemicircleError::EdgeRegime(y));
    }
    let nf = n as f64;
    let i_n = nf * semicircle_cdf(y) - x * (nf.ln() / (2.0 * PI * PI)).sqrt();
    let ratio = i_n / nf;
    if !(0.0 < ratio && ratio < 1.0) {
        return Err(SemicircleError::EdgeRegime(y));
    }
    let t = quantile(ratio)?;
    let x_n = ((4.0 - t * t) / 2.0).sqrt() * (y - t) / (nf.ln().sqrt() / nf);
    Ok((i_n, x_n))
}

/// Rigidity window (ln n)^{C ln ln n} · min(i, n−i+1)^{−1/3} · n^{−2/3}
/// for the i-th eigenvalue (1-based).
pub fn rigidity_window(i: usize, n: usize, c: f64) -> f64 {
    let nf = n as f64;
    let rank = i.min(n - i + 1) as f64;
    let log_n = nf.ln();
    log_n.powf(c * log_n.ln()) * rank.powf(-1.0 / 3.0) * nf.powf(-2.0 / 3.0)
}
