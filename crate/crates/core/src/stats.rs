//! Mergeable streaming estimators and the hypothesis tests the experiment
//! runners share.
//!
//! Accumulators are designed for deterministic parallel reduction: replicate
//! results are merged pairwise in a fixed binary tree keyed by replicate
//! index (see [`tree_reduce`]), so a run produces bit-identical statistics no
//! matter how many workers executed it.

use serde::{Deserialize, Serialize};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("sample set capacity {capacity} exceeded")]
    CapacityExceeded { capacity: usize },
    #[error("samples must be finite")]
    NonFiniteSample,
    #[error("regression needs at least two distinct x values")]
    DegenerateRegression,
}

/// Welford accumulator: count, running mean, sum of squared deviations,
/// extremes. `merge` uses the Chan pairwise update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamingMoments {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Default for StreamingMoments {
    fn default() -> Self {
        Self::new()
    }
}

impl StreamingMoments {
    pub fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    pub fn of(x: f64) -> Self {
        let mut acc = Self::new();
        acc.update(x);
        acc
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut acc = Self::new();
        for &x in values {
            acc.update(x);
        }
        acc
    }

    pub fn update(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Self {
            count,
            mean,
            m2,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    /// Unbiased sample variance m2/(count − 1); `None` below two samples.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }

    pub fn sum_sq_dev(&self) -> f64 {
        self.m2
    }

    pub fn min(&self) -> Option<f64> {
        (self.count > 0).then_some(self.min)
    }

    pub fn max(&self) -> Option<f64> {
        (self.count > 0).then_some(self.max)
    }
}

/// Pairwise reduction over leaves in index order.
///
/// The combine tree depends only on the number of leaves, never on timing or
/// worker count, which is what makes merged floating-point statistics
/// reproducible under parallel execution.
pub fn tree_reduce<T>(mut items: Vec<T>, mut combine: impl FnMut(T, T) -> T) -> Option<T> {
    if items.is_empty() {
        return None;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut iter = items.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

/// Sorted sample container with a hard capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    capacity: usize,
}

impl SampleSet {
    pub const DEFAULT_CAPACITY: usize = 1_000_000;

    /// Sorts and stores `values`; rejects non-finite entries and overflow.
    pub fn from_values(mut values: Vec<f64>, capacity: usize) -> Result<Self, StatsError> {
        if values.len() > capacity {
            return Err(StatsError::CapacityExceeded { capacity });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFiniteSample);
        }
        values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Ok(Self { values, capacity })
    }

    pub fn from_values_default(values: Vec<f64>) -> Result<Self, StatsError> {
        Self::from_values(values, Self::DEFAULT_CAPACITY)
    }

    pub fn merge(&self, other: &Self) -> Result<Self, StatsError> {
        let capacity = self.capacity.max(other.capacity);
        if self.len() + other.len() > capacity {
            return Err(StatsError::CapacityExceeded { capacity });
        }
        let mut values = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.values.len() && j < other.values.len() {
            if self.values[i] <= other.values[j] {
                values.push(self.values[i]);
                i += 1;
            } else {
                values.push(other.values[j]);
                j += 1;
            }
        }
        values.extend_from_slice(&self.values[i..]);
        values.extend_from_slice(&other.values[j..]);
        Ok(Self { values, capacity })
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

/// Standard normal CDF Φ, complementary-error-function based.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Complementary error function to near machine accuracy.
///
/// Alternating Maclaurin series below z = 2.5, Lentz evaluation of the
/// continued fraction √π e^{z²} erfc(z) = 1/(z + (1/2)/(z + 1/(z + ...)))
/// above it.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 2.5 {
        1.0 - erf_series(x)
    } else if x > 30.0 {
        0.0
    } else {
        let cf = erfc_continued_fraction(x);
        (-x * x).exp() / std::f64::consts::PI.sqrt() * cf
    }
}

fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z; // z^{2k+1}/k!
    let mut sum = z;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= z2 / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        if k % 2 == 1 {
            sum -= contrib;
        } else {
            sum += contrib;
        }
        if contrib < 1e-18 * sum.abs() || k > 200 {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

fn erfc_continued_fraction(z: f64) -> f64 {
    // modified Lentz on b_j = z, a_1 = 1, a_j = (j-1)/2 for j ≥ 2
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..=300u32 {
        let a = if j == 1 { 1.0 } else { (j - 1) as f64 / 2.0 };
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    f
}

/// Kolmogorov asymptotic survival function Q(λ) = 2 Σ (−1)^{j−1} e^{−2j²λ²}.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100u32 {
        let jf = j as f64;
        let term = 2.0 * (-2.0 * jf * jf * lambda * lambda).exp();
        if j % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// KS statistic and approximate p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d: f64,
    /// Asymptotic-series p-value; approximate by construction.
    pub p_approx: f64,
}

pub const KS_MIN_SAMPLES: usize = 8;

/// One-sample KS test of `samples` against the standard normal law.
pub fn ks_one_sample(samples: &SampleSet) -> Result<KsResult, StatsError> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(StatsError::TooFewSamples {
            got: samples.len(),
            need: KS_MIN_SAMPLES,
        });
    }
    let d = ks_distance_to_normal(samples.sorted_values());
    let m = samples.len() as f64;
    Ok(KsResult {
        d,
        p_approx: kolmogorov_sf(m.sqrt() * d),
    })
}

/// sup |F_emp − Φ| over a sorted sample; shared with the relaxed-precondition
/// tests.
pub(crate) fn ks_distance_to_normal(sorted: &[f64]) -> f64 {
    let m = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = normal_cdf(x);
        let upper = (i + 1) as f64 / m - cdf;
        let lower = cdf - i as f64 / m;
        d = d.max(upper).max(lower);
    }
    d
}

/// Two-sample KS test with effective size ab/(a+b).
pub fn ks_two_sample(a: &SampleSet, b: &SampleSet) -> Result<KsResult, StatsError> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLES {
            return Err(StatsError::TooFewSamples {
                got: s.len(),
                need: KS_MIN_SAMPLES,
            });
        }
    }
    let xs = a.sorted_values();
    let ys = b.sorted_values();
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    Ok(KsResult {
        d,
        p_approx: kolmogorov_sf(n_eff.sqrt() * d),
    })
}

/// Ordinary least squares fit of y on x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn regress_slope(points: &[(f64, f64)]) -> Result<Regression, StatsError> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(StatsError::DegenerateRegression);
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateRegression);
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sst: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ssr: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r2 = if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 };
    Ok(Regression {
        slope,
        intercept,
        r2,
    })
}

/// Sample skewness m3/m2^{3/2} (population moments); `None` below 3 samples
/// or at zero variance.
pub fn sample_skewness(values: &[f64]) -> Option<f64> {
    if values.len() < 3 {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return None;
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    Some(m3 / m2.powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    #[test]
    fn moments_hand_arithmetic() {
        let acc = StreamingMoments::from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(acc.count(), 3);
        assert!((acc.mean().unwrap() - 2.0).abs() < 1e-15);
        assert!((acc.sample_variance().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(acc.min().unwrap(), 1.0);
        assert_eq!(acc.max().unwrap(), 3.0);
    }

    #[test]
    fn merge_equals_batch() {
        let a = StreamingMoments::from_slice(&[1.0, 2.0]);
        let b = StreamingMoments::from_slice(&[3.0, 4.0]);
        let merged = a.merge(&b);
        assert_eq!(merged.count(), 4);
        assert!((merged.mean().unwrap() - 2.5).abs() < 1e-15);
        assert!((merged.sum_sq_dev() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let a = StreamingMoments::from_slice(&[0.5, -0.25, 4.0]);
        let e = StreamingMoments::new();
        assert_eq!(a.merge(&e), a);
        assert_eq!(e.merge(&a), a);
    }

    #[test]
    fn merge_is_associative_to_tolerance() {
        let mut rng = SeedStream::new(11, 0).rng();
        for _ in 0..50 {
            let xs: Vec<f64> = (0..23).map(|_| 10.0 * rng.standard_normal()).collect();
            let a = StreamingMoments::from_slice(&xs[..7]);
            let b = StreamingMoments::from_slice(&xs[7..15]);
            let c = StreamingMoments::from_slice(&xs[15..]);
            let left = a.merge(&b).merge(&c);
            let right = a.merge(&b.merge(&c));
            let batch = StreamingMoments::from_slice(&xs);
            for m in [left, right] {
                let rel = (m.sample_variance().unwrap() - batch.sample_variance().unwrap()).abs()
                    / batch.sample_variance().unwrap();
                assert!(rel < 1e-10);
                assert!((m.mean().unwrap() - batch.mean().unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tree_reduce_is_shape_stable() {
        // same leaves -> same result bits, independent of how callers split work
        let leaves: Vec<StreamingMoments> = (0..101)
            .map(|i| StreamingMoments::of((i as f64).sin() * 1e6))
            .collect();
        let once = tree_reduce(leaves.clone(), |a, b| a.merge(&b)).unwrap();
        let again = tree_reduce(leaves, |a, b| a.merge(&b)).unwrap();
        assert_eq!(once.mean().unwrap().to_bits(), again.mean().unwrap().to_bits());
        assert_eq!(once.sum_sq_dev().to_bits(), again.sum_sq_dev().to_bits());
    }

    #[test]
    fn sample_set_enforces_capacity() {
        let err = SampleSet::from_values(vec![0.0; 10], 9).unwrap_err();
        assert_eq!(err, StatsError::CapacityExceeded { capacity: 9 });
        let a = SampleSet::from_values(vec![1.0; 6], 10).unwrap();
        let b = SampleSet::from_values(vec![2.0; 6], 10).unwrap();
        assert!(a.merge(&b).is_err());
    }

    #[test]
    fn sample_set_sorts() {
        let s = SampleSet::from_values_default(vec![3.0, -1.0, 2.0]).unwrap();
        assert_eq!(s.sorted_values(), &[-1.0, 2.0, 3.0]);
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.9750021).abs() < 1e-6);
        for &x in &[-3.5, -1.0, -0.2, 0.4, 1.3, 2.8, 4.0] {
            assert!((normal_cdf(-x) - (1.0 - normal_cdf(x))).abs() < 1e-14);
        }
    }

    /// Independent oracle: Φ(x) = 1/2 + ∫_0^x φ(t) dt by adaptive Simpson.
    fn phi_by_quadrature(x: f64) -> f64 {
        fn phi(t: f64) -> f64 {
            (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
        }
        fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = phi(lm);
            let frm = phi(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(a, m, fa, flm, fm, eps / 2.0, depth - 1)
                    + simpson(m, b, fm, frm, fb, eps / 2.0, depth - 1)
            }
        }
        let fa = phi(0.0);
        let fb = phi(x);
        let fm = phi(0.5 * x);
        0.5 + simpson(0.0, x, fa, fm, fb, 1e-13, 40)
    }

    #[test]
    fn normal_cdf_matches_quadrature_oracle() {
        let mut x = -6.0;
        while x <= 6.0 {
            let oracle = phi_by_quadrature(x);
            assert!(
                (normal_cdf(x) - oracle).abs() < 1e-10,
                "x={x}: {} vs {}",
                normal_cdf(x),
                oracle
            );
            x += 0.173;
        }
    }

    #[test]
    fn ks_single_point_relaxed() {
        // single observation at 0: empirical CDF jumps 0 -> 1 across Φ(0)=1/2
        let d = ks_distance_to_normal(&[0.0]);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_is_invariant_under_input_order() {
        let mut rng = SeedStream::new(14, 2).rng();
        let forward: Vec<f64> = (0..200).map(|_| rng.standard_normal()).collect();
        let mut reversed = forward.clone();
        reversed.reverse();
        let mut shuffled = forward.clone();
        shuffled.swap(3, 150);
        shuffled.swap(77, 12);
        let d = |v: Vec<f64>| {
            ks_one_sample(&SampleSet::from_values_default(v).unwrap())
                .unwrap()
                .d
        };
        let base = d(forward);
        assert_eq!(base.to_bits(), d(reversed).to_bits());
        assert_eq!(base.to_bits(), d(shuffled).to_bits());
    }

    #[test]
    fn ks_requires_eight_samples() {
        let s = SampleSet::from_values_default(vec![0.0; 7]).unwrap();
        assert!(matches!(
            ks_one_sample(&s),
            Err(StatsError::TooFewSamples { got: 7, need: 8 })
        ));
    }

    #[test]
    fn ks_null_distribution_calibration() {
        // D < 1.95/√m should hold in ≥ 99% of trials (α ≈ 0.001 tail)
        let m = 10_000;
        let trials = 100;
        let mut pass = 0;
        for t in 0..trials {
            let mut rng = SeedStream::new(0x5EED, t).rng();
            let z: Vec<f64> = (0..m).map(|_| rng.standard_normal()).collect();
            let s = SampleSet::from_values_default(z).unwrap();
            let ks = ks_one_sample(&s).unwrap();
            if ks.d < 1.95 / (m as f64).sqrt() {
                pass += 1;
            }
        }
        assert!(pass >= 99, "only {pass}/{trials} trials under the bound");
    }

    #[test]
    fn ks_gross_shift_is_rejected() {
        let mut rng = SeedStream::new(3, 0).rng();
        let z: Vec<f64> = (0..1000).map(|_| rng.standard_normal() + 5.0).collect();
        let s = SampleSet::from_values_default(z).unwrap();
        let ks = ks_one_sample(&s).unwrap();
        assert!(ks.p_approx < 1e-6);
    }

    #[test]
    fn ks_two_sample_edges() {
        let a = SampleSet::from_values_default((0..32).map(|i| i as f64).collect()).unwrap();
        let same = ks_two_sample(&a, &a).unwrap();
        assert_eq!(same.d, 0.0);
        let b =
            SampleSet::from_values_default((0..32).map(|i| 1000.0 + i as f64).collect()).unwrap();
        let disjoint = ks_two_sample(&a, &b).unwrap();
        assert_eq!(disjoint.d, 1.0);
    }

    #[test]
    fn ks_two_sample_same_law_calibration() {
        let m = 10_000;
        let trials = 100;
        let mut not_rejected = 0;
        for t in 0..trials {
            let mut ra = SeedStream::new(0xAAAA, 2 * t).rng();
            let mut rb = SeedStream::new(0xAAAA, 2 * t + 1).rng();
            let a: Vec<f64> = (0..m).map(|_| ra.standard_normal()).collect();
            let b: Vec<f64> = (0..m).map(|_| rb.standard_normal()).collect();
            let ks = ks_two_sample(
                &SampleSet::from_values_default(a).unwrap(),
                &SampleSet::from_values_default(b).unwrap(),
            )
            .unwrap();
            if ks.p_approx >= 0.01 {
                not_rejected += 1;
            }
        }
        assert!(not_rejected >= 98, "{not_rejected}/{trials} not rejected");
    }

    #[test]
    fn regression_examples() {
        let exact = regress_slope(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert!((exact.slope - 1.0).abs() < 1e-14);
        assert!(exact.intercept.abs() < 1e-14);
        assert!((exact.r2 - 1.0).abs() < 1e-14);

        let flat = regress_slope(&[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(flat.slope.abs() < 1e-14);
        assert!((flat.intercept - 1.0).abs() < 1e-14);

        let noisy: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let x = i as f64 / 10.0;
                (x, 2.0 * x + 1.0 + 1e-9 * (i as f64).sin())
            })
            .collect();
        let fit = regress_slope(&noisy).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-6);

        assert!(matches!(
            regress_slope(&[(1.0, 0.0), (1.0, 5.0)]),
            Err(StatsError::DegenerateRegression)
        ));
    }

    #[test]
    fn skewness_of_symmetric_sample_is_zero() {
        let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
        assert!(sample_skewness(&xs).unwrap().abs() < 1e-15);
        assert!(sample_skewness(&[1.0, 1.0, 1.0]).is_none());
    }
}
