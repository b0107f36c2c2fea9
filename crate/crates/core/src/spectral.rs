//! Spectral kernels for Hermitian matrices: Householder reduction to real
//! symmetric tridiagonal form, LDLᵀ/Sturm inertia counts, bisection for
//! selected eigenvalues, and implicit-shift QL for full spectra.

pub use num_complex::Complex64;

pub type SpectralResult<T> = Result<T, SpectralError>;

/// Sweeps allowed per eigenvalue before QL reports failure.
pub const MAX_QL_SWEEPS: usize = 50;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpectralError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("subdiagonal length {subdiag} does not match diagonal length {diag}")]
    LengthMismatch { diag: usize, subdiag: usize },
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("subdiagonal entries must be nonnegative in canonical form")]
    NegativeSubdiagonal,
    #[error("eigenvalue index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("QL failed to converge on eigenvalue {index} after {budget} sweeps")]
    NoConvergence { index: usize, budget: usize },
}

/// Real symmetric tridiagonal matrix in canonical form (subdiagonal ≥ 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    subdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, subdiag: Vec<f64>) -> SpectralResult<Self> {
        if diag.is_empty() {
            return Err(SpectralError::Empty);
        }
        if subdiag.len() + 1 != diag.len() {
            return Err(SpectralError::LengthMismatch {
                diag: diag.len(),
                subdiag: subdiag.len(),
            });
        }
        if diag.iter().chain(subdiag.iter()).any(|x| !x.is_finite()) {
            return Err(SpectralError::NonFiniteEntry);
        }
        if subdiag.iter().any(|&b| b < 0.0) {
            return Err(SpectralError::NegativeSubdiagonal);
        }
        Ok(Self { diag, subdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn subdiag(&self) -> &[f64] {
        &self.subdiag
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Row-sum norm ‖T‖∞.
    pub fn inf_norm(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.subdiag[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.subdiag[i] } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.subdiag[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.subdiag[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }
}

/// Hermitian matrix of order n in packed upper-triangular storage
/// (row-major). β=1 ensembles simply carry zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    upper: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "HermitianMatrix requires n >= 1");
        Self {
            n,
            upper: vec![Complex64::new(0.0, 0.0); n * (n + 1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - i * (i + 1) / 2 + j
    }

    /// Entry (i, j); below the diagonal the conjugate of the stored value.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i <= j {
            self.upper[self.index(i, j)]
        } else {
            self.upper[self.index(j, i)].conj()
        }
    }

    /// Write an upper-triangular entry (i ≤ j). Diagonal entries keep only
    /// their real part.
    pub fn set_upper(&mut self, i: usize, j: usize, value: Complex64) {
        let idx = self.index(i, j);
        self.upper[idx] = if i == j {
            Complex64::new(value.re, 0.0)
        } else {
            value
        };
    }
}

/// Sorted eigenvalues; `normalized` records whether the √n scaling has been
/// applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    normalized: bool,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Divide by √n. The scaling is applied exactly once per spectrum; the
    /// assert keeps double application from passing silently.
    pub fn into_normalized(mut self) -> Spectrum {
        assert!(!self.normalized, "spectrum already normalized");
        let scale = 1.0 / (self.values.len() as f64).sqrt();
        for v in &mut self.values {
            *v *= scale;
        }
        self.normalized = true;
        self
    }

    /// Eigenvalues ≥ y, counted off the sorted values.
    pub fn count_at_least(&self, y: f64) -> usize {
        self.len() - self.values.partition_point(|&v| v < y)
    }
}

/// Default unnormalized eigenvalue tolerance, 10⁻¹⁰·√n (10⁻¹⁰ after the √n
/// normalization).
pub fn default_tolerance(n: usize) -> f64 {
    1e-10 * (n as f64).sqrt()
}

/// Number of eigenvalues of T strictly below y, by counting negative pivots
/// of the LDLᵀ recurrence (Sturm count).
///
/// Pivots smaller in magnitude than ε·‖T‖∞ are replaced by −ε·‖T‖∞, the
/// standard robustness guard; counts are exact for y off the spectrum.
pub fn negcount(t: &TridiagonalMatrix, y: f64) -> usize {
    let norm = t.inf_norm();
    let floor = if norm > 0.0 {
        f64::EPSILON * norm
    } else {
        f64::MIN_POSITIVE
    };
    let diag = t.diag();
    let sub = t.subdiag();
    let mut count = 0usize;
    let mut d = diag[0] - y;
    if d.abs() < floor {
        d = -floor;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        d = (diag[i] - y) - sub[i - 1] * sub[i - 1] / d;
        if d.abs() < floor {
            d = -floor;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// N_{[y, ∞)}: eigenvalues in the closed half-line starting at y.
///
/// With `normalized` set, y refers to the spectrum of T/√n.
pub fn counting_function(t: &TridiagonalMatrix, y: f64, normalized: bool) -> usize {
    let shift = if normalized {
        y * (t.n() as f64).sqrt()
    } else {
        y
    };
    t.n() - negcount(t, shift)
}

/// i-th smallest eigenvalue (1-based) within ±tol, by bisection on the Sturm
/// count from Gershgorin brackets.
pub fn kth_eigenvalue(t: &TridiagonalMatrix, index: usize, tol: f64) -> SpectralResult<f64> {
    let n = t.n();
    if index < 1 || index > n {
        return Err(SpectralError::IndexOutOfRange { index, n });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(SpectralError::InvalidTolerance(tol));
    }
    let (mut lo, mut hi) = t.gershgorin_bounds();
    if hi - lo <= tol {
        return Ok(0.5 * (lo + hi));
    }
    let iterations = 1 + ((hi - lo) / tol).log2().ceil() as usize;
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if negcount(t, mid) >= index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All eigenvalues, ascending, each accurate to machine precision relative
/// to ‖T‖ (well inside any practical `tol`). Implicit-shift QL; hitting the
/// sweep budget is reported, never swallowed.
pub fn all_eigenvalues(t: &TridiagonalMatrix, tol: f64) -> SpectralResult<Spectrum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SpectralError::InvalidTolerance(tol));
    }
    let values = ql_eigenvalues(t)?;
    Ok(Spectrum {
        values,
        normalized: false,
    })
}

fn ql_eigenvalues(t: &TridiagonalMatrix) -> SpectralResult<Vec<f64>> {
    let n = t.n();
    let mut d = t.diag().to_vec();
    if n == 1 {
        return Ok(d);
    }
    let mut e = t.subdiag().to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // locate the first negligible off-diagonal at or after l
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(SpectralError::NoConvergence {
                    index: l,
                    budget: MAX_QL_SWEEPS,
                });
            }
            // implicit shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot_fast(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot_fast(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                let inv_r = 1.0 / r;
                s = f * inv_r;
                c = g * inv_r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// √(a² + b²); plain form is safe here since all inputs stay far from the
/// overflow threshold, and it avoids libm's slow hypot in the QL hot loop.
#[inline]
fn hypot_fast(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Unitary reduction of a Hermitian matrix to canonical real symmetric
/// tridiagonal form. Eigenvalues are preserved to O(n·ulp·‖H‖); zero columns
/// are skipped rather than reflected.
pub fn householder_tridiagonalize(h: &HermitianMatrix) -> TridiagonalMatrix {
    let n = h.n();
    if n == 1 {
        return TridiagonalMatrix::new(vec![h.get(0, 0).re], Vec::new()).expect("1x1");
    }

    // Packed lower triangle, split into re/im planes so the O(n³) loops
    // autovectorize.
    let row_off = |i: usize| i * (i + 1) / 2;
    let len = n * (n + 1) / 2;
    let mut are = vec![0.0f64; len];
    let mut aim = vec![0.0f64; len];
    for i in 0..n {
        for j in 0..=i {
            let v = h.get(i, j);
            are[row_off(i) + j] = v.re;
            aim[row_off(i) + j] = v.im;
        }
    }

    let mut sub = vec![0.0f64; n - 1];
    let mut vre = vec![0.0f64; n];
    let mut vim = vec![0.0f64; n];
    let mut pre = vec![0.0f64; n];
    let mut pim = vec![0.0f64; n];

    for k in 0..n - 1 {
        let m = n - 1 - k; // length of the column below the diagonal
        let mut norm_sq = 0.0;
        for i in 0..m {
            let idx = row_off(k + 1 + i) + k;
            norm_sq += are[idx] * are[idx] + aim[idx] * aim[idx];
        }
        let sigma = norm_sq.sqrt();
        if sigma == 0.0 {
            sub[k] = 0.0;
            continue;
        }
        sub[k] = sigma;
        if m == 1 {
            // a diagonal phase similarity makes the entry real nonnegative;
            // nothing else in the trailing block is affected
            continue;
        }

        // Householder vector v = x - α e₁ with α = -σ·phase(x₀)
        let x0_idx = row_off(k + 1) + k;
        let (x0re, x0im) = (are[x0_idx], aim[x0_idx]);
        let x0abs = (x0re * x0re + x0im * x0im).sqrt();
        let (phre, phim) = if x0abs > 0.0 {
            (x0re / x0abs, x0im / x0abs)
        } else {
            (1.0, 0.0)
        };
        for i in 1..m {
            let idx = row_off(k + 1 + i) + k;
            vre[i] = are[idx];
            vim[i] = aim[idx];
        }
        vre[0] = x0re + sigma * phre;
        vim[0] = x0im + sigma * phim;
        let tau = 1.0 / (norm_sq + sigma * x0abs);

        // p = τ · A_sub v over the packed lower triangle
        pre[..m].fill(0.0);
        pim[..m].fill(0.0);
        for i in 0..m {
            let start = row_off(k + 1 + i) + k + 1;
            let rre = &are[start..start + i + 1];
            let rim = &aim[start..start + i + 1];
            let (vri, vii) = (vre[i], vim[i]);
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for j in 0..i {
                // p_i += A[i][j] v_j ; p_j += conj(A[i][j]) v_i
                let (ar, ai) = (rre[j], rim[j]);
                acc_re += ar * vre[j] - ai * vim[j];
                acc_im += ar * vim[j] + ai * vre[j];
                pre[j] += ar * vri + ai * vii;
                pim[j] += ar * vii - ai * vri;
            }
            // diagonal entry is real up to roundoff
            pre[i] += acc_re + rre[i] * vri;
            pim[i] += acc_im + rre[i] * vii;
        }
        for i in 0..m {
            pre[i] *= tau;
            pim[i] *= tau;
        }

        // q = p - κ v with κ = τ (v*p)/2 ; v*p is real for Hermitian A
        let mut vdotp = 0.0;
        for i in 0..m {
            vdotp += vre[i] * pre[i] + vim[i] * pim[i];
        }
        let kappa = 0.5 * tau * vdotp;
        for i in 0..m {
            pre[i] -= kappa * vre[i];
            pim[i] -= kappa * vim[i];
        }

        // rank-2 Hermitian update A_sub ← A_sub − q v* − v q*
        for i in 0..m {
            let start = row_off(k + 1 + i) + k + 1;
            let (qri, qii) = (pre[i], pim[i]);
            let (vri, vii) = (vre[i], vim[i]);
            let rre = &mut are[start..start + i + 1];
            let rim = &mut aim[start..start + i + 1];
            for j in 0..=i {
                let (vrj, vij) = (vre[j], vim[j]);
                let (qrj, qij) = (pre[j], pim[j]);
                rre[j] -= qri * vrj + qii * vij + vri * qrj + vii * qij;
                rim[j] -= qii * vrj - qri * vij + vii * qrj - vri * qij;
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| are[row_off(i) + i]).collect();
    TridiagonalMatrix::new(diag, sub).expect("reduction yields canonical form")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    fn two_by_two() -> TridiagonalMatrix {
        // spectrum {-1, +1}
        TridiagonalMatrix::new(vec![0.0, 0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert_eq!(
            TridiagonalMatrix::new(vec![], vec![]).unwrap_err(),
            SpectralError::Empty
        );
        assert!(matches!(
            TridiagonalMatrix::new(vec![1.0, 2.0], vec![]).unwrap_err(),
            SpectralError::LengthMismatch { .. }
        ));
        assert_eq!(
            TridiagonalMatrix::new(vec![1.0, f64::NAN], vec![0.0]).unwrap_err(),
            SpectralError::NonFiniteEntry
        );
        assert_eq!(
            TridiagonalMatrix::new(vec![1.0, 1.0], vec![-0.5]).unwrap_err(),
            SpectralError::NegativeSubdiagonal
        );
    }

    #[test]
    fn negcount_two_by_two() {
        let t = two_by_two();
        assert_eq!(negcount(&t, 0.0), 1);
        assert_eq!(negcount(&t, -2.0), 0);
        assert_eq!(negcount(&t, 2.0), 2);
        assert_eq!(counting_function(&t, 0.0, false), 1);
        assert_eq!(counting_function(&t, -3.0, false), 2);
    }

    #[test]
    fn negcount_below_gershgorin_is_zero() {
        let mut rng = SeedStream::new(5, 0).rng();
        for _ in 0..20 {
            let n = 17;
            let diag: Vec<f64> = (0..n).map(|_| 3.0 * rng.standard_normal()).collect();
            let sub: Vec<f64> = (0..n - 1).map(|_| rng.uniform() * 2.0).collect();
            let t = TridiagonalMatrix::new(diag, sub).unwrap();
            let (lo, hi) = t.gershgorin_bounds();
            assert_eq!(negcount(&t, lo - 1e-9), 0);
            assert_eq!(negcount(&t, hi + 1e-9), n);
        }
    }

    #[test]
    fn negcount_identity_spectrum() {
        let n = 9;
        let t = TridiagonalMatrix::new(vec![1.0; n], vec![0.0; n - 1]).unwrap();
        assert_eq!(negcount(&t, 2.0), n);
        assert_eq!(counting_function(&t, 2.0, false), 0);
        assert_eq!(counting_function(&t, 0.5, false), n);
    }

    #[test]
    fn negcount_monotone_in_y() {
        let mut rng = SeedStream::new(6, 1).rng();
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.uniform()).collect();
        let t = TridiagonalMatrix::new(diag, sub).unwrap();
        let mut prev = 0;
        let mut y = -8.0;
        while y <= 8.0 {
            let c = negcount(&t, y);
            assert!(c >= prev);
            prev = c;
            y += 0.05;
        }
    }

    #[test]
    fn counting_function_interval_additivity() {
        let mut rng = SeedStream::new(7, 2).rng();
        let n = 30;
        let diag: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.uniform()).collect();
        let t = TridiagonalMatrix::new(diag, sub).unwrap();
        let spec = all_eigenvalues(&t, 1e-12).unwrap();
        for _ in 0..50 {
            let y1 = 6.0 * rng.uniform() - 3.0;
            let y2 = y1 + 2.0 * rng.uniform();
            let in_between = spec
                .values()
                .iter()
                .filter(|&&v| v >= y1 && v < y2)
                .count();
            let diff =
                counting_function(&t, y1, false) - counting_function(&t, y2, false);
            assert_eq!(diff, in_between);
        }
    }

    #[test]
    fn kth_eigenvalue_two_by_two() {
        let t = two_by_two();
        let tol = 1e-11;
        assert!((kth_eigenvalue(&t, 1, tol).unwrap() + 1.0).abs() <= tol);
        assert!((kth_eigenvalue(&t, 2, tol).unwrap() - 1.0).abs() <= tol);
        assert!(matches!(
            kth_eigenvalue(&t, 0, tol),
            Err(SpectralError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            kth_eigenvalue(&t, 3, tol),
            Err(SpectralError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn kth_eigenvalue_is_monotone_and_matches_diagonal() {
        let diag = vec![3.0, -1.0, 2.0, 0.5, -4.0];
        let t = TridiagonalMatrix::new(diag.clone(), vec![0.0; 4]).unwrap();
        let mut sorted = diag;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for (i, want) in sorted.iter().enumerate() {
            let lam = kth_eigenvalue(&t, i + 1, 1e-12).unwrap();
            assert!((lam - want).abs() <= 1e-11);
            assert!(lam >= prev);
            prev = lam;
        }
    }

    #[test]
    fn all_eigenvalues_two_by_two_and_trace() {
        let t = two_by_two();
        let spec = all_eigenvalues(&t, 1e-12).unwrap();
        assert!((spec.values()[0] + 1.0).abs() < 1e-14);
        assert!((spec.values()[1] - 1.0).abs() < 1e-14);

        let mut rng = SeedStream::new(8, 3).rng();
        let n = 60;
        let diag: Vec<f64> = (0..n).map(|_| 2.0 * rng.standard_normal()).collect();
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.uniform()).collect();
        let t = TridiagonalMatrix::new(diag, sub).unwrap();
        let spec = all_eigenvalues(&t, 1e-10).unwrap();
        let sum: f64 = spec.values().iter().sum();
        let bound = n as f64 * 1e-10 + n as f64 * f64::EPSILON * t.inf_norm();
        assert!((sum - t.trace()).abs() < bound.max(1e-9));
    }

    #[test]
    fn all_eigenvalues_clean_chain_closed_form() {
        // d = 0, e = 1: eigenvalues 2cos(kπ/(n+1))
        let n = 50;
        let t = TridiagonalMatrix::new(vec![0.0; n], vec![1.0; n - 1]).unwrap();
        let spec = all_eigenvalues(&t, 1e-12).unwrap();
        for k in 1..=n {
            let exact = 2.0 * ((n + 1 - k) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!(
                (spec.values()[k - 1] - exact).abs() < 1e-12,
                "k={k}: {} vs {exact}",
                spec.values()[k - 1]
            );
        }
    }

    #[test]
    fn ql_and_negcount_are_consistent() {
        let mut rng = SeedStream::new(9, 4).rng();
        for trial in 0..20 {
            let n = 35;
            let diag: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let sub: Vec<f64> = (0..n - 1).map(|_| 1.5 * rng.uniform()).collect();
            let t = TridiagonalMatrix::new(diag, sub).unwrap();
            let tol = 1e-10;
            let spec = all_eigenvalues(&t, tol).unwrap();
            for (i, &lam) in spec.values().iter().enumerate() {
                assert!(
                    negcount(&t, lam - 2.0 * tol) <= i,
                    "trial {trial}: too many below λ_{}", i + 1
                );
                assert!(
                    negcount(&t, lam + 2.0 * tol) >= i + 1,
                    "trial {trial}: too few below λ_{}", i + 1
                );
            }
        }
    }

    #[test]
    fn bisection_and_ql_agree() {
        let mut rng = SeedStream::new(10, 5).rng();
        let n = 25;
        let diag: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.uniform()).collect();
        let t = TridiagonalMatrix::new(diag, sub).unwrap();
        let tol = 1e-11;
        let spec = all_eigenvalues(&t, tol).unwrap();
        for i in 1..=n {
            let lam = kth_eigenvalue(&t, i, tol).unwrap();
            assert!((lam - spec.values()[i - 1]).abs() <= 2.0 * tol);
        }
    }

    #[test]
    fn duality_counting_vs_kth_eigenvalue() {
        // N_{[y,∞)} ≤ n−i  ⇔  λ_i ≤ y (within bisection tolerance)
        let mut rng = SeedStream::new(11, 6).rng();
        let n = 50;
        let tol = 1e-10;
        for _ in 0..1000 {
            let diag: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
            let sub: Vec<f64> = (0..n - 1).map(|_| rng.uniform()).collect();
            let t = TridiagonalMatrix::new(diag, sub).unwrap();
            let y = 5.0 * rng.uniform() - 2.5;
            let i = 1 + (rng.next_u64() % n as u64) as usize;
            let count = counting_function(&t, y, false);
            let lam = kth_eigenvalue(&t, i, tol).unwrap();
            assert_eq!(count <= n - i, lam <= y + 2.0 * tol);
        }
    }

    #[test]
    fn householder_keeps_diagonal_matrices() {
        let mut h = HermitianMatrix::zeros(5);
        for i in 0..5 {
            h.set_upper(i, i, Complex64::new(i as f64 - 2.0, 0.0));
        }
        let t = householder_tridiagonalize(&h);
        assert_eq!(t.diag(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(t.subdiag(), &[0.0; 4]);
    }

    #[test]
    fn householder_tridiagonal_passthrough_is_exact_on_dyadic_entries() {
        // dyadic entries make every internal division exact, so the reduction
        // fixed point is bit-for-bit
        let diag = [1.0, 2.0, 3.0, 4.0];
        let sub = [1.0, 0.5, 2.0];
        let mut h = HermitianMatrix::zeros(4);
        for i in 0..4 {
            h.set_upper(i, i, Complex64::new(diag[i], 0.0));
        }
        for i in 0..3 {
            h.set_upper(i, i + 1, Complex64::new(sub[i], 0.0));
        }
        let t = householder_tridiagonalize(&h);
        assert_eq!(t.diag(), &diag);
        assert_eq!(t.subdiag(), &sub);
    }

    #[test]
    fn householder_tridiagonal_passthrough_general_entries() {
        let diag = [0.3, -1.7, 2.9, 0.11, -0.4];
        let sub = [1.3, 0.0, 0.7, 2.2];
        let mut h = HermitianMatrix::zeros(5);
        for i in 0..5 {
            h.set_upper(i, i, Complex64::new(diag[i], 0.0));
        }
        for i in 0..4 {
            h.set_upper(i, i + 1, Complex64::new(sub[i], 0.0));
        }
        let t = householder_tridiagonalize(&h);
        for i in 0..5 {
            assert!((t.diag()[i] - diag[i]).abs() < 1e-13);
        }
        for i in 0..4 {
            assert!((t.subdiag()[i] - sub[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn householder_all_ones_rank_one_spectrum() {
        let n = 3;
        let mut h = HermitianMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                h.set_upper(i, j, Complex64::new(1.0, 0.0));
            }
        }
        let t = householder_tridiagonalize(&h);
        let spec = all_eigenvalues(&t, 1e-13).unwrap();
        assert!(spec.values()[0].abs() < 1e-12);
        assert!(spec.values()[1].abs() < 1e-12);
        assert!((spec.values()[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_normalization_applies_once() {
        let t = TridiagonalMatrix::new(vec![2.0, -2.0, 0.0, 1.0], vec![0.0; 3]).unwrap();
        let spec = all_eigenvalues(&t, 1e-12).unwrap().into_normalized();
        assert!(spec.is_normalized());
        assert!((spec.values()[0] + 1.0).abs() < 1e-14); // -2/√4
        assert_eq!(spec.count_at_least(0.0), 3);
    }

    #[test]
    #[should_panic(expected = "already normalized")]
    fn double_normalization_panics() {
        let t = TridiagonalMatrix::new(vec![1.0], vec![]).unwrap();
        let _ = all_eigenvalues(&t, 1e-12)
            .unwrap()
            .into_normalized()
            .into_normalized();
    }
}
