//! Independent test oracles, compiled only with the `oracles` feature.
//!
//! Nothing here shares code with the production paths it is used to check.

use num_complex::Complex64;

use crate::spectral::HermitianMatrix;

/// Eigenvalues of H strictly below y, by dense LDL* elimination on H − yI:
/// the number of negative pivots equals the inertia (Sylvester), and the
/// pivots are the ratios of leading principal minors, i.e. the classical
/// Sturm chain of the shifted matrix.
///
/// No pivot guard: intended for shifts y drawn away from the spectrum.
pub fn dense_negcount(h: &HermitianMatrix, y: f64) -> usize {
    let n = h.n();
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = h.get(i, j);
            if i == j {
                v -= y;
            }
            a[i * n + j] = v;
        }
    }
    let mut negatives = 0;
    for k in 0..n {
        let pivot = a[k * n + k].re;
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            for j in k + 1..n {
                let sub = factor * a[k * n + j];
                a[i * n + j] -= sub;
            }
        }
    }
    negatives
}
