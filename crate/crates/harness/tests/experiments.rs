//! Runner-level behavior: flags, rejections, determinism, and the cheap
//! statistical properties.

use wigner_core::ensembles::{sample_tridiagonal_beta, Beta};
use wigner_core::spectral::{all_eigenvalues, counting_function, kth_eigenvalue};
use wigner_core::SeedStream;
use wigner_harness::config::{ConfigError, EnsembleId, ExperimentConfig};
use wigner_harness::experiments::{
    run_clt, run_counting, run_fluctuation, run_interlacing, run_rigidity, run_universality,
    InterlaceRecipe, RunError,
};
use wigner_harness::report::Details;

fn base(ensemble: EnsembleId, n: usize, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        ensemble,
        n_list: vec![n],
        replicates: reps,
        master_seed: seed,
        ..Default::default()
    }
}

#[test]
fn counting_single_replicate_sets_flag() {
    let cfg = base(EnsembleId::GueTridiag, 64, 1, 5);
    let report = run_counting(&cfg).unwrap();
    let r = &report.results[0];
    assert!(r.variance_undefined);
    assert!(r.moments.variance.is_none());
    assert!(r.z_empirical.is_empty());
    assert!(!r.z_theory.is_empty());
    assert!(report.verdicts.is_empty());
    assert!(report.passed);
}

#[test]
fn counting_is_deterministic_across_thread_counts() {
    let mut cfg = base(EnsembleId::GueTridiag, 256, 400, 11);
    cfg.threads = 1;
    let sequential = run_counting(&cfg).unwrap();
    cfg.threads = 4;
    let parallel = run_counting(&cfg).unwrap();
    assert_eq!(sequential.to_json(), parallel.to_json());
    assert_eq!(sequential.to_csv(), parallel.to_csv());
}

#[test]
fn counting_rejects_bad_configs() {
    let mut cfg = base(EnsembleId::GueTridiag, 64, 10, 1);
    cfg.y = -2.5;
    assert!(matches!(
        run_counting(&cfg),
        Err(RunError::Config(ConfigError::YOutsideBulk(_)))
    ));
    let cfg = base(EnsembleId::GueDense, 4096, 10, 1);
    assert!(matches!(
        run_counting(&cfg),
        Err(RunError::Config(ConfigError::DenseCapExceeded { .. }))
    ));
}

#[test]
fn clt_requires_replicates() {
    let cfg = base(EnsembleId::GueTridiag, 128, 100, 1);
    match run_clt(&cfg) {
        Err(RunError::Config(ConfigError::TooFewReplicates {
            experiment: "clt",
            need: 5000,
            got: 100,
        })) => {}
        other => panic!("expected insufficient-replicates error, got {other:?}"),
    }
}

#[test]
fn fluctuation_rejects_edge_indices() {
    let mut cfg = base(EnsembleId::GueTridiag, 1000, 100, 1);
    cfg.index = Some(5); // 0.005 < 0.01: outside the bulk window
    assert!(matches!(
        run_fluctuation(&cfg),
        Err(RunError::Config(ConfigError::IndexOutsideBulk { .. }))
    ));
    cfg.index = Some(999);
    assert!(matches!(
        run_fluctuation(&cfg),
        Err(RunError::Config(ConfigError::IndexOutsideBulk { .. }))
    ));
}

#[test]
fn fluctuation_std_symmetric_in_index_reflection() {
    let n = 512;
    let reps = 2000;
    let mut cfg = base(EnsembleId::GueTridiag, n, reps, 21);
    cfg.index = Some(n / 4);
    let lo = run_fluctuation(&cfg).unwrap();
    cfg.master_seed = 22;
    cfg.index = Some(n - n / 4);
    let hi = run_fluctuation(&cfg).unwrap();

    let std_of = |rep: &wigner_harness::ExperimentReport| match rep.details {
        Details::Fluctuation { sample_std, .. } => sample_std,
        _ => unreachable!(),
    };
    let (s1, s2) = (std_of(&lo), std_of(&hi));
    // SE(std) ≈ std/√(2(R−1)) per side
    let se = ((s1 * s1 + s2 * s2) / (2.0 * (reps as f64 - 1.0))).sqrt();
    assert!(
        (s1 - s2).abs() <= 3.0 * se,
        "std at i and n-i differ: {s1} vs {s2} (3se = {})",
        3.0 * se
    );
}

#[test]
fn interlace_kept_set_is_interlaced() {
    // between consecutive kept (even-position) values lies a discarded one
    let n = 64;
    let tol = 1e-10 * (n as f64).sqrt();
    let a = sample_tridiagonal_beta(n, Beta::One, SeedStream::new(5, 0)).unwrap();
    let b = sample_tridiagonal_beta(n + 1, Beta::One, SeedStream::new(5, 1)).unwrap();
    let ea = all_eigenvalues(&a, tol).unwrap();
    let eb = all_eigenvalues(&b, tol).unwrap();
    let mut merged: Vec<f64> = ea.values().iter().chain(eb.values()).copied().collect();
    merged.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(merged.len(), 2 * n + 1);
    let kept: Vec<f64> = merged
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (i % 2 == 1 && i < 2 * n).then_some(v))
        .collect();
    assert_eq!(kept.len(), n);
    for w in kept.windows(2) {
        let between = merged
            .iter()
            .filter(|&&v| v > w[0] && v < w[1])
            .count();
        assert!(between >= 1, "no discarded value between {} and {}", w[0], w[1]);
    }
}

#[test]
fn interlace_validates_configuration() {
    let cfg = base(EnsembleId::GueTridiag, 64, 100, 1);
    assert!(matches!(
        run_interlacing(&cfg, InterlaceRecipe::Matched),
        Err(RunError::Config(ConfigError::TooFewReplicates { .. }))
    ));
    let cfg = base(EnsembleId::GueTridiag, 2048, 2000, 1);
    assert!(matches!(
        run_interlacing(&cfg, InterlaceRecipe::Matched),
        Err(RunError::Config(ConfigError::NCapExceeded { .. }))
    ));
    let cfg = base(EnsembleId::GoeDense, 64, 2000, 1);
    assert!(matches!(
        run_interlacing(&cfg, InterlaceRecipe::Matched),
        Err(RunError::Config(ConfigError::WrongEnsemble { .. }))
    ));
}

#[test]
fn rigidity_caps_and_profile_shape() {
    let cfg = base(EnsembleId::GueTridiag, 64, 2000, 1);
    assert!(matches!(
        run_rigidity(&cfg),
        Err(RunError::Config(ConfigError::TooManyReplicates { .. }))
    ));

    let mut cfg = base(EnsembleId::GueTridiag, 256, 50, 9);
    cfg.epsilon = 0.2;
    let report = run_rigidity(&cfg).unwrap();
    match &report.details {
        Details::Rigidity {
            bulk_first,
            bulk_last,
            profile,
            frac_replicates_within_log_sq_window,
            violation_replicate_fraction,
            fitted_exponent,
            ..
        } => {
            assert_eq!(*bulk_first, 52); // ceil(0.2·256)
            assert_eq!(*bulk_last, 204); // floor(0.8·256)
            assert!((0.0..=1.0).contains(frac_replicates_within_log_sq_window));
            assert!((0.0..=1.0).contains(violation_replicate_fraction));
            assert!(fitted_exponent.is_finite());
            assert!(!profile.indices.is_empty());
            assert!(profile.indices.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(profile.indices.len(), profile.mean_dev.len());
            assert_eq!(profile.indices.len(), profile.se_dev.len());
            // grid is symmetry-closed where the mirror stays in the bulk
            let n = 256;
            let in_bulk =
                |i: usize| (*bulk_first..=*bulk_last).contains(&i);
            for &i in &profile.indices {
                let mirror = n + 1 - i;
                if in_bulk(mirror) {
                    assert!(
                        profile.indices.binary_search(&mirror).is_ok(),
                        "mirror {mirror} of {i} missing from grid"
                    );
                }
            }
            // deviations are sane on this scale
            assert!(profile.mean_dev.iter().all(|&d| d > 0.0 && d < 0.5));
        }
        other => panic!("unexpected details {other:?}"),
    }
    assert_eq!(report.results[0].statistic, "max-deviation");
}

#[test]
fn rigidity_profile_is_statistically_symmetric() {
    let mut cfg = base(EnsembleId::GueTridiag, 512, 120, 33);
    cfg.epsilon = 0.15;
    let report = run_rigidity(&cfg).unwrap();
    let Details::Rigidity { profile, .. } = &report.details else {
        panic!("wrong details");
    };
    let n = 512;
    let mut checked = 0;
    for (k, &i) in profile.indices.iter().enumerate() {
        let mirror = n + 1 - i;
        if let Ok(km) = profile.indices.binary_search(&mirror) {
            if km <= k {
                continue;
            }
            let (m1, m2) = (profile.mean_dev[k], profile.mean_dev[km]);
            let se = (profile.se_dev[k].powi(2) + profile.se_dev[km].powi(2)).sqrt();
            assert!(
                (m1 - m2).abs() <= 4.0 * se,
                "asymmetric mean deviation at {i}/{mirror}: {m1} vs {m2} (se {se})"
            );
            checked += 1;
        }
    }
    assert!(checked > 50, "only {checked} symmetric pairs checked");
}

#[test]
fn universality_contrast_run_claims_nothing() {
    let cfg = base(EnsembleId::WignerRademacher, 128, 400, 3);
    let report = run_universality(&cfg).unwrap();
    assert!(report.verdicts.is_empty());
    assert!(report.passed);
    match &report.details {
        Details::Universality {
            matched_to_order,
            verdict_claimed,
            probes,
            ..
        } => {
            assert_eq!(*matched_to_order, 2);
            assert!(!verdict_claimed);
            assert_eq!(probes.len(), 3);
            for p in probes {
                assert!((0.0..=1.0).contains(&p.p_matched));
                assert!((0.0..=1.0).contains(&p.p_reference));
            }
        }
        other => panic!("unexpected details {other:?}"),
    }
}

#[test]
fn universality_rejects_gaussian_ensembles() {
    let cfg = base(EnsembleId::GueTridiag, 128, 400, 3);
    assert!(matches!(
        run_universality(&cfg),
        Err(RunError::Config(ConfigError::WrongEnsemble { .. }))
    ));
}

#[test]
fn counting_and_eigenvalue_duality_end_to_end() {
    // replicate streams are shared between experiments: the same
    // (seed, replicate) pair reproduces the same matrix, so the count and
    // the selected eigenvalue must satisfy N ≤ n−i ⇔ λ_i ≤ y.
    let n = 256;
    let index = 100;
    let y = 0.13;
    let seed = 77;
    let tol = 1e-10;
    for r in 0..200 {
        let t = sample_tridiagonal_beta(n, Beta::Two, SeedStream::new(seed, r)).unwrap();
        let count = counting_function(&t, y, true);
        let lam =
            kth_eigenvalue(&t, index, tol * (n as f64).sqrt()).unwrap() / (n as f64).sqrt();
        assert_eq!(
            count <= n - index,
            lam <= y + 2.0 * tol,
            "replicate {r}: count {count}, λ_{index} = {lam}"
        );
    }
}

#[test]
fn reports_roundtrip_through_json() {
    let cfg = base(EnsembleId::GueTridiag, 128, 50, 2);
    let mut report = run_counting(&cfg).unwrap();
    let json = report.to_json();
    let parsed = wigner_harness::ExperimentReport::from_json(&json).unwrap();
    // canonical form is stable under a parse/serialize cycle
    assert_eq!(parsed.to_json(), json);
    // structurally lossless apart from the unserialized timing
    report.timing = Default::default();
    assert_eq!(parsed, report);
}
