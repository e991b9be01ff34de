use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psimax::analytic::stevens_cdf;
use psimax::geometry::AngleSet;
use psimax::stats::{ecdf, ks_statistic, pearson_r, quantile, spearman_rho};

/// Paired samples on a coarse grid so ties occur and every value is exact.
fn grid_pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-40i32..40, -40i32..40), 3..60).prop_map(|v| {
        v.into_iter()
            .map(|(a, b)| (a as f64 / 4.0, b as f64 / 4.0))
            .unzip()
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn spearman_ignores_increasing_transforms((x, y) in grid_pairs()) {
        let Ok(r) = spearman_rho(&x, &y) else { return Ok(()) };
        let tx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        let ty: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        prop_assert_eq!(spearman_rho(&tx, &ty).unwrap(), r);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
    }

    #[test]
    fn pearson_ignores_positive_affine_maps(
        (x, y) in grid_pairs(),
        scale in 0.01f64..100.0,
        shift in -1e3f64..1e3,
    ) {
        let Ok(r) = pearson_r(&x, &y, false) else { return Ok(()) };
        let ty: Vec<f64> = y.iter().map(|v| scale * v + shift).collect();
        let s = pearson_r(&x, &ty, false).unwrap();
        prop_assert!((s.r - r.r).abs() <= 1e-12, "{} vs {}", s.r, r.r);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r.r));
        prop_assert_eq!(r.used, x.len());
    }

    #[test]
    fn ecdf_is_a_valid_table(v in prop::collection::vec(-1e6f64..1e6, 1..200), n_inf in 0usize..5) {
        let mut all = v.clone();
        all.extend(std::iter::repeat_n(f64::INFINITY, n_inf));
        let e = ecdf(&all).unwrap();
        let t = e.table();
        prop_assert!(t.x().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(t.f().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(t.f().iter().all(|f| (0.0..=1.0).contains(f)));
        let top = *t.f().last().unwrap();
        prop_assert!((top + e.infinite_mass() - 1.0).abs() < 1e-12);
        prop_assert_eq!(e.eval(f64::INFINITY), 1.0);
        // The ECDF counts exactly the sample values at or below each point.
        for &x in &v {
            let below = all.iter().filter(|&&a| a <= x).count() as f64 / all.len() as f64;
            prop_assert!((e.eval(x) - below).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_is_a_sample_value(v in prop::collection::vec(-1e3f64..1e3, 1..100), q in 0.0f64..=1.0) {
        let x = quantile(&v, q).unwrap();
        prop_assert!(v.contains(&x));
        let at_most = v.iter().filter(|&&a| a <= x).count() as f64;
        prop_assert!(at_most >= q * v.len() as f64);
    }
}

#[test]
fn uniform_samples_pass_dkw() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
    let d = ks_statistic(&u, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(d < 0.01, "{d}");
}

#[test]
fn max_gap_samples_fit_stevens() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for l in [3usize, 6] {
        let psi: Vec<f64> = (0..10_000)
            .map(|_| {
                AngleSet::from_bearings((0..l).map(|_| rng.random::<f64>() * TAU))
                    .unwrap()
                    .psi_max()
            })
            .collect();
        let d = ks_statistic(&psi, |phi| stevens_cdf(l, phi).unwrap()).unwrap();
        assert!(d < 0.015, "L={l}: {d}");
    }
}

#[test]
fn perfect_relations() {
    let x: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
    let exp: Vec<f64> = x.iter().map(|v| v.exp()).collect();
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let lin: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
    assert_eq!(spearman_rho(&x, &exp).unwrap(), 1.0);
    assert!((spearman_rho(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
    assert!((pearson_r(&x, &lin, false).unwrap().r - 1.0).abs() < 1e-12);
    assert!((pearson_r(&x, &exp, true).unwrap().r - 1.0).abs() < 1e-12);
    assert!((pearson_r(&x, &neg, false).unwrap().r + 1.0).abs() < 1e-12);
}

#[test]
fn infinite_pairs_are_excluded_from_pearson() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [2.0, 4.0, f64::INFINITY, 8.0];
    let p = pearson_r(&x, &y, false).unwrap();
    assert_eq!((p.used, p.excluded), (3, 1));
    assert!((p.r - 1.0).abs() < 1e-12);
    // Spearman keeps the pair and ranks it highest.
    let tail = [2.0, 4.0, 8.0, f64::INFINITY];
    assert!((spearman_rho(&x, &tail).unwrap() - 1.0).abs() < 1e-15);
    assert!(spearman_rho(&x, &y).unwrap() < 1.0);
}
