use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psimax::analytic::{expected_bs_for_target, stevens_cdf, stopping_time_estimate, weighted_cdf};
use psimax::geometry::AngleSet;

#[test]
fn stevens_is_monotone_in_phi_and_l() {
    let grid: Vec<f64> = (1..=256).map(|k| TAU * k as f64 / 256.0).collect();
    let table: Vec<Vec<f64>> = (2..=30)
        .map(|l| grid.iter().map(|&phi| stevens_cdf(l, phi).unwrap()).collect())
        .collect();
    for (i, row) in table.iter().enumerate() {
        assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(row.windows(2).all(|w| w[1] >= w[0]), "L={} not monotone in phi", i + 2);
    }
    for pair in table.windows(2) {
        for (k, (hi, lo)) in pair[1].iter().zip(&pair[0]).enumerate() {
            assert!(hi >= lo, "k={k}: {hi} < {lo}");
        }
    }
}

#[test]
fn stevens_matches_monte_carlo() {
    const DRAWS: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for l in [3usize, 5, 8] {
        let psi: Vec<f64> = (0..DRAWS)
            .map(|_| {
                AngleSet::from_bearings((0..l).map(|_| rng.random::<f64>() * TAU))
                    .unwrap()
                    .psi_max()
            })
            .collect();
        for k in 1..=16 {
            let phi = TAU * k as f64 / 16.0;
            let p = stevens_cdf(l, phi).unwrap();
            let hat = psi.iter().filter(|&&v| v <= phi).count() as f64 / DRAWS as f64;
            let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
            assert!((hat - p).abs() <= 3.0 * se, "L={l} phi={phi}: {hat} vs {p} (se {se})");
        }
    }
}

#[test]
fn expected_count_matches_stopping_time_across_targets() {
    for k in 5..=15 {
        let phi = TAU * k as f64 / 16.0;
        let e = expected_bs_for_target(phi).unwrap();
        assert!(!e.is_fallback());
        let (mc, _) = stopping_time_estimate(phi, 50_000, k).unwrap();
        assert!((e.value - mc).abs() / mc < 0.01, "phi={phi}: {} vs {mc}", e.value);
    }
}

#[test]
fn expected_count_decreases_with_target() {
    let values: Vec<f64> = (3..64)
        .map(|k| expected_bs_for_target(TAU * k as f64 / 64.0).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(values.iter().all(|&v| v > 2.0));
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 500,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn weighted_lies_between_its_components(
        weights in prop::collection::vec(0.0f64..1.0, 1..12),
        phi in 0.01f64..TAU,
    ) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let mut pmf = vec![0.0; 3];
        pmf.extend(weights.iter().map(|w| w / total));
        let w = weighted_cdf(phi, &pmf, 3).unwrap();
        let parts: Vec<f64> = (3..pmf.len())
            .filter(|&l| pmf[l] > 0.0)
            .map(|l| stevens_cdf(l, phi).unwrap())
            .collect();
        let lo = parts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = parts.iter().copied().fold(0.0, f64::max);
        prop_assert!(w.value >= lo - 1e-12 && w.value <= hi + 1e-12);
    }

    #[test]
    fn one_point_pmf_is_stevens(l in 3usize..40, phi in 0.01f64..TAU) {
        let mut pmf = vec![0.0; l + 1];
        pmf[l] = 1.0;
        prop_assert_eq!(weighted_cdf(phi, &pmf, 3).unwrap().value, stevens_cdf(l, phi).unwrap());
    }
}
