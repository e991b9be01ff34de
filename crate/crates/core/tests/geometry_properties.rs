use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;

use psimax::geometry::{
    gdop_bound, gdop_tdoa, gdop_toa_anglesum, gdop_toa_matrix, inside_convex_hull, AngleSet,
    HullMembership,
};

fn unit(t: f64) -> [f64; 2] {
    [t.cos(), t.sin()]
}

/// TOA GDOP from a dense 2×2 inverse.
fn toa_oracle(bearings: &[f64]) -> f64 {
    let mut j = Matrix2::zeros();
    for &t in bearings {
        let [c, s] = unit(t);
        j += Matrix2::new(c * c, c * s, c * s, s * s);
    }
    j.try_inverse().map_or(f64::INFINITY, |inv| inv.trace().sqrt())
}

/// TDOA GDOP with the correlated difference noise inverted densely.
fn tdoa_oracle(bearings: &[f64], reference: usize) -> f64 {
    let l = bearings.len();
    let r = unit(bearings[reference]);
    let others: Vec<usize> = (0..l).filter(|&i| i != reference).collect();
    let h = DMatrix::from_fn(l - 1, 2, |row, col| unit(bearings[others[row]])[col] - r[col]);
    let cov = DMatrix::from_fn(l - 1, l - 1, |a, b| if a == b { 2.0 } else { 1.0 });
    let fisher = h.transpose() * cov.try_inverse().unwrap() * &h;
    fisher
        .try_inverse()
        .map_or(f64::INFINITY, |inv| inv.trace().sqrt())
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Bearings whose gaps all exceed `min_gap`, so every GDOP is well conditioned.
fn spread_bearings(max_l: usize, min_gap: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..TAU, 3..=max_l).prop_filter("gaps too small", move |b| {
        AngleSet::from_bearings(b.iter().copied())
            .unwrap()
            .gaps()
            .all(|g| g > min_gap)
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 2000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn gaps_sum_to_full_circle(b in prop::collection::vec(-100.0f64..100.0, 1..20)) {
        let a = AngleSet::from_bearings(b).unwrap();
        prop_assert!((a.gaps().sum::<f64>() - TAU).abs() < 1e-12);
        prop_assert!(a.bearings().iter().all(|&t| (0.0..TAU).contains(&t)));
    }

    #[test]
    fn toa_forms_agree_with_dense_oracle(b in prop::collection::vec(0.0..TAU, 2..=12)) {
        let a = AngleSet::from_bearings(b.iter().copied()).unwrap();
        let m = gdop_toa_matrix(&a).unwrap();
        let s = gdop_toa_anglesum(&a).unwrap();
        prop_assert!(rel(m, s) <= 1e-9, "{} vs {}", m, s);
        let o = toa_oracle(a.bearings());
        // The plain f64 oracle loses ~GDOP² ulps; compare where that stays small.
        if m < 100.0 {
            prop_assert!(rel(m, o) <= 1e-9, "{} vs oracle {}", m, o);
        }
    }

    #[test]
    fn toa_bound_holds(b in spread_bearings(12, 1e-3)) {
        let a = AngleSet::from_bearings(b).unwrap();
        let psi = a.psi_max();
        prop_assume!(psi.sin() != 0.0);
        prop_assert!(gdop_toa_matrix(&a).unwrap() <= gdop_bound(a.len(), psi) * (1.0 + 1e-12));
    }

    #[test]
    fn tdoa_matches_dense_oracle_for_every_reference(b in spread_bearings(10, 0.05)) {
        let a = AngleSet::from_bearings(b).unwrap();
        let first = gdop_tdoa(&a, 0).unwrap();
        for r in 0..a.len() {
            let g = gdop_tdoa(&a, r).unwrap();
            prop_assert!(rel(g, first) <= 1e-9, "reference {}: {} vs {}", r, g, first);
            let o = tdoa_oracle(a.bearings(), r);
            prop_assert!(rel(g, o) <= 1e-9, "reference {}: {} vs oracle {}", r, g, o);
        }
    }

    #[test]
    fn rotation_changes_nothing(b in spread_bearings(12, 0.01), rot in -10.0f64..10.0) {
        let a = AngleSet::from_bearings(b).unwrap();
        let r = a.rotated(rot);
        prop_assert!(rel(r.psi_max(), a.psi_max()) <= 1e-12);
        prop_assert!(rel(gdop_toa_matrix(&r).unwrap(), gdop_toa_matrix(&a).unwrap()) <= 1e-12);
        prop_assert!(rel(gdop_toa_anglesum(&r).unwrap(), gdop_toa_anglesum(&a).unwrap()) <= 1e-12);
        prop_assert!(rel(gdop_tdoa(&r, 0).unwrap(), gdop_tdoa(&a, 0).unwrap()) <= 1e-12);
        prop_assume!((a.psi_max() - PI).abs() > 1e-9);
        prop_assert_eq!(inside_convex_hull(&r).unwrap(), inside_convex_hull(&a).unwrap());
    }

    #[test]
    fn hull_follows_psi_max(b in prop::collection::vec(0.0..TAU, 3..=12)) {
        let a = AngleSet::from_bearings(b).unwrap();
        let m = inside_convex_hull(&a).unwrap();
        let psi = a.psi_max();
        if m != HullMembership::Boundary {
            prop_assert_eq!(m.is_inside(), psi < PI);
        } else {
            prop_assert!((psi - PI).abs() < 1e-12);
        }
    }
}

#[test]
fn equally_spaced_sets_decrease_as_two_over_root_l() {
    let mut prev = f64::INFINITY;
    for l in 3..=64usize {
        let a = AngleSet::from_bearings((0..l).map(|k| TAU * k as f64 / l as f64)).unwrap();
        let g = gdop_toa_matrix(&a).unwrap();
        assert!(rel(g, 2.0 / (l as f64).sqrt()) < 1e-12, "L={l}: {g}");
        assert!(g < prev);
        prev = g;
    }
}

#[test]
fn antipodal_pairs_sit_on_the_boundary() {
    for t in [0.0, 0.3, 1.0, 2.5] {
        let a = AngleSet::from_bearings([t, t + PI, t + 0.5]).unwrap();
        assert_eq!(inside_convex_hull(&a).unwrap(), HullMembership::Boundary);
    }
}
