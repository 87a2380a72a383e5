//! Randomized invariants of the transforms, projections and evolution.

mod common;

use common::{random_general_state, random_hardy_state, rel_diff, rng};
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;
use timeop_core::{
    decay_window, evolve, from_tau, inner, lambda_to_nue, nue_to_lambda, project_p, survival, to_tau, w_apply,
    LambdaKernel, SpectralGrid, TauCut,
};

fn grid() -> SpectralGrid {
    SpectralGrid::with_energy_samples(20.0, 2048, 3).unwrap()
}

fn cut() -> impl Strategy<Value = f64> {
    -20.0..20.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip_and_parseval(seed in any::<u64>()) {
        let s = random_general_state(&mut rng(seed), &grid());
        let ts = to_tau(&s);
        prop_assert!((ts.norm_sqr() - s.norm_sqr()).abs() < 1e-12);
        prop_assert!(rel_diff(&from_tau(&ts), &s) < 1e-13);
    }

    #[test]
    fn projection_is_orthogonal(seed in any::<u64>(), tau in cut()) {
        let mut r = rng(seed);
        let a = random_general_state(&mut r, &grid());
        let b = random_general_state(&mut r, &grid());
        let pa = project_p(&a, tau);
        prop_assert!((&project_p(&pa, tau) - &pa).norm() < 1e-12);
        let lhs = inner(&pa, &b).unwrap();
        let rhs = inner(&a, &project_p(&b, tau)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!(pa.norm() <= a.norm() + 1e-12);
    }

    #[test]
    fn projections_are_nested(seed in any::<u64>(), t1 in cut(), t2 in cut()) {
        let s = random_general_state(&mut rng(seed), &grid());
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!((&project_p(&project_p(&s, hi), lo) - &project_p(&s, lo)).norm() < 1e-12);
        prop_assert!(project_p(&s, lo).norm() <= project_p(&s, hi).norm() + 1e-12);
        prop_assert!(TauCut::snap(&grid(), lo).kept_bins() <= TauCut::snap(&grid(), hi).kept_bins());
    }

    #[test]
    fn evolution_intertwines_projections(seed in any::<u64>(), tau in cut(), t in -4.0..4.0f64) {
        let g = grid();
        let s = random_general_state(&mut rng(seed), &g);
        let t = g.snap_time(t);
        let lhs = evolve(&project_p(&evolve(&s, -t), tau), t);
        prop_assert!((&lhs - &project_p(&s, tau + t)).norm() < 1e-10);
    }

    #[test]
    fn evolution_is_a_unitary_group(seed in any::<u64>(), t1 in -5.0..5.0f64, t2 in -5.0..5.0f64) {
        let s = random_general_state(&mut rng(seed), &grid());
        let moved = evolve(&s, t1);
        prop_assert!((moved.norm() - s.norm()).abs() < 1e-12);
        prop_assert!(rel_diff(&evolve(&moved, t2), &evolve(&s, t1 + t2)) < 1e-12);
    }

    #[test]
    fn semigroup_contracts_and_composes(seed in any::<u64>(), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let g = grid();
        let s = random_general_state(&mut rng(seed), &g);
        let (t1, t2) = (g.snap_time(t1), g.snap_time(t2));
        let once = w_apply(&s, t1).unwrap();
        prop_assert!(once.norm() <= project_p(&s, 0.0).norm() + 1e-12);
        let twice = w_apply(&once, t2).unwrap();
        prop_assert!((&twice - &w_apply(&s, g.snap_time(t1 + t2)).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn decay_windows_are_additive(seed in any::<u64>(), a in 0.0..2.0f64, b in 0.0..2.0f64, c in 0.0..2.0f64) {
        let s = random_hardy_state(&mut rng(seed), &grid());
        let (t1, t2, t3) = (a, a + b + 0.01, a + b + c + 0.02);
        let split = decay_window(&s, t1, t2).unwrap() + decay_window(&s, t2, t3).unwrap();
        prop_assert!((split - decay_window(&s, t1, t3).unwrap()).abs() < 1e-12);
        let p = survival(&s, &[t1, t3]).unwrap();
        prop_assert!(p.values()[1] <= p.values()[0] + 1e-6);
    }

    #[test]
    fn spectral_map_round_trip(seed in any::<u64>()) {
        let g = SpectralGrid::new(1.0, 64, 1.0, 32).unwrap();
        let mut r = rng(seed);
        let values = Array2::from_shape_fn((32, 32), |_| common::random_complex(&mut r));
        let kernel = LambdaKernel::from_values(g, values).unwrap();
        let s = lambda_to_nue(&kernel);
        prop_assert!((s.norm_sqr() - kernel.norm_sqr()).abs() < 1e-12 * kernel.norm_sqr());
        let back = nue_to_lambda(&s).unwrap();
        prop_assert_eq!(back.values(), kernel.values());
        let scaled = s.scaled(Complex64::new(0.0, 2.0));
        prop_assert!((scaled.norm() - 2.0 * s.norm()).abs() < 1e-12);
    }
}
