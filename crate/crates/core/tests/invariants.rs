use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riesz_lab::classifier::{classify_c1, classify_dd, Verdict};
use riesz_lab::dales_davie::WeightSequence;
use riesz_lab::gleason_shift::{
    noncompact_witness, shift_apply, shift_iterate, ShiftPoint, TestFunction,
};
use riesz_lab::linalg::{vec_norm, CMatrix};
use riesz_lab::operator::{build_matrix, distance_tn_to_l, essential_radius_sequence, NormKind};
use riesz_lab::spectra::{
    compare, eigenvalues, eigenvalues_dense, inverse_iteration, power_iteration_radius,
    predicted_spectrum,
};
use riesz_lab::{Interval, Poly, PolyMap};

/// `x₀ + λ(x - x₀) + c(x - x₀)²` in monomial form.
fn attracting_coeffs(x0: f64, lambda: f64, c: f64) -> Vec<f64> {
    vec![x0 - lambda * x0 + c * x0 * x0, lambda - 2.0 * c * x0, c]
}

/// Self-maps of [0, 1] with a known attracting fixed point.
fn attracting_map() -> impl Strategy<Value = (PolyMap, f64, f64)> {
    (0.2f64..0.8, 0.0f64..0.6, -0.3f64..0.3).prop_filter_map("not a self-map", |(x0, lambda, c)| {
        if lambda + 2.0 * c.abs() >= 0.95 {
            return None;
        }
        PolyMap::on_unit(attracting_coeffs(x0, lambda, c))
            .ok()
            .map(|m| (m, x0, lambda))
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_rule_matches_composed_iterate((map, _, _) in attracting_map(), n in 1usize..=6) {
        let grid = 512;
        let composed = map.iterate(n).unwrap().derivative();
        let direct = map
            .domain()
            .chebyshev_grid(grid)
            .iter()
            .map(|&x| composed.eval(x).abs())
            .fold(0.0, f64::max);
        let via_log = map.iterate_deriv_log_sup(n, grid).unwrap().exp();
        prop_assert!(rel_close(via_log, direct, 1e-8), "{via_log} vs {direct}");
    }

    #[test]
    fn semigroup_law((map, _, _) in attracting_map(), m in 1usize..=3, n in 1usize..=3) {
        let whole = map.iterate(m + n).unwrap();
        let split = map.iterate(m).unwrap().poly().compose(map.iterate(n).unwrap().poly());
        let width = whole.poly().coeffs().len().max(split.coeffs().len());
        for k in 0..width {
            prop_assert!((whole.poly().coeff(k) - split.coeff(k)).abs() <= 1e-10);
        }
    }

    #[test]
    fn diameters_do_not_grow((map, _, _) in attracting_map()) {
        prop_assume!(map.find_fixed_point(50).found());
        let d = map.diameter_sequence(40, 256).unwrap();
        for w in d.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10);
        }
    }

    #[test]
    fn fixed_point_is_invariant((map, _, _) in attracting_map(), n in 1usize..=5) {
        let fp = map.find_fixed_point(100);
        prop_assert!(fp.found());
        let it = map.iterate(n).unwrap();
        prop_assert!((it.eval(fp.x0).unwrap() - fp.x0).abs() <= 1e-10);
    }

    #[test]
    fn matrix_is_triangular_with_power_diagonal((map, x0, lambda) in attracting_map(), d in 2usize..=20) {
        let m = build_matrix(&map, x0, d).unwrap();
        prop_assert!(m.entries.max_above_diagonal() < 1e-14);
        for (k, z) in m.entries.diagonal().iter().enumerate() {
            prop_assert!((z - Complex64::new(lambda.powi(k as i32), 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn matrix_of_square_is_square_of_matrix((map, x0, _) in attracting_map(), d in 2usize..=16) {
        let twice = PolyMap::from_poly(map.poly().compose(map.poly()), map.domain()).unwrap();
        let a = build_matrix(&map, x0, d).unwrap().entries;
        let b = build_matrix(&twice, x0, d).unwrap().entries;
        prop_assert!((&a * &a).max_abs_diff(&b) <= 1e-10);
    }

    #[test]
    fn distance_brackets_are_ordered_and_refine(
        (map, x0, _) in attracting_map(),
        n in 1usize..=8,
        kind in prop_oneof![Just(NormKind::C1), Just(NormKind::Sup)],
    ) {
        let coarse = distance_tn_to_l(&map, x0, n, kind, 257).unwrap();
        let fine = distance_tn_to_l(&map, x0, n, kind, 1025).unwrap();
        prop_assert!(coarse.lower <= coarse.upper && fine.lower <= fine.upper);
        prop_assert!(fine.upper <= coarse.upper + 1e-10);
        prop_assert!(fine.lower >= coarse.lower - 1e-10);
    }

    #[test]
    fn forward_lower_bound_tracks_derivative((map, x0, lambda) in attracting_map()) {
        prop_assume!(lambda > 0.05);
        let seq = essential_radius_sequence(&map, x0, NormKind::C1, 20).unwrap();
        let ess = seq.entries.iter().map(|e| e.log_ess_lower.exp()).fold(f64::INFINITY, f64::min);
        prop_assert!(ess >= lambda * (1.0 - 1e-6), "{ess} vs {lambda}");
    }

    #[test]
    fn triangular_eigenvalues_are_the_diagonal((map, x0, _) in attracting_map(), d in 2usize..=24) {
        let m = build_matrix(&map, x0, d).unwrap();
        let mut diag = m.entries.diagonal();
        diag.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let eig = eigenvalues(&m).unwrap();
        for (a, b) in eig.iter().zip(&diag) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn qr_radius_matches_power_iteration(seed in 0u64..1000, n in 3usize..=12) {
        // positive entries: a simple dominant Perron root
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0.1..1.0)).collect())
            .collect();
        let a = CMatrix::from_real_rows(&rows);
        let qr = eigenvalues_dense(&a).unwrap()[0].norm();
        let power = power_iteration_radius(&a, 10_000, 1e-14);
        prop_assert!(rel_close(qr, power, 1e-6), "{qr} vs {power}");
    }

    #[test]
    fn eigenvectors_have_small_residuals(seed in 0u64..1000, n in 3usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect())
            .collect();
        let a = CMatrix::from_real_rows(&rows);
        let lambda = eigenvalues_dense(&a).unwrap()[0];
        let v = inverse_iteration(&a, lambda, 5).unwrap();
        let av = a.mul_vec(&v);
        let r: Vec<Complex64> = av.iter().zip(&v).map(|(x, y)| x - lambda * y).collect();
        prop_assert!(vec_norm(&r) <= 1e-8 * vec_norm(&v).max(1.0));
    }

    #[test]
    fn riesz_maps_match_predicted_spectrum((map, x0, _) in attracting_map(), d in 4usize..=20) {
        let w = WeightSequence::factorial_sq(40);
        let verdict = classify_dd(&map, &w).unwrap().verdict;
        prop_assume!(verdict.is_riesz() == Some(true));
        let m = build_matrix(&map, x0, d).unwrap();
        let report = compare(&eigenvalues(&m).unwrap(), &predicted_spectrum(&map, x0, d).unwrap(), 1e-8);
        prop_assert!(report.valid, "{report:?}");
        prop_assert!(report.multiplicity_table.iter().all(|r| r.count <= 1));
    }

    #[test]
    fn shift_preserves_the_ball(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ShiftPoint::random(6, 9, &mut rng);
        prop_assert!(shift_apply(&x).sup_norm() <= x.sup_norm());
    }

    #[test]
    fn projection_composes_exactly(j in 1usize..20, k in 1usize..20) {
        let f = TestFunction::projection(j, k).compose_shift();
        prop_assert_eq!(f.terms, vec![(vec![((j, k + 1), 1)], Complex64::new(1.0 / (k + 1) as f64, 0.0))]);
    }
}

#[test]
fn shifted_unit_entry_follows_factorial_ratio() {
    for n in 0..=10 {
        for k in 1..=6 {
            let x = ShiftPoint::single(3, 20, 2, k + n, Complex64::new(1.0, 0.0)).unwrap();
            let y = shift_iterate(&x, n);
            let oracle = (k + 1..=k + n).fold(1.0, |acc, m| acc / m as f64);
            assert!((y.get(2, k).re - oracle).abs() <= 1e-15);
        }
    }
}

#[test]
fn witness_distances_do_not_depend_on_the_pair() {
    for n in 1..=10 {
        let w = noncompact_witness(n, 12, (64, 64)).unwrap();
        assert!(w.min_distance.unwrap() > 0.0);
        assert_eq!(w.min_distance, w.max_distance);
    }
}

#[test]
fn constant_maps_never_fail_in_the_other_algebra() {
    let w = WeightSequence::factorial_sq(40);
    for c in [0.0, 0.25, 0.9] {
        let map = PolyMap::constant(c, Interval::UNIT).unwrap();
        assert_eq!(classify_c1(&map).verdict, Verdict::Compact);
        assert_ne!(classify_dd(&map, &w).unwrap().verdict, Verdict::NotRiesz);
    }
}

#[test]
fn predicted_set_is_closed_under_products() {
    let p = predicted_spectrum(&PolyMap::on_unit(vec![0.0, 0.5]).unwrap(), 0.0, 20).unwrap();
    let powers: Vec<f64> = (1..=20).map(|k| 0.5f64.powi(k)).collect();
    for i in 0..10 {
        for j in 0..10 {
            let prod = powers[i] * powers[j];
            assert!(p.iter().any(|z| (z.re - prod).abs() <= 1e-15 * prod));
        }
    }
}

#[test]
fn dd_norm_of_one_is_one() {
    let w = WeightSequence::factorial_sq(10);
    let b = riesz_lab::dales_davie::dd_norm(&Poly::constant(1.0), &w, Interval::UNIT).unwrap();
    assert_eq!((b.lower, b.upper), (1.0, 1.0));
}
