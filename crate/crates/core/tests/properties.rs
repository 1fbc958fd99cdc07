//! Property-based tests for the pointwise algebra and the chart calculus.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use nkgeom_core::chart::{grad_ricci_identities, seeded_points, Chart, PolynomialHermitianChart};
use nkgeom_core::constructors::{build_r1, build_r2, kahler_space_form};
use nkgeom_core::hermitian::{orthonormalize, standard_complex_structure};
use nkgeom_core::invariants::{
    antiholo_range, classify, contractions, contractions_in_frame, nu_from_scalars, prop1_report,
    reconstruct_r, rk_defect, symmetry_defects, Budget,
};
use nkgeom_core::jet::Jet;
use nkgeom_core::rng::{gaussian_vector, stream_rng};
use nkgeom_core::{FourTensor, HermitianPoint};

/// `(P^T P, P^-1 J0 P)` for a seeded `P` near the identity: a generic
/// Hermitian point whose coordinates are not orthonormal.
fn skewed_point(n: usize, seed: u64) -> HermitianPoint {
    let d = 2 * n;
    let mut rng = stream_rng(seed, 0);
    let noise = DMatrix::from_fn(d, d, |_, _| gaussian_vector(&mut rng, 1)[0]);
    // Singular values of `p` stay in [0.4, 1.6].
    let p = DMatrix::identity(d, d) + &noise * (0.6 / noise.norm());
    let p_inv = p.clone().try_inverse().expect("near identity");
    HermitianPoint::new(
        p.transpose() * &p,
        &p_inv * standard_complex_structure(n) * &p,
    )
    .unwrap()
}

fn small_budget() -> Budget {
    Budget {
        samples: 40,
        refine_steps: 10,
    }
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn contractions_do_not_depend_on_the_frame(n in 2usize..4, seed in 0u64..1000, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let p = skewed_point(n, seed);
        let r = build_r1(&p) * a + build_r2(&p) * b;
        let reference = contractions(&r, &p).unwrap();
        let rotated = contractions_in_frame(&r, &p, &p.random_frame(seed + 1)).unwrap();
        prop_assert!((&reference.s - &rotated.s).amax() < 1e-9);
        prop_assert!((&reference.s_star - &rotated.s_star).amax() < 1e-9);
        prop_assert!((reference.tau - rotated.tau).abs() < 1e-9);
        prop_assert!((reference.tau_star - rotated.tau_star).abs() < 1e-9);
    }

    #[test]
    fn scalar_formula_recovers_the_r1_coefficient(n in 2usize..5, a in -5.0..5.0f64, b in -5.0..5.0f64) {
        let p = HermitianPoint::standard(n).unwrap();
        let r = build_r1(&p) * a + build_r2(&p) * b;
        let data = contractions(&r, &p).unwrap();
        prop_assert!((nu_from_scalars(n, data.tau, data.tau_star) - a).abs() < 1e-11);
    }

    #[test]
    fn decomposition_round_trips(n in 2usize..4, seed in 0u64..1000, a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let p = skewed_point(n, seed);
        let r = build_r1(&p) * a + build_r2(&p) * b;
        let data = contractions(&r, &p).unwrap();
        let rebuilt = reconstruct_r(&data.s, a, &p).unwrap();
        prop_assert!(rebuilt.max_abs_diff(&r) < 1e-9);
    }

    #[test]
    fn invariants_scale_with_the_tensor(seed in 0u64..1000, t in 0.1..10.0f64) {
        let p = HermitianPoint::standard(3).unwrap();
        let r = kahler_space_form(&p, 4.0) + build_r1(&p) * 0.5;
        let budget = small_budget();
        let base = prop1_report(&r, &p, budget, seed).unwrap();
        let scaled = prop1_report(&(&r * t), &p, budget, seed).unwrap();
        prop_assert!((scaled.nu_hat - t * base.nu_hat).abs() < 1e-11 * t.max(1.0));
        let range = antiholo_range(&r, &p, 30, 5, seed).unwrap();
        let range_t = antiholo_range(&(&r * t), &p, 30, 5, seed).unwrap();
        prop_assert!((range_t.nu_max - t * range.nu_max).abs() < 1e-9 * t.max(1.0));
        let label = classify(&r, &p, budget, seed, 1e-9).unwrap();
        let label_t = classify(&(&r * t), &p, budget, seed, 1e-9).unwrap();
        prop_assert_eq!(label.label, label_t.label);
    }

    #[test]
    fn model_tensors_are_rk_and_bianchi(n in 2usize..4, seed in 0u64..1000, c in -5.0..5.0f64) {
        let p = skewed_point(n, seed);
        for r in [build_r1(&p), build_r2(&p), kahler_space_form(&p, c)] {
            let (c1, c2, c3, _) = symmetry_defects(&r, &p).unwrap();
            prop_assert!(c1.max(c2).max(c3) <= 1e-12 * r.max_abs().max(1.0));
            prop_assert!(rk_defect(&r, &p).unwrap() <= 1e-12 * r.max_abs().max(1.0));
        }
    }

    #[test]
    fn orthonormalize_is_idempotent(n in 1usize..4, seed in 0u64..1000) {
        let p = skewed_point(n, seed);
        let mut rng = stream_rng(seed, 7);
        let vs: Vec<DVector<f64>> = (0..p.dim()).map(|_| gaussian_vector(&mut rng, p.dim())).collect();
        let once = orthonormalize(&vs, &p, 1e-10).unwrap();
        let twice = orthonormalize(&once, &p, 1e-10).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).amax() < 1e-12);
        }
    }

    #[test]
    fn jet_reciprocal_inverts_products(x in 0.2..3.0f64, y in -2.0..2.0f64) {
        let vars = Jet::variables(&[x, y], 3);
        let f = &(&vars[0] * &vars[0]) + &(&vars[1] * &vars[1]).add_const(1.0);
        let one = &f * &f.recip();
        prop_assert!((one.value() - 1.0).abs() < 1e-14);
        for a in 0..2 {
            prop_assert!(one.d1(a).abs() < 1e-13);
            for b in 0..2 {
                prop_assert!(one.d2(a, b).abs() < 1e-12);
                for c in 0..2 {
                    prop_assert!(one.d3(a, b, c).abs() < 1e-11);
                }
            }
        }
        let s = f.sqrt();
        let back = &s * &s;
        prop_assert!((back.d3(0, 1, 1) - f.d3(0, 1, 1)).abs() < 1e-11);
        prop_assert!((back.d2(0, 0) - f.d2(0, 0)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn contracted_bianchi_holds_for_random_metrics(seed in 0u64..10_000, point_seed in 0u64..1000) {
        let chart = Chart::parametric(PolynomialHermitianChart::new(2, PolynomialHermitianChart::DEFAULT_EPS, seed));
        let u = &seeded_points(&chart, 1, point_seed, 0.05).unwrap()[0];
        let d = grad_ricci_identities(&chart, u, 1e-3).unwrap();
        prop_assert!(d.eq1_defect <= 1e-8 && d.eq2_defect <= 1e-8, "{:?}", d);
    }
}

#[test]
fn zero_tensor_has_zero_invariants() {
    let p = HermitianPoint::standard(2).unwrap();
    let data = contractions(&FourTensor::zeros(4), &p).unwrap();
    assert_eq!(nu_from_scalars(2, data.tau, data.tau_star), 0.0);
}
