use lpspectra::eigenforms::{make_cutoff, weight_exponent, CUTOFF_C1};
use lpspectra::radialop::{candidate_lambda, eigen_defect, mu_for, OperatorContext, RadialProfile};
use lpspectra::regions::{canonical_degree, curve_point, dual_exponent, region_params, SpectralParams};
use lpspectra::volume::{snapped_step, solve_sturm, PiecewiseQ};
use lpspectra::warping::WarpingFunction;
use lpspectra::Complex64;
use proptest::prelude::*;

/// Canonical `(n, k)` pairs with `2k ≤ n`.
fn degree() -> impl Strategy<Value = (u32, u32)> {
    (2u32..10).prop_flat_map(|n| (Just(n), 0..=n / 2))
}

fn params(p: f64, (n, k): (u32, u32), a0: f64) -> SpectralParams {
    SpectralParams::new(n, k, p, a0).unwrap()
}

proptest! {
    #[test]
    fn dual_exponents_share_a_region(p in 1.0f64..6.0, nk in degree(), a0 in 0.1f64..5.0) {
        let r = region_params(&params(p, nk, a0)).unwrap();
        let d = region_params(&params(dual_exponent(p), nk, a0)).unwrap();
        prop_assert!((r.vertex - d.vertex).abs() <= 1e-12 * r.vertex.max(1.0));
        prop_assert!((r.im_half_width - d.im_half_width).abs() <= 1e-12 * r.im_half_width.max(1.0));
    }

    #[test]
    fn curve_points_lie_in_their_region(p in 1.0f64..4.0, nk in degree(), a0 in 0.1f64..5.0, s in -20.0f64..20.0) {
        let r = region_params(&params(p, nk, a0)).unwrap();
        let z = curve_point(&r.params, s);
        prop_assert!(r.distance(z) <= 1e-9 * z.norm().max(1.0));
    }

    #[test]
    fn regions_shrink_toward_two(p in 1.0f64..2.0, q in 1.0f64..2.0, nk in degree(), a0 in 0.1f64..5.0) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let wide = region_params(&params(lo, nk, a0)).unwrap();
        let narrow = region_params(&params(hi, nk, a0)).unwrap();
        prop_assert!(narrow.im_half_width <= wide.im_half_width + 1e-15);
        prop_assert_eq!(narrow.vertex, wide.vertex);
    }

    #[test]
    fn curves_are_conjugate_symmetric(p in 1.0f64..4.0, nk in degree(), a0 in 0.1f64..5.0, s in -20.0f64..20.0) {
        let pr = params(p, nk, a0);
        let diff = curve_point(&pr, -s) - curve_point(&pr, s).conj();
        prop_assert!(diff.norm() <= 1e-12 * (1.0 + s * s) * a0);
    }

    #[test]
    fn candidates_relabel_onto_complementary_curves(
        p in 1.0f64..4.0, (n, m) in degree(), a0 in 0.1f64..5.0, s in -10.0f64..10.0,
    ) {
        let ctx = OperatorContext::new(n, n - m, 0.0, a0).unwrap();
        let lam = candidate_lambda(mu_for(p, n - m, n, s), &ctx);
        let curve = curve_point(&params(p, (n, m), a0), -s);
        prop_assert!((lam - curve).norm() <= 1e-10 * (1.0 + s * s) * a0 * n as f64);
    }

    #[test]
    fn eigenform_weight_is_flat(p in 1.0f64..6.0, (n, k) in degree(), s in -10.0f64..10.0) {
        prop_assert!(weight_exponent(mu_for(p, k, n, s), p, n, k).abs() <= 1e-14 * n as f64);
    }

    #[test]
    fn cutoff_stays_within_its_bounds(a in -50.0f64..50.0, width in 0.0f64..100.0, x in -60.0f64..160.0) {
        let phi = make_cutoff(a, a + width).unwrap();
        let (v, d1, d2) = phi.eval(x);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(d1.abs() <= CUTOFF_C1 + 1e-12);
        prop_assert!(d2.abs() <= 6.0 + 1e-12);
    }

    #[test]
    fn canonical_degree_is_idempotent(n in 1u32..40, k in 0u32..40) {
        prop_assume!(k <= n);
        let c = canonical_degree(k, n);
        prop_assert!(2 * c <= n);
        prop_assert_eq!(canonical_degree(c, n), c);
    }

    #[test]
    fn distance_vanishes_exactly_inside(
        p in 1.0f64..4.0, nk in degree(), a0 in 0.1f64..5.0, re in -50.0f64..50.0, im in -50.0f64..50.0,
    ) {
        let r = region_params(&params(p, nk, a0)).unwrap();
        let z = Complex64::new(re, im);
        let d = r.distance(z);
        prop_assert!(d >= 0.0);
        prop_assert!((r.distance(z.conj()) - d).abs() <= 1e-12 * z.norm().max(1.0));
        prop_assert_eq!(d == 0.0, r.contains(z, 0.0));
        prop_assert!(r.contains(z, d));
        // moving right along the real axis never leaves the region
        if d == 0.0 {
            prop_assert!(r.distance(z + 1.0) <= 1e-9);
        }
    }

    #[test]
    fn exponential_profiles_are_exact_eigenfunctions(
        p in 1.0f64..4.0, (n, k) in degree(), s in -5.0f64..5.0, r in 0.5f64..20.0,
    ) {
        let f = WarpingFunction::exp(1.0, 1.0, 0.0).unwrap();
        let ctx = OperatorContext::new(n, k, 0.0, 1.0).unwrap();
        let mu = mu_for(p, k, n, s);
        let defect = eigen_defect(&RadialProfile::new(None, mu, &f), &ctx, r).unwrap();
        prop_assert!(defect.norm() <= 1e-10 * (1.0 + mu.norm_sqr()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sturm_solutions_dominate_the_inner_model(
        a0 in 0.2f64..2.0, eps in 0.0f64..1.0, extra in 0.0f64..2.0, s_ticks in 4u32..60, gap_ticks in 4u32..60,
    ) {
        let k = (a0 + eps).sqrt() + extra;
        let (s, t) = (s_ticks as f64 / 20.0, (s_ticks + gap_ticks) as f64 / 20.0);
        let q = PiecewiseQ::new(a0, eps, k, s, t).unwrap();
        let sol = solve_sturm(q, 10.0, snapped_step(&q, 2.5e-3).unwrap()).unwrap();
        // equality holds when K is at its minimum, so allow the discretisation error
        for (r, u) in sol.r.iter().zip(&sol.u) {
            prop_assert!(*u >= q.lower_bound(*r) * (1.0 - 1e-4));
        }
        let cum = sol.cumulative_integral(3);
        prop_assert!(cum.windows(2).all(|w| w[1] >= w[0]));
    }
}
