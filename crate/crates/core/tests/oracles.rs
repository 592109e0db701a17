//! Reference values, each checked against a computation that does not share
//! code with the library path under test.

use lpspectra::curvature::{conformal_factor, sectional};
use lpspectra::eigenforms::{
    decay_sweep, make_cutoff, omega_lp_norm, residual_terms, AngularData, ChiConstants, Mode, CUTOFF_C1,
};
use lpspectra::radialop::{
    candidate_lambda, delta2_apply_exact, delta2_apply_fd, delta2_reduced, mu_for, OperatorContext, RadialProfile,
    UniformGrid,
};
use lpspectra::regions::{
    assemble_spectrum, contains, curve_point, essential_bottom, region_params, union_identity_check, SpectralParams,
};
use lpspectra::volume::{check_bounds, growth_rate, solve_sturm, volume_ratio, PiecewiseQ};
use lpspectra::warping::{class_b_report, hartman_check, integrate_perturbed, Potential, SampleGrid, WarpingFunction};
use lpspectra::Complex64;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

/// Composite Simpson on `count` (odd) nodes, used as an independent quadrature.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, count: usize) -> f64 {
    let h = (b - a) / (count - 1) as f64;
    let inner: f64 = (1..count - 1).map(|i| f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + inner + f(b))
}

#[test]
fn perturbed_profile_follows_its_equation() {
    let q = Potential::ExpDecay { amplitude: 1.0, rate: 1.0 };
    let f = integrate_perturbed(1.0, &q, (0.0, 1.0), (0.0, 12.0), 1e-3).unwrap();
    let d = f.log_derivatives(10.0).unwrap();
    assert!(close(d.d2, 1.0 + (-10f64).exp(), 1e-8));
}

#[test]
fn class_b_members() {
    let s = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
    let rep = class_b_report(&s, (20.0, 40.0), 1e-6, 1e3).unwrap();
    // coth²(20) − 1
    assert!(rep.verdict && rep.sup_dev_first <= 1.0 / 20f64.sinh().powi(2) * (1.0 + 1e-6));
    let c = WarpingFunction::cosh(2.0, 1.0, 0.0).unwrap();
    let rep = class_b_report(&c, (15.0, 30.0), 1e-6, 1e3).unwrap();
    let edge = (2.0 - 2.0 * (15.0 * 2f64.sqrt()).tanh().powi(2)).abs();
    assert!(rep.verdict && rep.sup_dev_first <= edge * (1.0 + 1e-6) + 1e-15);
    let q = Potential::ExpDecay { amplitude: 1.0, rate: 1.0 };
    let f = integrate_perturbed(1.0, &q, (0.0, 1.0), (0.0, 30.0), 1e-2).unwrap();
    assert!(class_b_report(&f, (20.0, 30.0), 1e-6, 1e3).unwrap().verdict);
}

#[test]
fn hartman_closed_form_and_bound() {
    let grid = SampleGrid { lo: 0.0, hi: 6.0, count: 13 };
    let rep = hartman_check(|t| (-t).exp(), 1.0, 0.0, &grid).unwrap();
    for (&t, &qv) in rep.t.iter().zip(&rep.q_values) {
        let exact = (-3.0 * t).exp() / 3.0;
        assert!(close(qv, exact, 1e-10 * exact));
    }
    assert!(rep.ratio_bound_ok);

    let q = |t: f64| 1.0 / (1.0 + t * t);
    let rep = hartman_check(q, 1.0, 1.0, &SampleGrid { lo: 1.0, hi: 20.0, count: 39 }).unwrap();
    assert!(rep.ratio_bound_ok);
    for (&t, &qv) in rep.t.iter().zip(&rep.q_values) {
        // independent quadrature of ∫_t^∞ q e^{-2s} ds on a long Simpson grid
        let reference = simpson(|s| q(s) * (-2.0 * s).exp(), t, t + 20.0, 4001);
        assert!(close(qv, reference, 1e-9 * reference));
        assert!(qv <= q(t) * (-2.0 * t).exp() / 2.0);
    }
}

#[test]
fn curve_point_by_hand() {
    let p = SpectralParams::new(3, 0, 1.0, 1.0).unwrap();
    assert_eq!(curve_point(&p, 0.0), Complex64::new(0.0, 0.0));
    // −(2 + i)(i)
    let z = -(Complex64::new(2.0, 1.0) * Complex64::new(0.0, 1.0));
    assert!((curve_point(&p, 1.0) - z).norm() < 1e-15);
    assert!((z - Complex64::new(1.0, -2.0)).norm() < 1e-15);
}

#[test]
fn region_membership_examples() {
    let region = region_params(&SpectralParams::new(3, 0, 1.0, 1.0).unwrap()).unwrap();
    assert!(contains(&region, Complex64::new(0.0, 0.0), 1e-9));
    assert!(!contains(&region, Complex64::new(-0.1, 0.0), 1e-9));
    assert!(union_identity_check(1.0, 0, 3, 1.0, 50, 200, 1e-6));
    assert!(union_identity_check(1.5, 1, 5, 2.0, 50, 200, 1e-6));
}

#[test]
fn quotient_region_and_bottoms() {
    let params = SpectralParams::hyperbolic_quotient(3, 1, 1.0).unwrap();
    let region = region_params(&params).unwrap();
    assert_eq!((region.vertex, region.im_half_width), (0.25, 1.5));
    assert_eq!(essential_bottom(1, 4, 1.0, false), (0.25, false));
    assert_eq!(essential_bottom(2, 4, 1.0, true), (0.25, true));
    let model = assemble_spectrum(&params, &[0.1]).unwrap();
    assert!(model.contains(Complex64::new(-2.0, 0.0), 1e-9));
    assert!(!model.contains(Complex64::new(-2.01, 0.0), 1e-9));
}

#[test]
fn radial_operator_term_by_term() {
    // f = sinh, μ = 1, n = 3, k = 0: shift 4, h = sinh, h'' = sinh, (h f'/f)' = sinh
    let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
    let ctx = OperatorContext::new(3, 0, 2.0, 1.0).unwrap();
    let h = RadialProfile::new(None, Complex64::new(1.0, 0.0), &f);
    let r = 1.0f64;
    let expected = -(r.sinh() + 4.0 * r.sinh()) + 2.0 * r.sinh() / r.sinh().powi(2);
    let reduced = delta2_reduced(&h, &ctx, r).unwrap() * r.sinh();
    assert!((reduced - expected).norm() < 1e-12);
}

#[test]
fn finite_differences_on_known_functions() {
    // h = e^{-r} with f = e^r, n = 3, k = 1: Δ₂h = −[h'' + 2 (h f'/f)'] = e^{-r}
    let f = WarpingFunction::exp(1.0, 1.0, 0.0).unwrap();
    let ctx = OperatorContext::new(3, 1, 0.0, 1.0).unwrap();
    let grid = UniformGrid { r0: 1.0, r1: 3.0, m: 2001 };
    let samples: Vec<Complex64> = grid.nodes().iter().map(|r| Complex64::new((-r).exp(), 0.0)).collect();
    let fd = delta2_apply_fd(&samples, &f, &ctx, &grid).unwrap();
    for (i, v) in fd.iter().enumerate() {
        let r = grid.node(i + 1);
        assert!((v - (-r).exp()).norm() < 1e-5);
    }

    // h = sin r with f = sinh, n = 4, k = 1, λ0 = 1: second-order agreement
    let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
    let ctx = OperatorContext::new(4, 1, 1.0, 1.0).unwrap();
    let err = |m: usize| {
        let grid = UniformGrid { r0: 0.5, r1: 2.5, m };
        let samples: Vec<Complex64> = grid.nodes().iter().map(|r| Complex64::new(r.sin(), 0.0)).collect();
        let fd = delta2_apply_fd(&samples, &f, &ctx, &grid).unwrap();
        fd.iter()
            .enumerate()
            .map(|(i, v)| {
                let r = grid.node(i + 1);
                let exact = delta2_apply_exact(
                    (Complex64::new(r.sin(), 0.0), Complex64::new(r.cos(), 0.0), Complex64::new(-r.sin(), 0.0)),
                    &f,
                    &ctx,
                    r,
                )
                .unwrap();
                (v - exact).norm()
            })
            .fold(0.0, f64::max)
    };
    let ratio = err(51) / err(101);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn candidate_values_against_curves() {
    let ctx = OperatorContext::new(3, 3, 0.0, 1.0).unwrap();
    let lam = candidate_lambda(mu_for(1.0, 3, 3, 0.0), &ctx);
    assert!(lam.norm() < 1e-15);
    let p0 = SpectralParams::new(3, 0, 1.0, 1.0).unwrap();
    assert!((lam - curve_point(&p0, 0.0)).norm() < 1e-15);

    let ctx = OperatorContext::new(3, 2, 0.0, 1.0).unwrap();
    let q21 = region_params(&SpectralParams::new(3, 1, 2.0, 1.0).unwrap()).unwrap();
    for s in linspace(-4.0, 4.0, 33) {
        let lam = candidate_lambda(mu_for(2.0, 2, 3, s), &ctx);
        assert!((lam - Complex64::new(q21.vertex + s * s, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn cutoff_extremes_and_norm_mass() {
    let phi = make_cutoff(0.0, 1.0).unwrap();
    let max_slope = linspace(-1.0, 2.0, 300_001).into_iter().map(|r| phi.eval(r).1.abs()).fold(0.0, f64::max);
    assert!(close(max_slope, CUTOFF_C1, 1e-9));
    assert!(close(phi.eval(-0.5).1, 15.0 / 8.0, 1e-12));

    let f = WarpingFunction::exp(1.0, 1.0, -5.0).unwrap();
    let phi = make_cutoff(0.0, 10.0).unwrap();
    let ang = AngularData::default();
    let n1 = omega_lp_norm(&f, &phi, mu_for(1.0, 1, 3, 0.7), 1.0, 3, 1, &ang).unwrap();
    assert!((10.0..=12.0).contains(&n1));
    // the smoothstep ramp has mass 1/2 on each side
    assert!(close(n1, 11.0, 1e-9));
    let n2 = omega_lp_norm(&f, &phi, mu_for(2.0, 1, 3, 0.0), 2.0, 3, 1, &ang).unwrap();
    assert!((10.0..=12.0).contains(&(n2 * n2)));
    let ramp2 = simpson(|x| phi.eval(x).0.powi(2), -1.0, 0.0, 2001);
    assert!(close(n2 * n2, 10.0 + 2.0 * ramp2, 1e-9));
}

#[test]
fn residual_term_bounds() {
    let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
    let ctx = OperatorContext::new(3, 0, 0.0, 1.0).unwrap();
    let ang = AngularData::default();
    let mu = mu_for(1.0, 0, 3, 0.0);
    let phi = make_cutoff(11.0, 111.0).unwrap();
    let bd = residual_terms(&f, &phi, mu, 1.0, &ctx, &ang, Mode::Warped).unwrap();
    let sup = 1.0 / 10f64.sinh().powi(2);
    assert!(sup <= 8.3e-9);
    let factor = ((mu - 1.0) * (mu + ctx.shift())).norm();
    assert!(bd.terms.i <= sup * factor * bd.omega_norm_p);

    // widening the plateau leaves III + IV fixed and adds plateau mass
    let ctx = OperatorContext::new(3, 3, 0.0, 1.0).unwrap();
    let mu = mu_for(1.0, 3, 3, 0.0);
    let rows: Vec<_> = [25.0, 50.0, 100.0]
        .iter()
        .map(|w| residual_terms(&f, &make_cutoff(8.0, 8.0 + w).unwrap(), mu, 1.0, &ctx, &ang, Mode::Warped).unwrap())
        .collect();
    for pair in rows.windows(2) {
        let (a, b) = (pair[0].terms, pair[1].terms);
        assert!(close(a.iii + a.iv, b.iii + b.iv, 1e-9 * (a.iii + a.iv)));
    }
    assert!(close(rows[1].omega_norm_p - rows[0].omega_norm_p, 25.0, 1e-8));
    assert!(close(rows[2].omega_norm_p - rows[1].omega_norm_p, 50.0, 1e-8));
    // quintic ramp: ∫|φ''| over one ramp is 15/8 · 2 · (1/2)... checked by Simpson
    let phi = make_cutoff(0.0, 1.0).unwrap();
    let ramp = simpson(|x| phi.eval(x).2.abs(), -1.0, 0.0, 20_001);
    assert!(close(rows[0].terms.iii, 2.0 * ramp, 1e-6));
}

#[test]
fn sweeps_from_the_examples() {
    let schedule = [(6.0, 106.0), (12.0, 412.0), (24.0, 1624.0)];
    let f = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
    let ctx = OperatorContext::new(3, 3, 0.0, 1.0).unwrap();
    let rows = decay_sweep(&f, 1.0, &ctx, &AngularData::default(), Mode::Warped, &schedule, 0.0).unwrap();
    assert!(rows.windows(2).all(|w| w[1].ratio() < w[0].ratio()));
    assert!(rows.last().unwrap().ratio() < 0.05);

    let ctx = OperatorContext::new(4, 1, 0.0, 1.0).unwrap();
    let ang = AngularData {
        eta_norm_const: 1.0,
        chi: Some(ChiConstants { lap: 1.0, grad: 1.0, lower: 1.0, upper: 1.0 }),
    };
    let rows = decay_sweep(&f, 1.0, &ctx, &ang, Mode::Hyperbolic, &schedule, 1.0).unwrap();
    assert!(rows.windows(2).all(|w| w[1].ratio() < w[0].ratio()));
    assert!(rows.last().unwrap().ratio() < 0.1);
    assert!(rows.iter().all(|r| r.breakdown.terms.a3.is_some()));
}

/// `(u, u')` across a constant segment `q = −α²` of length `len`.
fn hyperbolic_transfer(alpha: f64, len: f64, (u, du): (f64, f64)) -> (f64, f64) {
    let (c, s) = ((alpha * len).cosh(), (alpha * len).sinh());
    (u * c + du * s / alpha, u * alpha * s + du * c)
}

#[test]
fn piecewise_solution_matches_transfer_matrices() {
    let q = PiecewiseQ::new(1.0, 0.0, 2.0, 1.0, 2.0).unwrap();
    let sol = solve_sturm(q, 4.0, 1e-3).unwrap();
    for (i, &r) in sol.r.iter().enumerate().step_by(250) {
        let mut state = (0.0, 1.0);
        state = hyperbolic_transfer(1.0, r.min(1.0), state);
        if r > 1.0 {
            state = hyperbolic_transfer(2.0, r.min(2.0) - 1.0, state);
        }
        if r > 2.0 {
            state = hyperbolic_transfer(1.0, r - 2.0, state);
        }
        assert!(close(sol.u[i], state.0, 1e-8 * state.0.max(1.0)), "u at {r}");
        assert!(close(sol.u_prime[i], state.1, 1e-8 * state.1.max(1.0)), "u' at {r}");
    }
    let b = check_bounds(&sol, &q);
    assert!(b.lower_ok && b.upper_ok);
}

#[test]
fn volume_ratios_and_rates() {
    let one = solve_sturm(PiecewiseQ::constant(1.0).unwrap(), 30.0, 1e-3).unwrap();
    let expected = (2f64.cosh() - 1.0) / (1f64.cosh() - 1.0);
    assert!(close(volume_ratio(&one, 2, 2.0).unwrap(), expected, 1e-6));
    assert!(close(volume_ratio(&one, 2, 1.0).unwrap(), 1.0, 1e-12));
    assert!(close(growth_rate(&one, 3, (15.0, 25.0)).unwrap().gamma_hat, 2.0, 0.02));

    let four = solve_sturm(PiecewiseQ::constant(4.0).unwrap(), 20.0, 1e-3).unwrap();
    // ∫ sinh²(2ρ)/4 = (sinh(4x)/8 − x/2)/4
    let prim = |x: f64| ((4.0 * x).sinh() / 8.0 - x / 2.0) / 4.0;
    assert!(close(volume_ratio(&four, 3, 3.0).unwrap(), prim(3.0) / prim(1.0), 1e-6 * prim(3.0) / prim(1.0)));
    assert!(close(growth_rate(&four, 2, (10.0, 20.0)).unwrap().gamma_hat, 2.0, 0.02));

    let piece = PiecewiseQ::new(1.0, 0.0, 3.0, 5.0, 8.0).unwrap();
    let sol = solve_sturm(piece, 50.0, 1e-3).unwrap();
    assert!(close(growth_rate(&sol, 3, (30.0, 50.0)).unwrap().gamma_hat, 2.0, 0.02));
}

#[test]
fn curvature_and_conformal_values() {
    let f = WarpingFunction::cosh(4.0, 1.0, 0.0).unwrap();
    let rep = sectional(&f, 1.0, (1.0, 1.0), 3).unwrap();
    assert!(close(rep.sec_radial, -4.0, 1e-12));
    let spherical = (1.0 - 4.0 * 2f64.sinh().powi(2)) / 2f64.cosh().powi(2);
    assert!(close(rep.sec_spherical_range.0, spherical, 1e-12));

    let s = WarpingFunction::sinh(1.0, 1.0, 0.0).unwrap();
    for x in [0.5, 0.1, 0.01] {
        assert!(close(conformal_factor(&s, 1.0, x).unwrap(), (1.0 - x * x) / 2.0, 1e-12));
        assert!(close(conformal_factor(&f, 4.0, x).unwrap(), (1.0 + x * x) / 2.0, 1e-12));
    }
    assert!(close(conformal_factor(&s, 1.0, 0.01).unwrap(), 0.49995, 1e-12));
}
