use std::f64::consts::SQRT_2;

use semiquat::curvekit::builtin::{cubic, example31, example31_scaled, fuzz_suite};
use semiquat::curvekit::{
    check_unit_speed, frenet_apparatus, frenet_ode_residual, linspace, reparameterize_by_arclength, tangent_normal,
};
use semiquat::{GeomError, MetricContext, SemiQuaternion};

#[test]
fn example_apparatus_closed_form() {
    let ctx = MetricContext::default();
    let xi = example31();
    for s in linspace(-1.0, 1.0, 11) {
        let a = frenet_apparatus(&xi, s, &ctx).unwrap();
        let (sh, ch) = (s.sinh(), s.cosh());
        assert!(a.tangent.dist(SemiQuaternion::new(sh, SQRT_2, ch, 0.0)) < 1e-14);
        assert!(a.normal.dist(SemiQuaternion::new(ch, 0.0, sh, 0.0)) < 1e-14);
        assert!(a.binormal.dist_up_to_sign(SemiQuaternion::new(SQRT_2 * sh, 1.0, SQRT_2 * ch, 0.0)) < 1e-13);
        assert!(a.trinormal.dist_up_to_sign(SemiQuaternion::ONE) < 1e-14);
        assert!((a.kappa + 1.0).abs() < 1e-14);
        assert!((a.k.abs() - SQRT_2).abs() < 1e-13);
        assert!(a.third.abs() < 1e-14);
        assert!(a.frame_defect(&ctx) < 1e-13);
        // T and N timelike, B and E spacelike; ε_t = ε_T ε_N, ε_b = ε_T sign h(E, E).
        assert_eq!(a.signs.values(), [-1.0, -1.0, 1.0, -1.0, -1.0]);
    }
}

#[test]
fn finite_differences_agree_with_exact_derivatives() {
    let ctx = MetricContext::default();
    let exact = example31();
    let fd = exact.with_finite_difference(Some(1e-3));
    for s in [-0.9, 0.0, 0.6] {
        let (a, b) = (frenet_apparatus(&exact, s, &ctx).unwrap(), frenet_apparatus(&fd, s, &ctx).unwrap());
        assert!((a.kappa - b.kappa).abs() < 1e-8);
        assert!((a.k - b.k).abs() < 1e-4);
        for (x, y) in a.frame().iter().zip(b.frame()) {
            assert!(x.dist(y) < 1e-6);
        }
    }
}

#[test]
fn frenet_equations_hold_on_fuzz_curves() {
    let ctx = MetricContext::default();
    for (p, c) in fuzz_suite(5, 0, &ctx) {
        for s in [-0.8, 0.1, 0.9] {
            let r = frenet_ode_residual(&c, s, &ctx, 1e-3).unwrap();
            assert!(r.iter().all(|&x| x < 1e-7), "seed {} at {s}: {r:?}", p.seed);
        }
    }
}

#[test]
fn non_unit_speed_curve_is_rejected_then_reparameterized() {
    let ctx = MetricContext::default();
    let slow = example31_scaled(0.5);
    assert!(!check_unit_speed(&slow, 50, 1e-9, &ctx).pass);
    assert!(matches!(frenet_apparatus(&slow, 0.0, &ctx), Err(GeomError::NotUnitSpeed { .. })));
    let re = reparameterize_by_arclength(&slow, 1e-12, &ctx, None).unwrap();
    assert!((re.map.total() - 0.5 * (re.map.param_range().1 - re.map.param_range().0)).abs() < 1e-9);
    let fast = re.analytic().unwrap();
    let sigma = re.map.sigma_of(0.0);
    let a = frenet_apparatus(&fast, sigma, &ctx).unwrap();
    assert!((a.kappa + 1.0).abs() < 1e-8);
    assert!((a.k.abs() - SQRT_2).abs() < 1e-7);
}

#[test]
fn arc_length_map_inverts() {
    let ctx = MetricContext::default();
    let re = reparameterize_by_arclength(&cubic(), 1e-12, &ctx, None).unwrap();
    for t in linspace(-1.2, 1.2, 9) {
        assert!((re.map.t_of(re.map.sigma_of(t)) - t).abs() < 1e-10);
    }
    assert!(check_unit_speed(&re.curve, 40, 1e-6, &ctx).pass);
}

#[test]
fn domain_and_stencil_errors() {
    let ctx = MetricContext::default();
    let xi = example31();
    assert!(matches!(xi.position(10.0), Err(GeomError::OutOfDomain { .. })));
    let fd = xi.with_finite_difference(Some(0.1));
    assert!(matches!(fd.derivatives(3.9, 4), Err(GeomError::StencilOverflow { .. })));
    assert!(tangent_normal(&fd, 3.5, &ctx).is_ok());
}

#[test]
fn null_curvature_vector_is_reported() {
    let ctx = MetricContext::default();
    let line = semiquat::config::parse_curve_csv("s,q1,q2,q3,q4\n-1,-1,0,0,0\n0,0,0,0,0\n1,1,0,0,0\n2,2,0,0,0\n")
        .unwrap()
        .into_curve(Some(0.05))
        .unwrap();
    let err = frenet_apparatus(&line, 0.5, &ctx).unwrap_err();
    assert!(matches!(err, GeomError::NullCurvatureVector { .. }), "{err}");
}
