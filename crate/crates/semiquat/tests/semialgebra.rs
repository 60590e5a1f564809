use semiquat::semialgebra::det4;
use semiquat::{Causal, GeomError, MetricContext, SemiQuaternion};

const E1: SemiQuaternion = SemiQuaternion::E1;
const E2: SemiQuaternion = SemiQuaternion::E2;
const E3: SemiQuaternion = SemiQuaternion::E3;
const ONE: SemiQuaternion = SemiQuaternion::ONE;

#[test]
fn default_multiplication_table() {
    let ctx = MetricContext::default();
    assert_eq!(ctx.ambient_signs(), [-1, -1, 1, 1]);
    assert_eq!(ctx.mul(E1, E1), ONE);
    assert_eq!(ctx.mul(E2, E2), ONE);
    assert_eq!(ctx.mul(E3, E3), -ONE);
    assert_eq!(ctx.mul(E1, E2), -E3);
    assert_eq!(ctx.mul(E2, E3), E1);
    assert_eq!(ctx.mul(E3, E1), E2);
    assert_eq!(ctx.mul(E2, E1), E3);
}

#[test]
fn coordinate_form_and_norm() {
    let ctx = MetricContext::default();
    let q = SemiQuaternion::new(1.0, 2.0, 3.0, 4.0);
    assert_eq!(ctx.h(q, q), -1.0 - 4.0 + 9.0 + 16.0);
    assert_eq!(ctx.norm(q), 20f64.sqrt());
    assert_eq!(ctx.g(q, q), -1.0 - 4.0 + 9.0);
    let r = ctx.mul(q, q.conjugate());
    assert_eq!(r, ONE * ctx.h(q, q));
}

#[test]
fn causal_character() {
    let ctx = MetricContext::default();
    assert_eq!(ctx.classify(E1), Causal::Timelike);
    assert_eq!(ctx.classify(E3), Causal::Spacelike);
    assert_eq!(ctx.classify(E1 + E3), Causal::Null);
    assert!(matches!(ctx.causal_sign(E2 + ONE), Err(GeomError::NullSign { .. })));
    assert_eq!(ctx.causal_sign(E2).unwrap().value(), -1.0);
}

#[test]
fn alternate_signature_flips_every_sign() {
    let d = MetricContext::default();
    let p = MetricContext::paper24();
    assert_eq!(p.ambient_signs(), [1, 1, -1, -1]);
    let q = SemiQuaternion::new(0.3, -1.2, 2.0, 0.5);
    assert_eq!(d.h(q, q), -p.h(q, q));
    assert_eq!(d.mul(q, E2), p.mul(q, E2));
}

#[test]
fn wedge4_is_orthogonal_and_oriented() {
    let ctx = MetricContext::default();
    let (a, b, c) = (
        SemiQuaternion::new(1.0, 0.5, -0.2, 0.3),
        SemiQuaternion::new(-0.7, 2.0, 0.1, 1.0),
        SemiQuaternion::new(0.0, 0.4, 1.5, -0.9),
    );
    let x = ctx.wedge4(a, b, c);
    for v in [a, b, c] {
        assert!(ctx.h(x, v).abs() < 1e-14);
    }
    assert!((ctx.h(x, x) - det4([a, b, c, x])).abs() < 1e-12);
    let flipped = ctx.with_orientation(-1).unwrap().wedge4(a, b, c);
    assert_eq!(flipped, -x);
    assert_eq!(ctx.wedge4(E1, E2, E3).dist_up_to_sign(ONE), 0.0);
}

#[test]
fn cross3_of_spatial_basis() {
    let ctx = MetricContext::default();
    assert_eq!(ctx.cross3(E1, E2).unwrap(), -E3);
    assert_eq!(ctx.cross3(E2, E1).unwrap(), E3);
    assert!(matches!(ctx.cross3(E1 + ONE, E2), Err(GeomError::NonSpatialInput { .. })));
}

#[test]
fn invalid_signatures_are_rejected() {
    for bad in [[1, 1, 1, 1], [-1, 1, 1, 1], [1, -1, 2, -1], [0, 1, -1, -1]] {
        assert!(matches!(MetricContext::new(bad), Err(GeomError::InvalidMetric(_))), "{bad:?}");
    }
    assert!(MetricContext::default().with_orientation(0).is_err());
    assert!(MetricContext::default().with_null_tolerance(-1.0).is_err());
}

#[test]
fn metric_json_round_trip() {
    let ctx = MetricContext::paper24().with_orientation(-1).unwrap();
    let text = serde_json::to_string(&ctx).unwrap();
    let back: MetricContext = serde_json::from_str(&text).unwrap();
    assert_eq!(back, ctx);
    let bad: Result<MetricContext, _> = serde_json::from_str(r#"{"ambient_signs":[1,1,1,-1]}"#);
    assert!(bad.is_err());
}
