//! Algebraic identities shared by the property suite and the acceptance run.
#![allow(dead_code)]

use semiquat::semialgebra::det4;
use semiquat::{MetricContext, SemiQuaternion};

/// Relative tolerance of every identity, scaled by the operands' magnitudes.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// All admissible signatures with two negative signs.
pub fn signatures() -> Vec<MetricContext> {
    let mut out = Vec::new();
    for mask in 0u8..16 {
        if mask.count_ones() == 2 {
            let signs = std::array::from_fn(|i| if mask >> i & 1 == 1 { -1 } else { 1 });
            out.push(MetricContext::new(signs).expect("index-2 signature"));
        }
    }
    out
}

fn scale(qs: &[SemiQuaternion]) -> f64 {
    qs.iter().map(|q| q.max_abs().max(1.0)).product()
}

/// Relative residual of each identity on one operand tuple.
pub fn identity_residuals(
    ctx: &MetricContext,
    p: SemiQuaternion,
    q: SemiQuaternion,
    r: SemiQuaternion,
    a: f64,
    b: f64,
) -> [(&'static str, f64); 6] {
    let m = |x, y| ctx.mul(x, y);
    let lin = m(p * a + q * b, r).dist(m(p, r) * a + m(q, r) * b) / (scale(&[p, q, r]) * (1.0 + a.abs() + b.abs()));
    let lin_r = m(r, p * a + q * b).dist(m(r, p) * a + m(r, q) * b) / (scale(&[p, q, r]) * (1.0 + a.abs() + b.abs()));
    let assoc = m(m(p, q), r).dist(m(p, m(q, r))) / scale(&[p, q, r]);
    let conj = m(p, q).conjugate().dist(m(q.conjugate(), p.conjugate())) / scale(&[p, q]);
    let eps4 = ctx.ambient(3);
    let form = m(p, p.conjugate()).dist(SemiQuaternion::ONE * (eps4 * ctx.h(p, p))) / scale(&[p, p]);
    let mult = (ctx.h(m(p, q), m(p, q)) - eps4 * ctx.h(p, p) * ctx.h(q, q)).abs() / scale(&[p, p, q, q]);
    let x = ctx.wedge4(p, q, r);
    let w = [p, q, r].iter().map(|v| ctx.h(x, *v).abs()).fold(0.0, f64::max) / scale(&[p, q, r, p]);
    let e1 = SemiQuaternion::basis(0);
    let d = (ctx.h(x, e1) - ctx.orientation() * det4([p, q, r, e1])).abs() / scale(&[p, q, r]);
    [
        ("bilinearity", lin.max(lin_r)),
        ("associativity", assoc),
        ("conjugation", conj),
        ("norm form", form),
        ("multiplicativity", mult),
        ("wedge4", w.max(d)),
    ]
}
