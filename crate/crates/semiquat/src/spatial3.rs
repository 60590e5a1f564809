//! The associated spatial curve in E^3_1: extraction of {t, n, b} from a
//! 4D frame, the spatial Serret-Frenet apparatus, associated curves built
//! by integrating t, and the non-involute check for associated pairs.
//!
//! The 4D frame and the spatial one are linked by N = ε_T t T, B = ε_T n T
//! and E = ±ε_T b T, so multiplying on the right by T̄ recovers t, n, b.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::curvekit::frenet::default_frame_tol;
use crate::curvekit::quadrature::composite_gl;
use crate::curvekit::stencil::{self, half_width};
use crate::curvekit::{frenet_apparatus, CurveSource, CurveSpec, DerivativeMode, Domain, FrenetApparatus4};
use crate::error::{GeomError, Result};
use crate::involute::InvolutePair;
use crate::semialgebra::{Causal, CausalSign, MetricContext, SemiQuaternion};

/// Largest scalar part tolerated on an extracted spatial vector.
pub const EXTRACTION_TOL: f64 = 1e-8;
/// Two unit vectors closer than this (sine of the angle) count as collinear.
pub const COLLINEARITY_GAP_MIN: f64 = 0.1;
/// Step used to differentiate an associated curve's tangent field.
pub const ASSOCIATED_STEP: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpatialSigns {
    pub eps_t: CausalSign,
    pub eps_n: CausalSign,
    pub eps_b: CausalSign,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpatialFrenet3 {
    pub s: f64,
    pub t: SemiQuaternion,
    pub n: SemiQuaternion,
    pub b: SemiQuaternion,
    pub k: f64,
    pub r: f64,
    pub signs: SpatialSigns,
}

impl SpatialFrenet3 {
    pub fn frame(&self) -> [SemiQuaternion; 3] {
        [self.t, self.n, self.b]
    }

    /// Largest deviation from g-orthonormality, including scalar parts.
    pub fn frame_defect(&self, ctx: &MetricContext) -> f64 {
        let f = self.frame();
        let eps = [self.signs.eps_t, self.signs.eps_n, self.signs.eps_b].map(CausalSign::value);
        let mut worst: f64 = f.iter().map(|v| v.q4.abs()).fold(0.0, f64::max);
        for i in 0..3 {
            worst = worst.max((ctx.g(f[i], f[i]) - eps[i]).abs());
            for j in i + 1..3 {
                worst = worst.max(ctx.g(f[i], f[j]).abs());
            }
        }
        worst
    }
}

/// `ε4 q T̄`, which must be spatial when q = ±ε_T x T for a spatial x.
fn right_divide(
    q: SemiQuaternion,
    tangent: SemiQuaternion,
    ctx: &MetricContext,
    s: f64,
    which: &'static str,
) -> Result<SemiQuaternion> {
    let x = ctx.mul(q, tangent.conjugate()) * ctx.ambient(3);
    if x.q4.abs() > EXTRACTION_TOL * x.max_abs().max(1.0) {
        return Err(GeomError::ExtractionFailure { s, which, scalar: x.q4 });
    }
    let v = x.vector_part();
    if (ctx.h(v, v).abs() - 1.0).abs() > 1e-6 {
        return Err(GeomError::ExtractionFailure { s, which, scalar: ctx.h(v, v) });
    }
    Ok(v)
}

/// Spatial frame of the curve whose 4D apparatus is `app`.
///
/// b is oriented as cross3(t, n); the right quotient of E can come out with
/// either sign depending on the causal characters. r follows from the
/// derivative of n = ε4 B T̄ through the 4D Frenet equations.
pub fn extract_spatial_frame(app: &FrenetApparatus4, ctx: &MetricContext) -> Result<SpatialFrenet3> {
    let s = app.s;
    let t = right_divide(app.normal, app.tangent, ctx, s, "t")?;
    let n = right_divide(app.binormal, app.tangent, ctx, s, "n")?;
    let b_raw = right_divide(app.trinormal, app.tangent, ctx, s, "b")?;
    let c = ctx.cross3(t, n)?;
    let orient = if b_raw.dist(c) <= b_raw.dist(-c) { 1.0 } else { -1.0 };
    let b = b_raw * orient;
    let signs = SpatialSigns { eps_t: ctx.causal_sign(t)?, eps_n: ctx.causal_sign(n)?, eps_b: ctx.causal_sign(b)? };
    let e_n4 = app.signs.eps_n.value();
    let e_t = app.signs.eps_t.value();
    let r = e_n4 * orient * app.third + e_t * app.kappa;
    Ok(SpatialFrenet3 { s, t, n, b, k: app.k, r, signs })
}

fn scalar_check(d: &[SemiQuaternion], s: f64, ctx: &MetricContext) -> Result<()> {
    for q in d {
        if q.q4.abs() > ctx.null_tolerance().max(EXTRACTION_TOL) * q.max_abs().max(1.0) {
            return Err(GeomError::NonSpatialCurve { s, scalar: q.q4 });
        }
    }
    Ok(())
}

/// Frenet apparatus of a unit-speed spatial curve: t = α', n = α''/N(α''),
/// b = cross3(t, n), k = ε_n N(α''), r = ε_b g(α''', b) / N(α'').
pub fn spatial_frenet(alpha: &CurveSpec, s: f64, ctx: &MetricContext) -> Result<SpatialFrenet3> {
    let d = alpha.derivatives(s, 3)?;
    scalar_check(&d, s, ctx)?;
    let t = d[0].vector_part();
    let speed = ctx.norm(t);
    if (speed - 1.0).abs() > default_frame_tol(alpha.mode()) || ctx.classify(t) == Causal::Null {
        return Err(GeomError::NotUnitSpeed { s, speed });
    }
    let acc = d[1].vector_part();
    let n2 = ctx.norm(acc);
    if n2 <= ctx.null_tolerance().sqrt() || ctx.classify(acc) == Causal::Null {
        return Err(GeomError::NullCurvatureVector { s, norm: n2 });
    }
    let n = acc / n2;
    let b = ctx.cross3(t, n)?;
    let signs = SpatialSigns { eps_t: ctx.causal_sign(t)?, eps_n: ctx.causal_sign(n)?, eps_b: ctx.causal_sign(b)? };
    let k = signs.eps_n.value() * n2;
    let r = signs.eps_b.value() * ctx.g(d[2], b) / n2;
    Ok(SpatialFrenet3 { s, t, n, b, k, r, signs })
}

type TangentField = dyn Fn(f64) -> Result<SemiQuaternion> + Send + Sync;

/// A spatial curve known through its tangent field: position by quadrature
/// from an anchor, higher derivatives by central differences of the field.
pub struct AssociatedCurve {
    name: String,
    anchor_s: f64,
    anchor: SemiQuaternion,
    step: f64,
    tangent: Box<TangentField>,
}

const NAN4: SemiQuaternion = SemiQuaternion::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN);

impl AssociatedCurve {
    pub fn new(
        name: impl Into<String>,
        anchor_s: f64,
        anchor: SemiQuaternion,
        tangent: impl Fn(f64) -> Result<SemiQuaternion> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), anchor_s, anchor, step: ASSOCIATED_STEP, tangent: Box::new(tangent) }
    }

    fn field(&self, s: f64) -> SemiQuaternion {
        (self.tangent)(s).unwrap_or(NAN4)
    }
}

impl CurveSource for AssociatedCurve {
    fn position(&self, s: f64) -> SemiQuaternion {
        let panels = (((s - self.anchor_s).abs() / 0.25).ceil() as usize).max(1);
        self.anchor + composite_gl(|u| self.field(u), self.anchor_s, s, panels)
    }

    fn exact_derivatives(&self, s: f64, order: usize) -> Option<Vec<SemiQuaternion>> {
        if order == 0 || order > self.max_exact_order() {
            return None;
        }
        let mut out = vec![(self.tangent)(s).ok()?];
        if order > 1 {
            out.extend(stencil::derivatives(|u| self.field(u), s, self.step, order - 1));
        }
        out.iter().all(|q| q.is_finite()).then_some(out)
    }

    fn max_exact_order(&self) -> usize {
        3
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

fn inset(dom: Domain, margin: f64) -> Result<Domain> {
    Domain::new(dom.min + margin, dom.max - margin)
}

fn fd_reach(curve: &CurveSpec, order: usize) -> f64 {
    match curve.mode() {
        DerivativeMode::FiniteDifference { step } => half_width(order) as f64 * step,
        DerivativeMode::Analytic => 0.0,
    }
}

fn wrap(dom: Domain, anchor_s: f64, src: AssociatedCurve) -> Result<CurveSpec> {
    if !dom.contains(anchor_s) {
        return Err(GeomError::OutOfDomain { s: anchor_s, min: dom.min, max: dom.max });
    }
    Ok(CurveSpec::analytic(dom, Arc::new(src)))
}

/// The associated spatial curve α of ξ with α(anchor_s) = anchor and
/// α' = t from `extract_spatial_frame`.
pub fn associated_curve(
    xi: &CurveSpec,
    anchor_s: f64,
    anchor: SemiQuaternion,
    ctx: &MetricContext,
) -> Result<CurveSpec> {
    let (xi_c, ctx_c) = (xi.clone(), *ctx);
    let src = AssociatedCurve::new(format!("alpha({})", xi.source().describe()), anchor_s, anchor, move |s| {
        Ok(extract_spatial_frame(&frenet_apparatus(&xi_c, s, &ctx_c)?, &ctx_c)?.t)
    });
    let margin = half_width(2) as f64 * ASSOCIATED_STEP + fd_reach(xi, 4);
    wrap(inset(xi.domain(), margin)?, anchor_s, src)
}

/// t* of the involute at evolute parameter s: the spatial tangent
/// extracted from φ's own T and N.
pub fn involute_spatial_tangent(pair: &InvolutePair, s: f64, ctx: &MetricContext) -> Result<SemiQuaternion> {
    let tn = pair.local_tangent_normal(s, ctx)?;
    right_divide(tn.normal, tn.tangent, ctx, s, "t*")
}

/// The associated curve β of the involute, parameterized by the evolute
/// parameter: β(anchor_s) = anchor, β' = t*.
pub fn associated_involute_curve(
    pair: &InvolutePair,
    anchor_s: f64,
    anchor: SemiQuaternion,
    ctx: &MetricContext,
) -> Result<CurveSpec> {
    let (p, ctx_c) = (pair.clone(), *ctx);
    let name = format!("beta({})", pair.involute.source().describe());
    let src = AssociatedCurve::new(name, anchor_s, anchor, move |s| involute_spatial_tangent(&p, s, &ctx_c));
    let margin = half_width(2) as f64 * ASSOCIATED_STEP + fd_reach(&pair.involute, 4);
    wrap(inset(pair.evolute.domain(), margin)?, anchor_s, src)
}

/// Writes `s,a1,a2,a3` rows for a spatial curve.
pub fn write_associated_csv<W: Write>(curve: &CurveSpec, grid: &[f64], out: W) -> Result<()> {
    let io = |e: csv::Error| GeomError::InvalidCurve(format!("csv write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "a1", "a2", "a3"]).map_err(io)?;
    for &s in grid {
        let p = curve.position(s)?;
        let row = [s, p.q1, p.q2, p.q3].map(crate::format_real);
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| GeomError::InvalidCurve(format!("csv write failed: {e}")))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairingSample {
    pub s: f64,
    pub t: SemiQuaternion,
    pub n: SemiQuaternion,
    pub t_star: SemiQuaternion,
    /// g(t*, n); zero when t* lies in the plane of t and b.
    pub g_tstar_n: f64,
    /// The coordinate form h(t, t*).
    pub h_t_tstar: f64,
    /// Scalar part of the product t t*, equal to -ε4 h(t, t*).
    pub product_scalar: f64,
    /// Share of t* off the n axis, in coordinates of the orthonormal
    /// frame {t, n, b}: 1 when t* ⟂ n, 0 when t* ∥ n.
    pub gap: f64,
    /// Euclidean sine of the angle between t* and n, for reference; it
    /// shrinks when the frame vectors have large coordinates.
    pub euclid_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingReport {
    pub samples: Vec<PairingSample>,
    /// Sample parameters skipped as singular points of the involute.
    pub skipped: Vec<f64>,
    pub max_g_tstar_n: f64,
    pub min_gap: f64,
    pub tol: f64,
    pub orthogonal: bool,
    pub collinear_detected: bool,
    pub pass: bool,
}

fn euclid_sine(a: SemiQuaternion, b: SemiQuaternion) -> f64 {
    let ([a1, a2, a3], [b1, b2, b3]) = (a.xyz(), b.xyz());
    let cr = [a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1];
    let n = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    n(cr) / (n(a.xyz()) * n(b.xyz()))
}

fn frame_gap(v: SemiQuaternion, sp: &SpatialFrenet3, ctx: &MetricContext) -> f64 {
    let eps = [sp.signs.eps_t, sp.signs.eps_n, sp.signs.eps_b].map(CausalSign::value);
    let [a, b, c] = [sp.t, sp.n, sp.b].map(|e| ctx.g(v, e));
    let (a, b, c) = (a * eps[0], b * eps[1], c * eps[2]);
    (a * a + c * c).sqrt() / (a * a + b * b + c * c).sqrt()
}

/// t* stays g-orthogonal to n and never becomes collinear with it, so the
/// associated curves of an involute pair are never themselves an
/// involute pair. Samples over the evolute domain, inset by 5 percent.
pub fn check_tangent_pairing(pair: &InvolutePair, samples: usize, ctx: &MetricContext, tol: f64) -> Result<PairingReport> {
    let dom = pair.evolute.domain();
    let pad = 0.05 * dom.len();
    let grid = crate::curvekit::linspace(dom.min + pad, dom.max - pad, samples.max(2));
    check_tangent_pairing_on(pair, &grid, ctx, tol)
}

pub fn check_tangent_pairing_on(pair: &InvolutePair, grid: &[f64], ctx: &MetricContext, tol: f64) -> Result<PairingReport> {
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for &s in grid {
        if !pair.is_regular(s, ctx) {
            skipped.push(s);
            continue;
        }
        let sp = extract_spatial_frame(&frenet_apparatus(&pair.evolute, s, ctx)?, ctx)?;
        let t_star = involute_spatial_tangent(pair, s, ctx)?;
        samples.push(PairingSample {
            s,
            t: sp.t,
            n: sp.n,
            t_star,
            g_tstar_n: ctx.g(t_star, sp.n),
            h_t_tstar: ctx.h(sp.t, t_star),
            product_scalar: ctx.mul(sp.t, t_star).scalar_part(),
            gap: frame_gap(t_star, &sp, ctx),
            euclid_gap: euclid_sine(t_star, sp.n),
        });
    }
    let max_g_tstar_n = samples.iter().map(|x| x.g_tstar_n.abs()).fold(0.0, f64::max);
    let min_gap = samples.iter().map(|x| x.gap).fold(f64::INFINITY, f64::min);
    let orthogonal = max_g_tstar_n <= tol;
    let collinear_detected = min_gap < COLLINEARITY_GAP_MIN;
    let pass = !samples.is_empty() && orthogonal && !collinear_detected;
    Ok(PairingReport { samples, skipped, max_g_tstar_n, min_gap, tol, orthogonal, collinear_detected, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::builtin::{example31, fuzz_suite};
    use crate::curvekit::builtin::JetCurve;
    use crate::curvekit::linspace;
    use crate::involute::make_involute;

    const R2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn example_extraction_at_zero() {
        let ctx = MetricContext::default();
        let app = frenet_apparatus(&example31(), 0.0, &ctx).unwrap();
        let sp = extract_spatial_frame(&app, &ctx).unwrap();
        assert!(sp.t.dist(SemiQuaternion::spatial(0.0, 1.0, R2)) < 1e-14, "{}", sp.t);
        assert!(sp.frame_defect(&ctx) < 1e-12);
        assert!((sp.k + R2).abs() < 1e-12);
        assert!((sp.r + 1.0).abs() < 1e-12);
        assert_eq!(sp.signs.eps_t, CausalSign::Plus);
    }

    #[test]
    fn extraction_round_trips_to_the_4d_frame() {
        let ctx = MetricContext::default();
        for (_, c) in fuzz_suite(6, 0, &ctx) {
            for s in [-0.8, 0.1, 0.9] {
                let app = frenet_apparatus(&c, s, &ctx).unwrap();
                let sp = extract_spatial_frame(&app, &ctx).unwrap();
                let e_t = app.signs.eps_tangent.value();
                let back = ctx.mul(sp.t, app.tangent) * e_t;
                assert!(back.dist(app.normal) < 1e-10);
                assert!((ctx.mul(sp.n, app.tangent) * e_t).dist(app.binormal) < 1e-10);
                assert!((ctx.mul(sp.b, app.tangent) * e_t).dist_up_to_sign(app.trinormal) < 1e-10);
                assert!(sp.frame_defect(&ctx) < 1e-9);
            }
        }
    }

    #[test]
    fn scalar_tangent_gives_normal_vector_part() {
        let ctx = MetricContext::default();
        let t = SemiQuaternion::ONE;
        let q = SemiQuaternion::spatial(0.0, 0.0, 1.0);
        assert!(right_divide(q, t, &ctx, 0.0, "t").unwrap().dist(q) < 1e-15);
        let bad = SemiQuaternion::new(0.0, 0.0, 0.6, 0.8);
        assert!(matches!(
            right_divide(bad, SemiQuaternion::E3, &ctx, 0.0, "t"),
            Err(GeomError::ExtractionFailure { .. })
        ));
    }

    #[test]
    fn associated_curve_matches_its_extracted_apparatus() {
        let ctx = MetricContext::default();
        for (_, c) in fuzz_suite(4, 0, &ctx) {
            let alpha = associated_curve(&c, 0.0, SemiQuaternion::ZERO, &ctx).unwrap();
            for s in linspace(-1.0, 1.0, 5) {
                let direct = spatial_frenet(&alpha, s, &ctx).unwrap();
                let ext = extract_spatial_frame(&frenet_apparatus(&c, s, &ctx).unwrap(), &ctx).unwrap();
                // n = α''/N(α'') agrees with the extracted n up to the sign ε_n sign(k)
                let flip = ext.signs.eps_n.value() * ext.k.signum();
                assert!(direct.t.dist(ext.t) < 1e-7);
                assert!(direct.n.dist(ext.n * flip) < 1e-7, "{} vs {}", direct.n, ext.n);
                assert!(direct.b.dist(ext.b * flip) < 1e-7);
                assert!((direct.k - flip * ext.k).abs() < 1e-6, "k {} {}", direct.k, ext.k);
                assert!((direct.r - ext.r).abs() < 1e-5, "r {} {}", direct.r, ext.r);
            }
        }
    }

    #[test]
    fn straight_line_has_no_normal() {
        let ctx = MetricContext::default();
        let dom = Domain::new(-1.0, 1.0).unwrap();
        let line = CurveSpec::analytic(dom, Arc::new(JetCurve::new("line", |s| [s * 0.0, s * 0.0, s, s * 0.0])));
        assert!(matches!(spatial_frenet(&line, 0.0, &ctx), Err(GeomError::NullCurvatureVector { .. })));
        let lifted = CurveSpec::analytic(dom, Arc::new(JetCurve::new("lifted", |s| [s * 0.0, s * 0.0, s, s * s])));
        assert!(matches!(spatial_frenet(&lifted, 0.5, &ctx), Err(GeomError::NonSpatialCurve { .. })));
    }

    #[test]
    fn example_involute_tangent_is_constant() {
        let ctx = MetricContext::default();
        let pair = make_involute(&example31(), 2.0, &ctx);
        for s in [-1.0, 0.0, 1.5] {
            let ts = involute_spatial_tangent(&pair, s, &ctx).unwrap();
            assert!(ts.dist(SemiQuaternion::spatial(0.0, -1.0, 0.0)) < 1e-12, "{ts}");
        }
        let beta = associated_involute_curve(&pair, 0.0, SemiQuaternion::spatial(2.0, 2.0, 2.0), &ctx).unwrap();
        let p = beta.position(0.7).unwrap();
        assert!(p.dist(SemiQuaternion::spatial(2.0, 1.3, 2.0)) < 1e-12);
    }

    #[test]
    fn tangent_pairing_on_fuzz_pairs() {
        let ctx = MetricContext::default();
        for (p, c) in fuzz_suite(5, 0, &ctx) {
            let cc = if p.seed % 2 == 0 { 2.3 } else { -2.3 };
            let rep = check_tangent_pairing(&make_involute(&c, cc, &ctx), 9, &ctx, 1e-8).unwrap();
            assert!(rep.pass, "seed {}: {rep:?}", p.seed);
        }
    }
}
