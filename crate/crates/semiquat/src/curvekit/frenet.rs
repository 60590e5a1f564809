//! Serret-Frenet apparatus of a unit-speed curve in E^4_2.

use serde::Serialize;

use super::curve::{CurveSpec, DerivativeMode};
use crate::error::{GeomError, Result};
use crate::semialgebra::{det4, Causal, CausalSign, MetricContext, SemiQuaternion};

pub const FRAME_TOL_ANALYTIC: f64 = 1e-7;
pub const FRAME_TOL_FD: f64 = 1e-4;

pub fn default_frame_tol(mode: DerivativeMode) -> f64 {
    match mode {
        DerivativeMode::Analytic => FRAME_TOL_ANALYTIC,
        DerivativeMode::FiniteDifference { .. } => FRAME_TOL_FD,
    }
}

/// The five causal signs. `eps_tangent` and `eps_normal` are the signs of
/// T and N; `eps_t`, `eps_n`, `eps_b` belong to the associated spatial curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FrenetSigns {
    pub eps_tangent: CausalSign,
    pub eps_normal: CausalSign,
    pub eps_t: CausalSign,
    pub eps_n: CausalSign,
    pub eps_b: CausalSign,
}

impl FrenetSigns {
    pub fn values(&self) -> [f64; 5] {
        [self.eps_tangent, self.eps_normal, self.eps_t, self.eps_n, self.eps_b].map(CausalSign::value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrenetApparatus4 {
    pub s: f64,
    pub tangent: SemiQuaternion,
    pub normal: SemiQuaternion,
    pub binormal: SemiQuaternion,
    pub trinormal: SemiQuaternion,
    pub kappa: f64,
    pub k: f64,
    /// The combination `r - eps_t eps_T eps_N kappa`.
    pub third: f64,
    pub signs: FrenetSigns,
    /// Sign applied to the trinormal to make `det(T, N, B, E) = +1`.
    pub eta: f64,
}

impl FrenetApparatus4 {
    pub fn frame(&self) -> [SemiQuaternion; 4] {
        [self.tangent, self.normal, self.binormal, self.trinormal]
    }

    /// Largest deviation from h-orthonormality and positive orientation.
    pub fn frame_defect(&self, ctx: &MetricContext) -> f64 {
        let f = self.frame();
        let [et, en, _, eps_n, eps_b] = self.signs.values();
        let expect = [et, en, eps_n * et, eps_b * et];
        let mut worst: f64 = (det4(f) - 1.0).abs();
        for i in 0..4 {
            worst = worst.max((ctx.h(f[i], f[i]) - expect[i]).abs());
            for j in i + 1..4 {
                worst = worst.max(ctx.h(f[i], f[j]).abs());
            }
        }
        worst
    }
}

fn sign_of(ctx: &MetricContext, q: SemiQuaternion) -> Result<CausalSign> {
    ctx.causal_sign(q)
}

/// Apparatus from the first four derivatives of a unit-speed curve.
///
/// Construction order: T and N directly, then the wedge X = T ∧ N ∧ ξ'''
/// fixes ε_b, B comes from the wedge of X̂ with T and N, and E is X̂ with
/// the sign that makes the frame positively oriented.
pub fn apparatus_from_derivatives(
    s: f64,
    d: &[SemiQuaternion],
    ctx: &MetricContext,
    unit_tol: f64,
) -> Result<FrenetApparatus4> {
    let tol = ctx.null_tolerance();
    let t = d[0];
    let speed = ctx.norm(t);
    if (speed - 1.0).abs() > unit_tol || ctx.classify(t) == Causal::Null {
        return Err(GeomError::NotUnitSpeed { s, speed });
    }
    let eps_tangent = sign_of(ctx, t)?;

    let n2 = ctx.norm(d[1]);
    if n2 <= tol || ctx.classify(d[1]) == Causal::Null {
        return Err(GeomError::NullCurvatureVector { s, norm: n2 });
    }
    let normal = d[1] / n2;
    let eps_normal = sign_of(ctx, normal)?;
    let kappa = eps_normal.value() * n2;

    let x = ctx.wedge4(t, normal, d[2]);
    let nx = ctx.norm(x);
    if nx <= tol || ctx.classify(x) == Causal::Null {
        return Err(GeomError::DegenerateFrame { s, which: "T^N^xi'''", norm: nx });
    }
    let xh = x / nx;
    let eps_b = eps_tangent * sign_of(ctx, x)?;

    let [e_t, e_n, e_b] = [eps_tangent, eps_normal, eps_b].map(CausalSign::value);
    let binormal = ctx.wedge4(xh, t, normal) * (-e_b * e_n);
    let hb = ctx.h(binormal, binormal);
    if hb.abs() < 0.5 {
        return Err(GeomError::DegenerateFrame { s, which: "B", norm: hb.abs().sqrt() });
    }
    let eps_n = eps_tangent * CausalSign::of(hb)?;

    let mut trinormal = xh * (-eps_n.value() * e_b * e_t * e_n);
    let mut eta = 1.0;
    if det4([t, normal, binormal, trinormal]) < 0.0 {
        trinormal = -trinormal;
        eta = -1.0;
    }
    let k = e_n * nx / n2;
    let third = if d.len() > 3 { e_b * e_t * e_n * ctx.h(d[3], trinormal) / nx } else { f64::NAN };

    Ok(FrenetApparatus4 {
        s,
        tangent: t,
        normal,
        binormal,
        trinormal,
        kappa,
        k,
        third,
        signs: FrenetSigns {
            eps_tangent,
            eps_normal,
            eps_t: eps_tangent * eps_normal,
            eps_n,
            eps_b,
        },
        eta,
    })
}

pub fn frenet_apparatus(curve: &CurveSpec, s: f64, ctx: &MetricContext) -> Result<FrenetApparatus4> {
    frenet_apparatus_with_tol(curve, s, ctx, default_frame_tol(curve.mode()))
}

pub fn frenet_apparatus_with_tol(
    curve: &CurveSpec,
    s: f64,
    ctx: &MetricContext,
    unit_tol: f64,
) -> Result<FrenetApparatus4> {
    let d = curve.derivatives(s, 4)?;
    apparatus_from_derivatives(s, &d, ctx, unit_tol)
}

/// Tangent, unit normal and κ only. Works where the full frame does not,
/// e.g. on planar curves whose third derivative stays in span(T, N).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangentNormal {
    pub s: f64,
    pub tangent: SemiQuaternion,
    pub normal: SemiQuaternion,
    pub kappa: f64,
    pub eps_tangent: CausalSign,
    pub eps_normal: CausalSign,
}

pub fn tangent_normal(curve: &CurveSpec, s: f64, ctx: &MetricContext) -> Result<TangentNormal> {
    let d = curve.derivatives(s, 2)?;
    tangent_normal_from_derivatives(s, &d, ctx, default_frame_tol(curve.mode()))
}

pub fn tangent_normal_from_derivatives(
    s: f64,
    d: &[SemiQuaternion],
    ctx: &MetricContext,
    unit_tol: f64,
) -> Result<TangentNormal> {
    let t = d[0];
    let speed = ctx.norm(t);
    if (speed - 1.0).abs() > unit_tol || ctx.classify(t) == Causal::Null {
        return Err(GeomError::NotUnitSpeed { s, speed });
    }
    let n2 = ctx.norm(d[1]);
    if n2 <= ctx.null_tolerance() || ctx.classify(d[1]) == Causal::Null {
        return Err(GeomError::NullCurvatureVector { s, norm: n2 });
    }
    let normal = d[1] / n2;
    let eps_normal = ctx.causal_sign(normal)?;
    Ok(TangentNormal {
        s,
        tangent: t,
        normal,
        kappa: eps_normal.value() * n2,
        eps_tangent: ctx.causal_sign(t)?,
        eps_normal,
    })
}

/// Residuals of the four Frenet equations at `s`, frame derivatives taken
/// with a five-point central difference of step `h_step`. Each entry is
/// the coefficient (Euclidean) norm of the residual vector; N itself could
/// vanish on a nonzero null residual.
pub fn frenet_ode_residual(
    curve: &CurveSpec,
    s: f64,
    ctx: &MetricContext,
    h_step: f64,
) -> Result<[f64; 4]> {
    let at = |x: f64| frenet_apparatus(curve, x, ctx);
    let a = at(s)?;
    let nb: Vec<FrenetApparatus4> =
        [-2.0, -1.0, 1.0, 2.0].iter().map(|j| at(s + j * h_step)).collect::<Result<_>>()?;
    let w = [1.0 / 12.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 12.0];
    let deriv = |pick: fn(&FrenetApparatus4) -> SemiQuaternion| -> SemiQuaternion {
        nb.iter().zip(w).map(|(x, wi)| (pick(x) - pick(&a)) * wi).sum::<SemiQuaternion>() / h_step
    };
    let [_, e_nn, e_t, e_n, e_b] = a.signs.values();
    let (t, n, b, e) = (a.tangent, a.normal, a.binormal, a.trinormal);
    let r = [
        deriv(|x| x.tangent) - n * (e_nn * a.kappa),
        deriv(|x| x.normal) + t * (e_t * e_nn * a.kappa) - b * (e_n * a.k),
        deriv(|x| x.binormal) + n * (e_t * a.k) - e * (e_n * a.third),
        deriv(|x| x.trinormal) + b * (e_b * a.third),
    ];
    Ok(r.map(SemiQuaternion::coeff_norm))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitSpeedReport {
    pub max_deviation: f64,
    pub worst_s: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Samples `|N(ξ'(s)) - 1|` at `samples` evenly spaced points. Sample
/// points where the derivative is unavailable count as infinite deviation.
pub fn check_unit_speed(curve: &CurveSpec, samples: usize, tol: f64, ctx: &MetricContext) -> UnitSpeedReport {
    let dom = curve.domain();
    let reach = match curve.mode() {
        DerivativeMode::FiniteDifference { step } => 2.0 * step,
        DerivativeMode::Analytic => 0.0,
    };
    let grid = super::curve::linspace(dom.min + reach, dom.max - reach, samples.max(2));
    let mut max_deviation: f64 = 0.0;
    let mut worst_s = grid[0];
    for s in grid {
        let dev = curve
            .derivatives(s, 1)
            .map(|d| (ctx.norm(d[0]) - 1.0).abs())
            .unwrap_or(f64::INFINITY);
        if dev > max_deviation || dev.is_nan() {
            max_deviation = dev;
            worst_s = s;
        }
    }
    UnitSpeedReport { max_deviation, worst_s, tol, pass: max_deviation <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::builtin::{example31, fuzz_curve, FuzzParams};
    use std::f64::consts::SQRT_2;

    #[test]
    fn example_frame_at_origin() {
        let ctx = MetricContext::default();
        let a = frenet_apparatus(&example31(), 0.0, &ctx).unwrap();
        assert_eq!(a.tangent, SemiQuaternion::new(0.0, SQRT_2, 1.0, 0.0));
        assert_eq!(a.normal, SemiQuaternion::new(1.0, 0.0, 0.0, 0.0));
        assert!((a.kappa + 1.0).abs() < 1e-15);
        assert!((a.k.abs() - SQRT_2).abs() < 1e-14);
        assert!(a.third.abs() < 1e-15);
        assert!(a.binormal.dist(SemiQuaternion::new(0.0, 1.0, SQRT_2, 0.0)) < 1e-14);
        assert!(a.trinormal.dist(-SemiQuaternion::ONE) < 1e-14);
        let v = a.signs.values();
        assert_eq!(v, [-1.0, -1.0, 1.0, -1.0, -1.0]);
        assert!(a.frame_defect(&ctx) < 1e-13);
    }

    #[test]
    fn example_frame_matches_closed_form() {
        let ctx = MetricContext::default();
        let c = example31();
        for s in [-1.0f64, -0.3, 0.5, 1.0] {
            let a = frenet_apparatus(&c, s, &ctx).unwrap();
            let (sh, ch) = (s.sinh(), s.cosh());
            assert!(a.tangent.dist(SemiQuaternion::new(sh, SQRT_2, ch, 0.0)) < 1e-14);
            assert!(a.normal.dist(SemiQuaternion::new(ch, 0.0, sh, 0.0)) < 1e-14);
            assert!(a.binormal.dist(SemiQuaternion::new(SQRT_2 * sh, 1.0, SQRT_2 * ch, 0.0)) < 1e-13);
            assert!(a.frame_defect(&ctx) < 1e-12);
        }
    }

    #[test]
    fn ode_residual_small_on_example() {
        let ctx = MetricContext::default();
        let r = frenet_ode_residual(&example31(), 0.4, &ctx, 1e-3).unwrap();
        assert!(r.iter().all(|&x| x < 1e-9), "{r:?}");
    }

    #[test]
    fn sign_relations_on_fuzz_curves() {
        let ctx = MetricContext::default();
        for seed in 0..10 {
            let c = fuzz_curve(FuzzParams::from_seed(seed, &ctx), &ctx);
            let Ok(a) = frenet_apparatus(&c, 0.2, &ctx) else { continue };
            let [et, _, _, en, eb] = a.signs.values();
            assert_eq!(ctx.h(a.binormal, a.binormal).signum(), en * et);
            assert_eq!(ctx.h(a.trinormal, a.trinormal).signum(), eb * et);
            assert!(a.frame_defect(&ctx) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn not_unit_speed_is_reported() {
        let ctx = MetricContext::default();
        let c = crate::curvekit::builtin::example31_scaled(2.0);
        assert!(matches!(frenet_apparatus(&c, 0.1, &ctx), Err(GeomError::NotUnitSpeed { .. })));
    }

    #[test]
    fn planar_curve_has_no_full_frame() {
        let ctx = MetricContext::default();
        let src = crate::curvekit::builtin::JetCurve::new("hyperbola", |t| {
            let (sh, ch) = t.sinh_cosh();
            [ch, t * 0.0, sh, t * 0.0]
        });
        let dom = crate::curvekit::Domain::new(-1.0, 1.0).unwrap();
        let c = CurveSpec::analytic(dom, std::sync::Arc::new(src));
        assert!(matches!(frenet_apparatus(&c, 0.0, &ctx), Err(GeomError::DegenerateFrame { .. })));
        let tn = tangent_normal(&c, 0.0, &ctx).unwrap();
        assert!((tn.kappa.abs() - 1.0).abs() < 1e-15);
    }
}
