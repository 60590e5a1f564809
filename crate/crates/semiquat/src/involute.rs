//! Involutes of unit-speed curves and the transfer of frames and
//! curvatures from the evolute to the involute.
//!
//! The involute is φ(s) = ξ(s) + (c - s) T_ξ(s). Its own arc length s*
//! satisfies ds*/ds = |(c - s) κ_ξ|. Transferred curvatures come in two
//! flavours: per unit evolute parameter (the closed forms) and per unit
//! involute arc length (divided by |(c - s) κ_ξ|).

use std::sync::Arc;

use serde::Serialize;

use crate::curvekit::frenet::default_frame_tol;
use crate::curvekit::{
    apparatus_from_derivatives, arclength_derivatives, frenet_apparatus, tangent_normal_from_derivatives, TangentNormal, linspace, reparameterize_by_arclength, stencil, CurveSource, CurveSpec, Domain,
    FrenetApparatus4, Reparameterized,
};
use crate::error::{GeomError, Result};
use crate::semialgebra::{det4, CausalSign, MetricContext, SemiQuaternion};

/// Relative guard band around s = c, as a fraction of the domain length.
pub const GUARD_FRACTION: f64 = 1e-2;
/// Speeds |(c - s) κ_ξ| below this are treated as singular.
pub const MIN_INVOLUTE_SPEED: f64 = 1e-6;
/// Default tolerance on the transfer radicands.
pub const TRANSFER_TOL: f64 = 1e-10;

struct InvoluteSource {
    evolute: CurveSpec,
    c: f64,
}

impl CurveSource for InvoluteSource {
    fn position(&self, s: f64) -> SemiQuaternion {
        let p = self.evolute.source().position(s);
        let d = self
            .evolute
            .derivatives(s, 1)
            .map(|d| d[0])
            .unwrap_or(SemiQuaternion::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN));
        p + d * (self.c - s)
    }

    /// φ^(n) = (c - s) ξ^(n+1) - (n - 1) ξ^(n).
    fn exact_derivatives(&self, s: f64, order: usize) -> Option<Vec<SemiQuaternion>> {
        let xi = self.evolute.source().exact_derivatives(s, order + 1)?;
        Some((1..=order).map(|n| xi[n] * (self.c - s) - xi[n - 1] * (n as f64 - 1.0)).collect())
    }

    fn max_exact_order(&self) -> usize {
        self.evolute.source().max_exact_order().saturating_sub(1)
    }

    fn describe(&self) -> String {
        format!("involute({}, c = {})", self.evolute.source().describe(), self.c)
    }
}

#[derive(Clone, Debug)]
pub struct InvolutePair {
    pub evolute: CurveSpec,
    pub involute: CurveSpec,
    pub c: f64,
    /// Parameters where (c - s) κ_ξ(s) vanishes.
    pub singular_set: Vec<f64>,
    /// Parameters where κ_ξ vanishes or is undefined; independent of c.
    pub kappa_zeros: Vec<f64>,
    pub guard: f64,
}

/// Build φ = ξ + (c - s) T_ξ. The involute keeps analytic derivatives when
/// the evolute has them.
pub fn make_involute(xi: &CurveSpec, c: f64, ctx: &MetricContext) -> InvolutePair {
    involute_with_zeros(xi, c, find_kappa_zeros(xi, ctx))
}

fn involute_with_zeros(xi: &CurveSpec, c: f64, kappa_zeros: Vec<f64>) -> InvolutePair {
    let src = InvoluteSource { evolute: xi.clone(), c };
    let dom = xi.domain();
    let involute = match xi.mode() {
        crate::curvekit::DerivativeMode::Analytic => CurveSpec::analytic(dom, Arc::new(src)),
        crate::curvekit::DerivativeMode::FiniteDifference { step } => {
            CurveSpec::finite_difference(dom, Arc::new(src), Some(step))
        }
    };
    let guard = GUARD_FRACTION * dom.len();
    let mut singular_set = kappa_zeros.clone();
    if dom.contains(c) {
        singular_set.push(c);
    }
    singular_set.sort_by(f64::total_cmp);
    singular_set.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    InvolutePair { evolute: xi.clone(), involute, c, singular_set, kappa_zeros, guard }
}

fn kappa_at(xi: &CurveSpec, s: f64, ctx: &MetricContext) -> Option<f64> {
    let d = xi.derivatives(s, 2).ok()?;
    let n2 = ctx.norm(d[1]);
    let sign = ctx.causal_sign(d[1]).ok()?;
    Some(sign.value() * n2)
}

fn find_kappa_zeros(xi: &CurveSpec, ctx: &MetricContext) -> Vec<f64> {
    let dom = xi.domain();
    let mut out = Vec::new();
    let f = |s: f64| kappa_at(xi, s, ctx);
    let grid = linspace(dom.min, dom.max, 2001);
    let mut prev: Option<(f64, f64)> = None;
    for &s in &grid {
        match f(s) {
            Some(k) if k.abs() > MIN_INVOLUTE_SPEED => {
                if let Some((s0, k0)) = prev {
                    if k0.signum() != k.signum() {
                        out.push(bisect_zero(&f, s0, s));
                    }
                }
                prev = Some((s, k));
            }
            Some(_) | None => {
                // κ vanishes or is undefined here; an FD stencil at the ends
                // is not a singular point, only interior failures are.
                if s > dom.min + 0.01 * dom.len() && s < dom.max - 0.01 * dom.len() {
                    out.push(s);
                }
                prev = None;
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

fn bisect_zero(f: &impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a).unwrap_or(0.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        match f(m) {
            Some(v) if v.signum() == fa0.signum() => a = m,
            _ => b = m,
        }
    }
    0.5 * (a + b)
}

impl InvolutePair {
    /// The involute of the same evolute for another constant, reusing the
    /// zeros of κ_ξ.
    pub fn with_constant(&self, c: f64) -> InvolutePair {
        involute_with_zeros(&self.evolute, c, self.kappa_zeros.clone())
    }

    /// Signed speed ds*/ds = (c - s) κ_ξ(s).
    pub fn signed_speed(&self, s: f64, ctx: &MetricContext) -> Result<f64> {
        let k = kappa_at(&self.evolute, s, ctx).ok_or(GeomError::NullCurvatureVector { s, norm: 0.0 })?;
        Ok((self.c - s) * k)
    }

    /// Refuses parameters inside the guard band or where the speed vanishes.
    pub fn check_regular(&self, s: f64, ctx: &MetricContext) -> Result<()> {
        let singular = GeomError::SingularInvolutePoint { s, c: self.c };
        if self.singular_set.iter().any(|&z| (s - z).abs() < self.guard) {
            return Err(singular);
        }
        match self.signed_speed(s, ctx) {
            Ok(v) if v.abs() >= MIN_INVOLUTE_SPEED => Ok(()),
            _ => Err(singular),
        }
    }

    pub fn is_regular(&self, s: f64, ctx: &MetricContext) -> bool {
        self.check_regular(s, ctx).is_ok()
    }

    /// Unit tangent of φ at evolute parameter `s`, oriented along increasing s.
    pub fn involute_tangent(&self, s: f64, ctx: &MetricContext) -> Result<SemiQuaternion> {
        self.check_regular(s, ctx)?;
        let d = self.involute.derivatives(s, 1)?[0];
        Ok(d / ctx.norm(d))
    }

    /// T and N of φ at evolute parameter `s`, from the chain rule applied
    /// to φ's derivatives; no global arc-length map is needed.
    pub fn local_tangent_normal(&self, s: f64, ctx: &MetricContext) -> Result<TangentNormal> {
        self.check_regular(s, ctx)?;
        let d = arclength_derivatives(&self.involute.derivatives(s, 2)?, ctx);
        tangent_normal_from_derivatives(s, &d, ctx, default_frame_tol(self.involute.mode()))
    }

    /// Full apparatus of φ at evolute parameter `s`, computed directly from
    /// φ's derivatives converted to its own arc length.
    pub fn local_apparatus(&self, s: f64, ctx: &MetricContext) -> Result<FrenetApparatus4> {
        self.check_regular(s, ctx)?;
        let d = arclength_derivatives(&self.involute.derivatives(s, 4)?, ctx);
        apparatus_from_derivatives(s, &d, ctx, default_frame_tol(self.involute.mode()))
    }

    /// Arc-length reparameterization of φ over `[a, b]`, which must avoid
    /// the singular set.
    pub fn arclength(&self, a: f64, b: f64, ctx: &MetricContext, step: Option<f64>) -> Result<InvoluteArcLength> {
        for s in [a, b] {
            self.check_regular(s, ctx)?;
        }
        if let Some(&z) = self.singular_set.iter().find(|&&z| z > a && z < b) {
            return Err(GeomError::SingularInvolutePoint { s: z, c: self.c });
        }
        let piece = self.involute.restricted(Domain::new(a, b)?)?;
        let reparam = reparameterize_by_arclength(&piece, 1e-13, ctx, step)?;
        Ok(InvoluteArcLength { pair: self.clone(), reparam })
    }
}

/// The involute re-expressed by its own arc length s*.
#[derive(Clone)]
pub struct InvoluteArcLength {
    pub pair: InvolutePair,
    pub reparam: Reparameterized,
}

impl InvoluteArcLength {
    pub fn s_star(&self, s: f64) -> f64 {
        self.reparam.map.sigma_of(s)
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.reparam.curve
    }

    // Exact arc-length derivatives when φ has them, else finite differences.
    fn derivative_curve(&self) -> CurveSpec {
        self.reparam.analytic().unwrap_or_else(|| self.reparam.curve.clone())
    }

    /// Directly computed apparatus of φ at evolute parameter `s`.
    pub fn apparatus(&self, s: f64, ctx: &MetricContext) -> Result<FrenetApparatus4> {
        self.pair.check_regular(s, ctx)?;
        let mut a = frenet_apparatus(&self.derivative_curve(), self.s_star(s), ctx)?;
        a.s = s;
        Ok(a)
    }

    pub fn tangent_normal(&self, s: f64, ctx: &MetricContext) -> Result<TangentNormal> {
        self.pair.check_regular(s, ctx)?;
        let mut tn = crate::curvekit::tangent_normal(&self.derivative_curve(), self.s_star(s), ctx)?;
        tn.s = s;
        Ok(tn)
    }
}

/// d(ξ(s), φ(s*)) = N(φ(s*) - ξ(s)).
pub fn involute_distance(pair: &InvolutePair, s: f64, ctx: &MetricContext) -> Result<f64> {
    Ok(ctx.norm(pair.involute.position(s)? - pair.evolute.position(s)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub is_pair: bool,
    pub residual: f64,
}

/// `max |h(T_φ(s*(s)), T_ξ(s))| <= tol` over `samples`. Tangents are
/// normalized, so neither curve has to be unit speed in its parameter.
pub fn is_involute_pair(
    phi: &CurveSpec,
    xi: &CurveSpec,
    correspondence: impl Fn(f64) -> f64,
    samples: &[f64],
    tol: f64,
    ctx: &MetricContext,
) -> Result<PairCheck> {
    let mut residual: f64 = 0.0;
    for &s in samples {
        let tp = phi.derivatives(correspondence(s), 1)?[0];
        let tx = xi.derivatives(s, 1)?[0];
        residual = residual.max((ctx.h(tp, tx) / (ctx.norm(tp) * ctx.norm(tx))).abs());
    }
    Ok(PairCheck { is_pair: residual <= tol, residual })
}

/// κ', k', third' and κ'', k'' of the evolute at `s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CurvatureDerivs {
    pub kappa1: f64,
    pub k1: f64,
    pub third1: f64,
    pub kappa2: f64,
    pub k2: f64,
}

pub const CURVATURE_DERIV_STEP: f64 = 1e-3;

/// Step for `curvature_derivs`: small for exact derivatives, otherwise
/// well above the curve's own stencil so the noise does not compound.
pub fn default_curvature_step(curve: &CurveSpec) -> f64 {
    match curve.mode() {
        crate::curvekit::DerivativeMode::Analytic => CURVATURE_DERIV_STEP,
        crate::curvekit::DerivativeMode::FiniteDifference { step } => (20.0 * step).max(1e-2),
    }
}

/// Finite differences of the sampled curvature functions with the same
/// stencils used for curve derivatives.
pub fn curvature_derivs(curve: &CurveSpec, s: f64, ctx: &MetricContext, step: f64) -> Result<CurvatureDerivs> {
    let hw = stencil::half_width(2) as i64;
    let vals: Vec<SemiQuaternion> = (-hw..=hw)
        .map(|j| {
            let a = frenet_apparatus(curve, s + j as f64 * step, ctx)?;
            Ok(SemiQuaternion::new(a.kappa, a.k, a.third, 0.0))
        })
        .collect::<Result<_>>()?;
    let lookup = |x: f64| vals[(((x - s) / step).round() as i64 + hw) as usize];
    let d = stencil::derivatives(lookup, s, step, 2);
    Ok(CurvatureDerivs { kappa1: d[0].q1, k1: d[0].q2, third1: d[0].q3, kappa2: d[1].q1, k2: d[1].q2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferredApparatus {
    pub s: f64,
    pub tangent: SemiQuaternion,
    pub normal: SemiQuaternion,
    pub binormal: SemiQuaternion,
    pub trinormal: SemiQuaternion,
    /// Curvatures with respect to the evolute parameter s.
    pub kappa: f64,
    pub k_star: f64,
    pub third_star: f64,
    pub eta_used: f64,
}

impl TransferredApparatus {
    pub fn frame(&self) -> [SemiQuaternion; 4] {
        [self.tangent, self.normal, self.binormal, self.trinormal]
    }

    /// Curvatures per unit arc length of φ, given ds*/ds.
    pub fn per_arc_length(&self, speed: f64) -> TransferredCurvatures {
        TransferredCurvatures {
            kappa: self.kappa,
            k_star: self.k_star,
            third_star: self.third_star,
        }
        .per_arc_length(speed)
    }

    pub fn frame_defect(&self, ctx: &MetricContext) -> f64 {
        let f = self.frame();
        let mut worst: f64 = (det4(f) - 1.0).abs();
        for i in 0..4 {
            worst = worst.max((ctx.h(f[i], f[i]).abs() - 1.0).abs());
            for j in i + 1..4 {
                worst = worst.max(ctx.h(f[i], f[j]).abs());
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferredCurvatures {
    pub kappa: f64,
    pub k_star: f64,
    pub third_star: f64,
}

impl TransferredCurvatures {
    pub fn per_arc_length(self, speed: f64) -> Self {
        let a = speed.abs();
        Self { kappa: self.kappa / a, k_star: self.k_star / a, third_star: self.third_star / a }
    }
}

struct Pieces {
    e: [f64; 5],
    kappa: f64,
    k: f64,
    tau: f64,
    /// ε_n ε_T k² + ε_T κ²
    d: f64,
    /// κ' k - κ k'
    w: f64,
    /// ε_T k² τ² (k² + ε_n κ²) + ε_b ε_T w²
    a: f64,
    /// k T + ε_t ε_N κ B
    u: SemiQuaternion,
}

fn pieces(app: &FrenetApparatus4, der: &CurvatureDerivs) -> Pieces {
    let e = app.signs.values();
    let [et_, en_, et, en, eb] = e;
    let (kappa, k, tau) = (app.kappa, app.k, app.third);
    let d = en * et_ * k * k + et_ * kappa * kappa;
    let w = der.kappa1 * k - kappa * der.k1;
    let a = et_ * k * k * tau * tau * (k * k + en * kappa * kappa) + eb * et_ * w * w;
    let u = app.tangent * k + app.binormal * (et * en_ * kappa);
    Pieces { e, kappa, k, tau, d, w, a, u }
}

fn transferred_normal(app: &FrenetApparatus4, p: &Pieces) -> Result<(SemiQuaternion, SemiQuaternion)> {
    let [_, en_, et, en, _] = p.e;
    if p.d.abs() <= TRANSFER_TOL * (1.0 + p.k * p.k + p.kappa * p.kappa) {
        return Err(GeomError::DegenerateTransfer { s: app.s, which: "normal radicand", value: p.d });
    }
    let tangent = app.normal * en_;
    let normal = (app.tangent * (-et * p.kappa) + app.binormal * (en * en_ * p.k)) / p.d.abs().sqrt();
    Ok((tangent, normal))
}

fn orient(t: SemiQuaternion, n: SemiQuaternion, b: SemiQuaternion, e: SemiQuaternion) -> (SemiQuaternion, f64) {
    if det4([t, n, b, e]) < 0.0 {
        (-e, -1.0)
    } else {
        (e, 1.0)
    }
}

/// Frame of φ predicted from ξ's apparatus and curvature derivatives.
pub fn transfer_frame(app: &FrenetApparatus4, der: &CurvatureDerivs, ctx: &MetricContext) -> Result<TransferredApparatus> {
    let p = pieces(app, der);
    let [_, en_, et, en, eb] = p.e;
    let (tangent, normal) = transferred_normal(app, &p)?;
    let scale = 1.0 + (p.k * p.k + p.kappa * p.kappa).powi(2) * (1.0 + p.tau * p.tau) + p.w * p.w;
    if p.a.abs() <= TRANSFER_TOL * scale {
        return Err(GeomError::DegenerateTransfer { s: app.s, which: "trinormal radicand", value: p.a });
    }
    let ra = p.a.abs().sqrt();
    let rd = p.d.abs().sqrt();
    let (k, kappa, tau, w) = (p.k, p.kappa, p.tau, p.w);
    let e0 = (p.u * (en * en_ * k * tau) + app.trinormal * (eb * et * en * w)) / ra;
    let binormal = (p.u * (et * w) - app.trinormal * (en_ * k * tau * (k * k + en * kappa * kappa))) / (rd * ra);
    let (trinormal, eta_used) = orient(tangent, normal, binormal, e0);
    let c = transfer_curvatures(app, der, ctx)?;
    let eb_star = en_ * ctx.h(trinormal, trinormal).signum();
    Ok(TransferredApparatus {
        s: app.s,
        tangent,
        normal,
        binormal,
        trinormal,
        kappa: c.kappa,
        k_star: c.k_star,
        third_star: c.third_star * eb_star,
        eta_used,
    })
}

/// κ_φ, k*, and third* with respect to the evolute parameter. The sign of
/// third* still needs φ's ε_b; `transfer_frame` applies it.
pub fn transfer_curvatures(
    app: &FrenetApparatus4,
    der: &CurvatureDerivs,
    _ctx: &MetricContext,
) -> Result<TransferredCurvatures> {
    let p = pieces(app, der);
    let [_, en_, et, en, eb] = p.e;
    transferred_normal(app, &p)?;
    let scale = 1.0 + (p.k * p.k + p.kappa * p.kappa).powi(2) * (1.0 + p.tau * p.tau) + p.w * p.w;
    if p.a.abs() <= TRANSFER_TOL * scale {
        return Err(GeomError::DegenerateTransfer { s: app.s, which: "trinormal radicand", value: p.a });
    }
    let (k, kappa, tau, w) = (p.k, p.kappa, p.tau, p.w);
    let kappa_phi = en * en_ * p.d.abs().sqrt();
    let k_star = en * en_ * p.a.abs().sqrt() / p.d.abs();
    let num = en * (w * (2.0 * der.k1 * tau + k * der.third1) - k * tau * (k * der.kappa2 - kappa * der.k2))
        - eb * kappa * k * k * tau.powi(3);
    let third_star = et * en * en_ * num * p.d.abs().sqrt() / p.a.abs();
    Ok(TransferredCurvatures { kappa: kappa_phi, k_star, third_star })
}

/// Transferred against directly computed values at one sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferComparison {
    pub s: f64,
    /// Per-vector distance up to sign, T, N, B, E.
    pub frame: [f64; 4],
    /// Differences of |κ_φ|, |k*|, |third*| per unit arc length of φ.
    pub curvature: [f64; 3],
}

impl TransferComparison {
    pub fn max_frame(&self) -> f64 {
        self.frame.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_curvature(&self) -> f64 {
        self.curvature.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs the general transfer at `s` and compares it with φ's own apparatus.
pub fn compare_transfer(pair: &InvolutePair, s: f64, ctx: &MetricContext) -> Result<TransferComparison> {
    let app = frenet_apparatus(&pair.evolute, s, ctx)?;
    let der = curvature_derivs(&pair.evolute, s, ctx, default_curvature_step(&pair.evolute))?;
    let t = transfer_frame(&app, &der, ctx)?;
    let direct = pair.local_apparatus(s, ctx)?;
    let c = t.per_arc_length(pair.signed_speed(s, ctx)?);
    let tf = t.frame();
    let df = direct.frame();
    Ok(TransferComparison {
        s,
        frame: std::array::from_fn(|i| tf[i].dist_up_to_sign(df[i])),
        curvature: [
            (c.kappa.abs() - direct.kappa.abs()).abs(),
            (c.k_star.abs() - direct.k.abs()).abs(),
            (c.third_star.abs() - direct.third.abs()).abs(),
        ],
    })
}

/// The w-curve transfer at `s` against φ's directly computed T and N.
/// B and E of a planar involute are not defined by φ alone, so the check
/// is that B is the scalar unit and the frame is orthonormal and oriented.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WCurveComparison {
    pub s: f64,
    pub tangent: f64,
    pub normal: f64,
    pub binormal_vs_unit: f64,
    pub frame_defect: f64,
}

impl WCurveComparison {
    pub fn max(&self) -> f64 {
        [self.tangent, self.normal, self.binormal_vs_unit, self.frame_defect].into_iter().fold(0.0, f64::max)
    }
}

pub fn compare_w_curve(pair: &InvolutePair, s: f64, ctx: &MetricContext, w_tol: f64) -> Result<WCurveComparison> {
    let app = frenet_apparatus(&pair.evolute, s, ctx)?;
    let der = curvature_derivs(&pair.evolute, s, ctx, default_curvature_step(&pair.evolute))?;
    let t = w_curve_transfer(&app, &der, ctx, w_tol)?;
    let direct = pair.local_tangent_normal(s, ctx)?;
    Ok(WCurveComparison {
        s,
        tangent: t.tangent.dist_up_to_sign(direct.tangent),
        normal: t.normal.dist_up_to_sign(direct.normal),
        binormal_vs_unit: t.binormal.dist_up_to_sign(SemiQuaternion::ONE),
        frame_defect: t.frame_defect(ctx),
    })
}

/// The constant-curvature specialization. Valid where the general
/// transfer degenerates because κ' = k' = 0.
pub fn w_curve_transfer(
    app: &FrenetApparatus4,
    der: &CurvatureDerivs,
    ctx: &MetricContext,
    tol: f64,
) -> Result<TransferredApparatus> {
    if der.kappa1.abs() > tol || der.k1.abs() > tol {
        return Err(GeomError::NotWCurve { s: app.s, kappa_prime: der.kappa1, k_prime: der.k1 });
    }
    let der0 = CurvatureDerivs { kappa1: 0.0, k1: 0.0, ..*der };
    let p = pieces(app, &der0);
    let [et_, en_, et, en, eb] = p.e;
    let (tangent, normal) = transferred_normal(app, &p)?;
    let (k, kappa, tau) = (p.k, p.kappa, p.tau);
    let q = et_ * k * k + en * et_ * kappa * kappa;
    if q.abs() <= TRANSFER_TOL * (1.0 + k * k + kappa * kappa) {
        return Err(GeomError::DegenerateTransfer { s: app.s, which: "w-curve radicand", value: q });
    }
    let e0 = (app.tangent * (en_ * k) + app.binormal * (et * kappa)) * (-en * et_ / q.abs().sqrt());
    let eb_star = CausalSign::of(en_ * ctx.h(e0, e0))?.value();
    let binormal = app.trinormal * (en * eb * eb_star);
    let (trinormal, eta_used) = orient(tangent, normal, binormal, e0);
    let m = k * k + en * kappa * kappa;
    let kappa_phi = en * en_ * p.d.abs().sqrt();
    let k_star = en * en_ * (k * tau).abs() * m.abs().sqrt() / p.d.abs();
    // third* = ε_b* ε_t ε_n ε_N (-ε_b κ k² τ³) √|D| / |A| with A = ε_T k² τ² m;
    // the k² τ² cancels, which is what keeps this finite as τ → 0.
    let third_star = eb_star * et * en * en_ * (-eb * kappa * tau) * p.d.abs().sqrt() / m.abs();
    Ok(TransferredApparatus {
        s: app.s,
        tangent,
        normal,
        binormal,
        trinormal,
        kappa: kappa_phi,
        k_star,
        third_star,
        eta_used,
    })
}

/// General transfer, falling back to the w-curve form where the general
/// trinormal radicand vanishes.
pub fn transfer_or_w_curve(
    app: &FrenetApparatus4,
    der: &CurvatureDerivs,
    ctx: &MetricContext,
    w_tol: f64,
) -> Result<TransferredApparatus> {
    match transfer_frame(app, der, ctx) {
        Err(GeomError::DegenerateTransfer { which: "trinormal radicand", .. }) => {
            w_curve_transfer(app, der, ctx, w_tol)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvekit::builtin::{example31, fuzz_curve, FuzzParams};
    use std::f64::consts::SQRT_2;

    #[test]
    fn with_constant_matches_fresh_construction() {
        let ctx = MetricContext::default();
        let xi = fuzz_curve(FuzzParams::from_seed(5, &ctx), &ctx);
        let base = make_involute(&xi, 0.3, &ctx);
        for c in [-1.0, 0.7, 9.0] {
            let a = base.with_constant(c);
            let b = make_involute(&xi, c, &ctx);
            assert_eq!(a.singular_set, b.singular_set);
            assert_eq!(a.involute.position(0.2).unwrap(), b.involute.position(0.2).unwrap());
        }
    }

    #[test]
    fn example_involute_closed_form() {
        let ctx = MetricContext::default();
        let c = 2.0;
        let pair = make_involute(&example31(), c, &ctx);
        for s in [-1.0f64, 0.0, 0.5, 1.0] {
            let (sh, ch) = (s.sinh(), s.cosh());
            let expect = SemiQuaternion::new((c - s) * sh + ch, SQRT_2 * c, (c - s) * ch + sh, SQRT_2);
            assert!(pair.involute.position(s).unwrap().dist(expect) < 1e-14);
        }
        assert_eq!(pair.involute.position(0.0).unwrap(), SemiQuaternion::new(1.0, 2.0 * SQRT_2, 2.0, SQRT_2));
        assert!((involute_distance(&pair, 0.5, &ctx).unwrap() - 1.5).abs() < 1e-14);
        assert_eq!(pair.singular_set, vec![2.0]);
    }

    #[test]
    fn singular_point_refused() {
        let ctx = MetricContext::default();
        let pair = make_involute(&example31(), 0.5, &ctx);
        assert!(pair.singular_set.contains(&0.5));
        assert!(matches!(pair.check_regular(0.5, &ctx), Err(GeomError::SingularInvolutePoint { .. })));
        assert!(involute_distance(&pair, 0.5, &ctx).unwrap() < 1e-15);
        assert!(pair.check_regular(0.0, &ctx).is_ok());
    }

    #[test]
    fn c_outside_domain_gives_empty_singular_set() {
        let ctx = MetricContext::default();
        let pair = make_involute(&example31(), 10.0, &ctx);
        assert!(pair.singular_set.is_empty());
    }

    #[test]
    fn example_general_transfer_degenerates() {
        let ctx = MetricContext::default();
        let a = frenet_apparatus(&example31(), 0.3, &ctx).unwrap();
        let der = CurvatureDerivs::default();
        let err = transfer_frame(&a, &der, &ctx).unwrap_err();
        assert!(matches!(err, GeomError::DegenerateTransfer { which: "trinormal radicand", .. }));
        let w = transfer_or_w_curve(&a, &der, &ctx, 1e-8).unwrap();
        assert!(w.binormal.dist_up_to_sign(SemiQuaternion::ONE) < 1e-14);
        assert!(w.tangent.dist(-a.normal) < 1e-15);
        assert!(w.frame_defect(&ctx) < 1e-13);
    }

    #[test]
    fn w_curve_rejects_varying_curvature() {
        let ctx = MetricContext::default();
        let a = frenet_apparatus(&example31(), 0.3, &ctx).unwrap();
        let der = CurvatureDerivs { kappa1: 0.1, ..Default::default() };
        assert!(matches!(w_curve_transfer(&a, &der, &ctx, 1e-8), Err(GeomError::NotWCurve { .. })));
    }

    #[test]
    fn transferred_frame_is_orthonormal_on_fuzz() {
        let ctx = MetricContext::default();
        let mut checked = 0;
        for seed in 0..30 {
            let c = fuzz_curve(FuzzParams::from_seed(seed, &ctx), &ctx);
            let (Ok(a), Ok(der)) = (frenet_apparatus(&c, 0.1, &ctx), curvature_derivs(&c, 0.1, &ctx, 1e-2))
            else {
                continue;
            };
            if let Ok(t) = transfer_frame(&a, &der, &ctx) {
                assert!(t.frame_defect(&ctx) < 1e-9, "seed {seed}: {}", t.frame_defect(&ctx));
                checked += 1;
            }
        }
        assert!(checked >= 10);
    }

    #[test]
    fn analytic_involute_tangency() {
        let ctx = MetricContext::default();
        let pair = make_involute(&example31(), 2.0, &ctx);
        let grid = linspace(-1.0, 1.0, 21);
        let r = is_involute_pair(&pair.involute, &pair.evolute, |s| s, &grid, 1e-8, &ctx).unwrap();
        assert!(r.is_pair && r.residual < 1e-14, "{r:?}");
        let same = is_involute_pair(&pair.evolute, &pair.evolute, |s| s, &grid, 1e-8, &ctx).unwrap();
        assert!(!same.is_pair);
    }
}
