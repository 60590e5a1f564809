//! Arc-length reparameterization.

use std::sync::Arc;

use super::curve::{CurveSource, CurveSpec, DerivativeMode, Domain};
use super::jet::{Jet, JET_LEN};
use super::quadrature::{adaptive, composite_gl};
use super::stencil::half_width;
use crate::error::{GeomError, Result};
use crate::semialgebra::{MetricContext, SemiQuaternion};

const PANELS: usize = 256;
const SPEED_SAMPLES: usize = 4096;

/// Maps between the original parameter t and arc length σ.
pub struct ArcLengthMap {
    base: CurveSpec,
    ctx: MetricContext,
    knots: Vec<f64>,
    lengths: Vec<f64>,
}

impl ArcLengthMap {
    fn speed(&self, t: f64) -> f64 {
        self.base.derivatives(t, 1).map(|d| self.ctx.norm(d[0])).unwrap_or(f64::NAN)
    }

    pub fn total(&self) -> f64 {
        *self.lengths.last().expect("non-empty")
    }

    pub fn param_range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("non-empty"))
    }

    fn panel_of_t(&self, t: f64) -> usize {
        let i = self.knots.partition_point(|&k| k <= t);
        i.clamp(1, self.knots.len() - 1) - 1
    }

    /// Arc length from the start of the range to `t`.
    pub fn sigma_of(&self, t: f64) -> f64 {
        let i = self.panel_of_t(t);
        self.lengths[i] + composite_gl(|u| self.speed(u), self.knots[i], t, 1)
    }

    /// Inverse of `sigma_of`: safeguarded Newton inside the bracketing panel.
    pub fn t_of(&self, sigma: f64) -> f64 {
        let n = self.lengths.len();
        let i = self.lengths.partition_point(|&l| l <= sigma).clamp(1, n - 1) - 1;
        let (mut lo, mut hi) = (self.knots[i], self.knots[i + 1]);
        let (l0, l1) = (self.lengths[i], self.lengths[i + 1]);
        let mut t = lo + (hi - lo) * ((sigma - l0) / (l1 - l0)).clamp(0.0, 1.0);
        for _ in 0..80 {
            let f = self.lengths[i] + composite_gl(|u| self.speed(u), self.knots[i], t, 1) - sigma;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / self.speed(t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() <= 1e-16 * t.abs().max(1.0);
            t = next;
            if done {
                break;
            }
        }
        t
    }
}

/// Derivatives with respect to arc length from derivatives `d = [x', x'', ...]`
/// with respect to a regular parameter. The parameter change t(σ) is
/// solved as a power series from dt/dσ = 1 / |x'(t)|.
pub fn arclength_derivatives(d: &[SemiQuaternion], ctx: &MetricContext) -> Vec<SemiQuaternion> {
    let n = d.len().min(JET_LEN - 1);
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    // velocity components expanded in δ = t - t0
    let vel: [Jet; 4] = std::array::from_fn(|j| {
        let mut c = [0.0; JET_LEN];
        for (k, ck) in c.iter_mut().enumerate().take(n) {
            *ck = d[k].to_array()[j] / fact(k);
        }
        Jet { c }
    });
    let mut hh = Jet::constant(0.0);
    for (j, v) in vel.iter().enumerate() {
        hh = hh + *v * *v * ctx.ambient(j);
    }
    if hh.c[0] < 0.0 {
        hh = -hh;
    }
    let inv_speed = hh.sqrt().recip();
    // δ(σ) by Picard iteration; each pass fixes one more coefficient
    let mut delta = Jet::constant(0.0);
    for _ in 0..=n {
        let rate = inv_speed.compose(delta);
        let mut next = [0.0; JET_LEN];
        for k in 1..JET_LEN {
            next[k] = rate.c[k - 1] / k as f64;
        }
        delta = Jet { c: next };
    }
    let comps: [Jet; 4] = std::array::from_fn(|j| {
        let mut c = [0.0; JET_LEN];
        for k in 1..=n {
            c[k] = d[k - 1].to_array()[j] / fact(k);
        }
        Jet { c }.compose(delta)
    });
    (1..=n).map(|k| comps.map(|x| x.derivative(k)).into()).collect()
}

struct ReparamSource {
    map: Arc<ArcLengthMap>,
}

impl CurveSource for ReparamSource {
    fn position(&self, sigma: f64) -> SemiQuaternion {
        let t = self.map.t_of(sigma);
        self.map.base.source().position(t)
    }

    fn exact_derivatives(&self, sigma: f64, order: usize) -> Option<Vec<SemiQuaternion>> {
        if order > self.max_exact_order() {
            return None;
        }
        let t = self.map.t_of(sigma);
        let d = self.map.base.derivatives(t, order).ok()?;
        Some(arclength_derivatives(&d, &self.map.ctx))
    }

    fn max_exact_order(&self) -> usize {
        if self.map.base.is_analytic() {
            self.map.base.max_order().min(JET_LEN - 1)
        } else {
            0
        }
    }

    fn describe(&self) -> String {
        format!("arclength({})", self.map.base.source().describe())
    }
}

/// A curve re-expressed by arc length, together with the parameter map.
#[derive(Clone)]
pub struct Reparameterized {
    pub curve: CurveSpec,
    pub map: Arc<ArcLengthMap>,
}

impl Reparameterized {
    /// The same reparameterized curve with exact derivatives, when the
    /// original curve has them.
    pub fn analytic(&self) -> Option<CurveSpec> {
        self.curve.source().max_exact_order().gt(&0).then(|| {
            CurveSpec::analytic(self.curve.domain(), self.curve.source().clone())
        })
    }
}

/// Reparameterize by arc length. The result is in FD mode with step
/// `step` (default `1e-3` times the total length).
pub fn reparameterize_by_arclength(
    curve: &CurveSpec,
    quadrature_tol: f64,
    ctx: &MetricContext,
    step: Option<f64>,
) -> Result<Reparameterized> {
    let dom = curve.domain();
    let reach = match curve.mode() {
        DerivativeMode::FiniteDifference { step } => half_width(1) as f64 * step,
        DerivativeMode::Analytic => 0.0,
    };
    let (a, b) = (dom.min + reach, dom.max - reach);
    if a >= b {
        return Err(GeomError::InvalidCurve("domain too short to reparameterize".into()));
    }
    let probe = |t: f64| -> Result<f64> {
        let d = curve.derivatives(t, 1)?[0];
        let speed = ctx.norm(d);
        let floor = ctx.null_tolerance().sqrt() * d.coeff_norm().max(1.0);
        if !(speed > floor) {
            return Err(GeomError::NullSpeedPoint { s: t, speed });
        }
        Ok(speed)
    };
    for i in 0..=SPEED_SAMPLES {
        probe(a + (b - a) * i as f64 / SPEED_SAMPLES as f64)?;
    }
    let knots: Vec<f64> = super::curve::linspace(a, b, PANELS + 1);
    let mut lengths = vec![0.0];
    let panel_tol = quadrature_tol / PANELS as f64;
    for w in knots.windows(2) {
        let seg = adaptive(|t| ctx.norm(curve.derivatives(t, 1).map(|d| d[0]).unwrap_or_default()), w[0], w[1], panel_tol);
        lengths.push(lengths.last().unwrap() + seg);
    }
    let map = Arc::new(ArcLengthMap { base: curve.clone(), ctx: *ctx, knots, lengths });
    let total = map.total();
    let out_dom = Domain::new(0.0, total)?;
    let src = Arc::new(ReparamSource { map: map.clone() });
    Ok(Reparameterized { curve: CurveSpec::finite_difference(out_dom, src, step), map })
}
