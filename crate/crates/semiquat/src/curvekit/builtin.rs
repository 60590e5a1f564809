//! Closed-form curves: the hyperbolic example, scaled variants, a cubic,
//! and the random trig/hyperbolic family used by the property suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::curve::{CurveSource, CurveSpec, Domain};
use super::jet::{Jet, JET_LEN};
use super::quadrature::composite_gl;
use crate::semialgebra::{MetricContext, SemiQuaternion};

type JetFn = dyn Fn(Jet) -> [Jet; 4] + Send + Sync;

fn jets_value(j: [Jet; 4]) -> SemiQuaternion {
    j.map(|x| x.value()).into()
}

fn jets_derivative(j: &[Jet; 4], k: usize) -> SemiQuaternion {
    j.map(|x| x.derivative(k)).into()
}

/// A curve given as a closed form over jets; derivatives are exact.
pub struct JetCurve {
    name: String,
    f: Box<JetFn>,
}

impl JetCurve {
    pub fn new(name: impl Into<String>, f: impl Fn(Jet) -> [Jet; 4] + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Box::new(f) }
    }
}

impl CurveSource for JetCurve {
    fn position(&self, s: f64) -> SemiQuaternion {
        jets_value((self.f)(Jet::constant(s)))
    }

    fn exact_derivatives(&self, s: f64, order: usize) -> Option<Vec<SemiQuaternion>> {
        if order > self.max_exact_order() {
            return None;
        }
        let j = (self.f)(Jet::var(s));
        Some((1..=order).map(|k| jets_derivative(&j, k)).collect())
    }

    fn max_exact_order(&self) -> usize {
        JET_LEN - 1
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// A curve known through its tangent; positions come from quadrature.
pub struct TangentCurve {
    name: String,
    anchor: f64,
    tangent: Box<JetFn>,
}

impl TangentCurve {
    pub fn new(
        name: impl Into<String>,
        anchor: f64,
        tangent: impl Fn(Jet) -> [Jet; 4] + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), anchor, tangent: Box::new(tangent) }
    }

    pub fn tangent(&self, s: f64) -> SemiQuaternion {
        jets_value((self.tangent)(Jet::constant(s)))
    }
}

impl CurveSource for TangentCurve {
    fn position(&self, s: f64) -> SemiQuaternion {
        composite_gl(|u| self.tangent(u), self.anchor, s, 8)
    }

    fn exact_derivatives(&self, s: f64, order: usize) -> Option<Vec<SemiQuaternion>> {
        if order > self.max_exact_order() {
            return None;
        }
        let j = (self.tangent)(Jet::var(s));
        Some((0..order).map(|k| jets_derivative(&j, k)).collect())
    }

    fn max_exact_order(&self) -> usize {
        JET_LEN
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

pub const EXAMPLE31_DOMAIN: (f64, f64) = (-4.0, 4.0);

/// ξ(s) = (cosh s, √2 s, sinh s, √2), unit speed under the default metric.
pub fn example31() -> CurveSpec {
    let dom = Domain::new(EXAMPLE31_DOMAIN.0, EXAMPLE31_DOMAIN.1).expect("valid");
    CurveSpec::analytic(dom, Arc::new(example31_source(1.0)))
}

/// ξ(λ t): speed |λ| in t.
pub fn example31_scaled(lambda: f64) -> CurveSpec {
    let dom = Domain::new(EXAMPLE31_DOMAIN.0 / lambda.abs(), EXAMPLE31_DOMAIN.1 / lambda.abs())
        .expect("valid");
    CurveSpec::analytic(dom, Arc::new(example31_source(lambda)))
}

fn example31_source(lambda: f64) -> JetCurve {
    let r2 = std::f64::consts::SQRT_2;
    let name = if lambda == 1.0 { "example31".to_string() } else { format!("example31*{lambda}") };
    JetCurve::new(name, move |t| {
        let s = t * lambda;
        let (sh, ch) = s.sinh_cosh();
        [ch, s * r2, sh, Jet::constant(r2)]
    })
}

/// A polynomial curve (0.2 t², 0.1 t³, 2t, t); spacelike but not unit speed.
pub fn cubic() -> CurveSpec {
    let dom = Domain::new(-1.5, 1.5).expect("valid");
    let src = JetCurve::new("cubic", |t| [t * t * 0.2, t * t * t * 0.1, t * 2.0, t]);
    CurveSpec::analytic(dom, Arc::new(src))
}

const PAIRINGS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

/// Rotation or boost in the (i, j) plane, whichever preserves h.
fn plane_motion(x: [Jet; 4], (i, j): (usize, usize), angle: Jet, ctx: &MetricContext) -> [Jet; 4] {
    let mut y = x;
    if ctx.ambient(i) == ctx.ambient(j) {
        let (sn, cs) = angle.sin_cos();
        y[i] = cs * x[i] - sn * x[j];
        y[j] = sn * x[i] + cs * x[j];
    } else {
        let (sh, ch) = angle.sinh_cosh();
        y[i] = ch * x[i] + sh * x[j];
        y[j] = sh * x[i] + ch * x[j];
    }
    y
}

/// Parameters of one member of the random unit-speed family
/// T(s) = R2(v(s)) R1(u(s)) T0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuzzParams {
    pub seed: u64,
    pub pairing: usize,
    pub a: [f64; 6],
    pub t0: [f64; 4],
}

impl FuzzParams {
    pub fn from_seed(seed: u64, ctx: &MetricContext) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairing = rng.gen_range(0..3);
        let a = [(); 6].map(|_| rng.gen_range(-1.2..1.2));
        let t0 = loop {
            let v: SemiQuaternion = [(); 4].map(|_| rng.gen_range(-1.0..1.0)).into();
            let hv = ctx.h(v, v);
            if hv.abs() > 0.3 {
                break (v / hv.abs().sqrt()).to_array();
            }
        };
        Self { seed, pairing, a, t0 }
    }
}

pub const FUZZ_DOMAIN: (f64, f64) = (-1.5, 1.5);

pub fn fuzz_curve(p: FuzzParams, ctx: &MetricContext) -> CurveSpec {
    let ctx = *ctx;
    let a = p.a;
    let [pl1, pl2] = PAIRINGS[p.pairing];
    let t0 = p.t0;
    let src = TangentCurve::new(format!("fuzz:{}", p.seed), 0.0, move |s| {
        let u = s * a[0] + (s * (1.0 + a[2].abs())).sin() * (0.4 * a[1]);
        let v = s * a[3] + (s * (1.0 + a[5].abs())).cos() * (0.4 * a[4]);
        let x = t0.map(Jet::constant);
        plane_motion(plane_motion(x, pl1, u, &ctx), pl2, v, &ctx)
    });
    let dom = Domain::new(FUZZ_DOMAIN.0, FUZZ_DOMAIN.1).expect("valid");
    CurveSpec::analytic(dom, Arc::new(src))
}


/// Whether a fuzz curve is comfortably away from degenerate frames on
/// `[-1, 1]`: curvatures of moderate size and frame entries bounded.
pub fn well_conditioned(curve: &CurveSpec, ctx: &MetricContext) -> bool {
    super::curve::linspace(-1.0, 1.0, 41).into_iter().all(|s| {
        match super::frenet::frenet_apparatus(curve, s, ctx) {
            Ok(a) => {
                let (kp, k, th) = (a.kappa.abs(), a.k.abs(), a.third.abs());
                let bounded = a.frame().iter().all(|v| v.max_abs() < 20.0);
                (0.2..5.0).contains(&kp) && (0.2..5.0).contains(&k) && th < 5.0 && bounded
            }
            Err(_) => false,
        }
    })
}

/// The first `count` well-conditioned members of the fuzz family, scanning
/// seeds upward from `first_seed`.
pub fn fuzz_suite(count: usize, first_seed: u64, ctx: &MetricContext) -> Vec<(FuzzParams, CurveSpec)> {
    (first_seed..)
        .take(count * 50)
        .map(|seed| FuzzParams::from_seed(seed, ctx))
        .map(|p| (p, fuzz_curve(p, ctx)))
        .filter(|(_, c)| well_conditioned(c, ctx))
        .take(count)
        .collect()
}
