//! Verification suites: each check reduces a family of identities to one
//! worst-case residual and compares it with a named tolerance.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::RunConfig;
use crate::curvekit::builtin::fuzz_suite;
use crate::curvekit::{frenet_apparatus, frenet_ode_residual, CurveSpec};
use crate::error::Result;
use crate::involute::{compare_transfer, compare_w_curve, involute_distance, make_involute, InvolutePair};
use crate::semialgebra::{MetricContext, SemiQuaternion};
use crate::spatial3::check_tangent_pairing_on;

/// Step of the frame differences in the Frenet-equation check.
pub const ODE_STEP: f64 = 1e-3;
/// |κ'|, |k'| below this count as constant curvatures.
pub const W_CURVE_TOL: f64 = 1e-6;
/// Involute constant used on the fuzz curves, alternating in sign.
pub const FUZZ_C: f64 = 2.2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        Self { residual, tolerance, pass: residual <= tolerance, note: None }
    }

    fn from_result(r: Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(x) => Self::new(x, tolerance),
            Err(e) => Self { residual: f64::INFINITY, tolerance, pass: false, note: Some(e.to_string()) },
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub checks: BTreeMap<String, CheckResult>,
    pub config_echo: RunConfig,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.values().all(|c| c.pass)
    }
}

fn max_over(grid: &[f64], mut f: impl FnMut(f64) -> Result<Option<f64>>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &s in grid {
        if let Some(v) = f(s)? {
            if v.is_nan() {
                return Ok(f64::NAN);
            }
            worst = worst.max(v);
        }
    }
    Ok(worst)
}

fn regular_points(pair: &InvolutePair, grid: &[f64], ctx: &MetricContext) -> Vec<f64> {
    grid.iter().copied().filter(|&s| pair.is_regular(s, ctx)).collect()
}

fn frenet_residual(curve: &CurveSpec, grid: &[f64], ctx: &MetricContext) -> Result<f64> {
    let step = match curve.mode() {
        crate::curvekit::DerivativeMode::Analytic => ODE_STEP,
        crate::curvekit::DerivativeMode::FiniteDifference { step } => 10.0 * step,
    };
    max_over(grid, |s| Ok(Some(frenet_ode_residual(curve, s, ctx, step)?.into_iter().fold(0.0, f64::max))))
}

fn tangency(pair: &InvolutePair, grid: &[f64], ctx: &MetricContext) -> Result<f64> {
    max_over(&regular_points(pair, grid, ctx), |s| {
        let tx = pair.evolute.derivatives(s, 1)?[0];
        let tp = pair.involute_tangent(s, ctx)?;
        Ok(Some(ctx.h(tp, tx).abs()))
    })
}

fn distance(pair: &InvolutePair, grid: &[f64], ctx: &MetricContext) -> Result<f64> {
    max_over(grid, |s| Ok(Some((involute_distance(pair, s, ctx)? - (pair.c - s).abs()).abs())))
}

fn is_w_curve(curve: &CurveSpec, grid: &[f64], ctx: &MetricContext) -> bool {
    let step = crate::involute::default_curvature_step(curve);
    grid.iter().all(|&s| {
        crate::involute::curvature_derivs(curve, s, ctx, step)
            .is_ok_and(|d| d.kappa1.abs() <= W_CURVE_TOL && d.k1.abs() <= W_CURVE_TOL)
    })
}

/// Runs every applicable check for the configured curve plus the transfer
/// checks on `fuzz_count` random curves.
pub fn run_verify(cfg: &RunConfig) -> VerifyReport {
    let ctx = cfg.ctx();
    let tol = &cfg.tolerances;
    let grid = cfg.grid.points();
    let mut checks = BTreeMap::new();
    let mut put = |name: &str, c: CheckResult| {
        checks.insert(name.to_string(), c);
    };

    let curve = match cfg.build_curve() {
        Ok(c) => c,
        Err(e) => {
            put("curve", CheckResult::new(f64::INFINITY, 0.0).with_note(e.to_string()));
            return VerifyReport { checks, config_echo: cfg.clone() };
        }
    };
    let analytic = curve.is_analytic();
    let pick = |a: f64, f: f64| if analytic { a } else { f };

    put("frenet_equations", CheckResult::from_result(frenet_residual(&curve, &grid, &ctx), pick(tol.ode_analytic, tol.ode_fd)));

    let pair = make_involute(&curve, cfg.c, &ctx);
    put("involute_tangency", CheckResult::from_result(tangency(&pair, &grid, &ctx), tol.tangency));
    put(
        "involute_distance",
        CheckResult::from_result(distance(&pair, &grid, &ctx), pick(tol.distance_analytic, tol.distance_fd)),
    );

    let regular = regular_points(&pair, &grid, &ctx);
    if is_w_curve(&curve, &regular, &ctx) {
        let r = max_over(&regular, |s| Ok(Some(compare_w_curve(&pair, s, &ctx, W_CURVE_TOL)?.max())));
        put("w_curve_transfer", CheckResult::from_result(r, tol.w_curve_frame));
    }

    let mut pairs = vec![pair];
    let suite = fuzz_suite(cfg.fuzz_count, cfg.fuzz_seed, &ctx);
    for (p, c) in &suite {
        let cc = if p.seed % 2 == 0 { FUZZ_C } else { -FUZZ_C };
        pairs.push(make_involute(c, cc, &ctx));
    }
    let fuzz_pairs = &pairs[1..];
    let fuzz_grid = crate::curvekit::linspace(-1.0, 1.0, 11);
    let mut frame_err = Ok(0.0f64);
    let mut curv_err = Ok(0.0f64);
    for fp in fuzz_pairs {
        for &s in &fuzz_grid {
            match compare_transfer(fp, s, &ctx) {
                Ok(cmp) => {
                    frame_err = frame_err.map(|x| x.max(cmp.max_frame()));
                    curv_err = curv_err.map(|x| x.max(cmp.max_curvature()));
                }
                Err(e) => {
                    frame_err = Err(e.clone());
                    curv_err = Err(e);
                }
            }
        }
    }
    let n_fuzz = fuzz_pairs.len();
    let note = format!("{n_fuzz} random curves");
    put("frame_transfer", CheckResult::from_result(frame_err, tol.transfer_frame).with_note(note.clone()));
    put("curvature_transfer", CheckResult::from_result(curv_err, tol.transfer_curvature).with_note(note));

    let mut worst_g: Result<f64> = Ok(0.0);
    let mut min_gap = f64::INFINITY;
    for (i, p) in pairs.iter().enumerate() {
        let g = if i == 0 { grid.as_slice() } else { fuzz_grid.as_slice() };
        match check_tangent_pairing_on(p, g, &ctx, tol.orthogonality) {
            Ok(rep) => {
                worst_g = worst_g.map(|x| x.max(rep.max_g_tstar_n));
                min_gap = min_gap.min(rep.min_gap);
            }
            Err(e) => worst_g = Err(e),
        }
    }
    let mut c35 = CheckResult::from_result(worst_g, tol.orthogonality);
    if min_gap < crate::spatial3::COLLINEARITY_GAP_MIN {
        c35.pass = false;
    }
    put("associated_non_involute", c35.with_note(format!("min collinearity gap {}", crate::format_real(min_gap))));

    if cfg.curve == crate::config::CurveChoice::Builtin("example31".into()) {
        put("example_curvatures", CheckResult::from_result(example_curvatures(&curve, &grid, &ctx), tol.apparatus_analytic)
            .with_note("kappa = -1, |k| = sqrt 2, third = 0"));
    }

    VerifyReport { checks, config_echo: cfg.clone() }
}

/// Worst deviation of the hyperbolic example from κ = −1, |k| = √2,
/// third = 0. The sign of k depends on the binormal orientation and is
/// pinned separately by the acceptance suite.
pub fn example_curvatures(curve: &CurveSpec, grid: &[f64], ctx: &MetricContext) -> Result<f64> {
    max_over(grid, |s| {
        let a = frenet_apparatus(curve, s, ctx)?;
        let r2 = std::f64::consts::SQRT_2;
        Ok(Some([(a.kappa + 1.0).abs(), (a.k.abs() - r2).abs(), a.third.abs()].into_iter().fold(0.0, f64::max)))
    })
}

/// Worst per-vector distance of the example's frame from the closed forms
/// T = (sinh s, √2, cosh s, 0), N = (cosh s, 0, sinh s, 0),
/// B = (√2 sinh s, 1, √2 cosh s, 0) and E = −1, each up to sign.
pub fn example_frame_error(curve: &CurveSpec, grid: &[f64], ctx: &MetricContext) -> Result<f64> {
    let r2 = std::f64::consts::SQRT_2;
    max_over(grid, |s| {
        let a = frenet_apparatus(curve, s, ctx)?;
        let (sh, ch) = (s.sinh(), s.cosh());
        let expect = [
            SemiQuaternion::new(sh, r2, ch, 0.0),
            SemiQuaternion::new(ch, 0.0, sh, 0.0),
            SemiQuaternion::new(r2 * sh, 1.0, r2 * ch, 0.0),
            SemiQuaternion::scalar(-1.0),
        ];
        Ok(Some(a.frame().iter().zip(expect).map(|(x, y)| x.dist_up_to_sign(y)).fold(0.0, f64::max)))
    })
}
