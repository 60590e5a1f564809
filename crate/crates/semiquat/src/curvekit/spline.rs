//! Natural cubic splines through sampled curve points.

use std::sync::Arc;

use super::curve::{CurveSource, CurveSpec, Domain};
use crate::error::{GeomError, Result};
use crate::semialgebra::SemiQuaternion;

/// One interpolating spline per component.
#[derive(Clone, Debug)]
pub struct SplineCurve {
    s: Vec<f64>,
    y: Vec<SemiQuaternion>,
    /// Second derivatives at the knots.
    m: Vec<SemiQuaternion>,
}

impl SplineCurve {
    pub fn new(s: Vec<f64>, y: Vec<SemiQuaternion>) -> Result<Self> {
        let n = s.len();
        if n < 4 || y.len() != n {
            return Err(GeomError::InvalidCurve(format!("need at least 4 samples, got {n}")));
        }
        if let Some(i) = (1..n).find(|&i| !(s[i] > s[i - 1])) {
            return Err(GeomError::InvalidCurve(format!(
                "parameter not strictly increasing at row {} (s = {})",
                i + 1,
                s[i]
            )));
        }
        if let Some(i) = (0..n).find(|&i| !s[i].is_finite() || !y[i].is_finite()) {
            return Err(GeomError::InvalidCurve(format!("non-finite value at row {}", i + 1)));
        }
        // Tridiagonal solve for natural end conditions.
        let mut m = vec![SemiQuaternion::ZERO; n];
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![SemiQuaternion::ZERO; n];
        for i in 1..n - 1 {
            let h0 = s[i] - s[i - 1];
            let h1 = s[i + 1] - s[i];
            let rhs = ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) * 6.0;
            let diag = 2.0 * (h0 + h1) - h0 * c_prime[i - 1];
            c_prime[i] = h1 / diag;
            d_prime[i] = (rhs - d_prime[i - 1] * h0) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - m[i + 1] * c_prime[i];
        }
        Ok(Self { s, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.s
    }

    pub fn max_spacing(&self) -> f64 {
        self.s.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> SemiQuaternion {
        let n = self.s.len();
        let i = self.s.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let h = self.s[i + 1] - self.s[i];
        let a = (self.s[i + 1] - x) / h;
        let b = (x - self.s[i]) / h;
        self.y[i] * a
            + self.y[i + 1] * b
            + (self.m[i] * (a * a * a - a) + self.m[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }

    /// FD-mode curve over the sampled range.
    pub fn into_curve(self, step: Option<f64>) -> Result<CurveSpec> {
        let dom = Domain::new(self.s[0], *self.s.last().expect("non-empty"))?;
        let step = step.unwrap_or_else(|| (1e-3 * dom.len()).max(2.0 * self.max_spacing()));
        Ok(CurveSpec::finite_difference(dom, Arc::new(self), Some(step)))
    }
}

impl CurveSource for SplineCurve {
    fn position(&self, s: f64) -> SemiQuaternion {
        self.eval(s)
    }

    fn describe(&self) -> String {
        format!("spline({} samples)", self.s.len())
    }
}
