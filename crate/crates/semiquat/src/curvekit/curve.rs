use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::stencil::{self, MAX_FD_ORDER};
use crate::error::{GeomError, Result};
use crate::semialgebra::SemiQuaternion;

/// Something that can evaluate a curve, optionally with exact derivatives.
pub trait CurveSource: Send + Sync {
    fn position(&self, s: f64) -> SemiQuaternion;

    /// Derivatives of orders `1..=order` at `s`, if known in closed form.
    fn exact_derivatives(&self, _s: f64, _order: usize) -> Option<Vec<SemiQuaternion>> {
        None
    }

    /// Highest derivative order `exact_derivatives` can produce.
    fn max_exact_order(&self) -> usize {
        0
    }

    fn describe(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub min: f64,
    pub max: f64,
}

impl Domain {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(GeomError::InvalidCurve(format!("bad domain [{min}, {max}]")));
        }
        Ok(Self { min, max })
    }

    pub fn len(&self) -> f64 {
        self.max - self.min
    }

    fn slack(&self) -> f64 {
        1e-12 * self.len().max(1.0)
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.min - self.slack() && s <= self.max + self.slack()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

/// A parameterized curve in E^4_2 with derivative access.
#[derive(Clone)]
pub struct CurveSpec {
    domain: Domain,
    source: Arc<dyn CurveSource>,
    mode: DerivativeMode,
}

impl fmt::Debug for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveSpec")
            .field("domain", &self.domain)
            .field("mode", &self.mode)
            .field("source", &self.source.describe())
            .finish()
    }
}

impl CurveSpec {
    pub fn analytic(domain: Domain, source: Arc<dyn CurveSource>) -> Self {
        Self { domain, source, mode: DerivativeMode::Analytic }
    }

    /// FD-mode curve; the default step is `1e-3` times the domain length.
    pub fn finite_difference(domain: Domain, source: Arc<dyn CurveSource>, step: Option<f64>) -> Self {
        let step = step.unwrap_or(1e-3 * domain.len());
        Self { domain, source, mode: DerivativeMode::FiniteDifference { step } }
    }

    /// Same curve, derivatives taken by finite differences.
    pub fn with_finite_difference(&self, step: Option<f64>) -> Self {
        Self::finite_difference(self.domain, self.source.clone(), step)
    }

    /// Same curve on a smaller domain.
    pub fn restricted(&self, domain: Domain) -> Result<Self> {
        if !self.domain.contains(domain.min) || !self.domain.contains(domain.max) {
            return Err(GeomError::InvalidCurve(format!(
                "[{}, {}] is not inside [{}, {}]",
                domain.min, domain.max, self.domain.min, self.domain.max
            )));
        }
        Ok(Self { domain, ..self.clone() })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn is_analytic(&self) -> bool {
        self.mode == DerivativeMode::Analytic
    }

    pub fn source(&self) -> &Arc<dyn CurveSource> {
        &self.source
    }

    /// Highest derivative order available in the current mode.
    pub fn max_order(&self) -> usize {
        match self.mode {
            DerivativeMode::Analytic => self.source.max_exact_order(),
            DerivativeMode::FiniteDifference { .. } => MAX_FD_ORDER,
        }
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        if !s.is_finite() || !self.domain.contains(s) {
            return Err(GeomError::OutOfDomain { s, min: self.domain.min, max: self.domain.max });
        }
        Ok(())
    }

    pub fn position(&self, s: f64) -> Result<SemiQuaternion> {
        self.check_domain(s)?;
        Ok(self.source.position(s))
    }

    /// `[xi', xi'', ...]` up to `max_order`.
    pub fn derivatives(&self, s: f64, max_order: usize) -> Result<Vec<SemiQuaternion>> {
        self.check_domain(s)?;
        if max_order == 0 || max_order > self.max_order() {
            return Err(GeomError::DerivativeUnavailable { order: max_order });
        }
        match self.mode {
            DerivativeMode::Analytic => self
                .source
                .exact_derivatives(s, max_order)
                .ok_or(GeomError::DerivativeUnavailable { order: max_order }),
            DerivativeMode::FiniteDifference { step } => {
                let reach = stencil::half_width(max_order) as f64 * step;
                if !self.domain.contains(s - reach) || !self.domain.contains(s + reach) {
                    return Err(GeomError::StencilOverflow { s, step, order: max_order });
                }
                let src = &self.source;
                Ok(stencil::derivatives(|x| src.position(x), s, step, max_order))
            }
        }
    }
}

/// Uniform parameter grid with `count` points, both ends included.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![a],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}
