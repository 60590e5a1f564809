use thiserror::Error;

/// Everything that can go wrong while evaluating curves and frames.
///
/// Degenerate points are reported as errors carrying the parameter value,
/// never as NaN.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("metric context invalid: {0}")]
    InvalidMetric(String),
    #[error("expected a spatial quaternion, scalar part is {scalar:e}")]
    NonSpatialInput { scalar: f64 },
    #[error("cannot take the causal sign of a null quaternion (h = {value:e})")]
    NullSign { value: f64 },
    #[error("s = {s} lies outside the curve domain [{min}, {max}]")]
    OutOfDomain { s: f64, min: f64, max: f64 },
    #[error("stencil for order {order} at s = {s} with step {step} leaves the domain")]
    StencilOverflow { s: f64, step: f64, order: usize },
    #[error("derivative of order {order} is not available from this curve")]
    DerivativeUnavailable { order: usize },
    #[error("speed vanishes near s = {s} (N(xi') = {speed:e})")]
    NullSpeedPoint { s: f64, speed: f64 },
    #[error("curve is not unit speed at s = {s} (N(xi') = {speed})")]
    NotUnitSpeed { s: f64, speed: f64 },
    #[error("curvature vector is null at s = {s} (N(xi'') = {norm:e})")]
    NullCurvatureVector { s: f64, norm: f64 },
    #[error("frame degenerate at s = {s}: {which} has norm {norm:e}")]
    DegenerateFrame { s: f64, which: &'static str, norm: f64 },
    #[error("involute is singular at s = {s} (c = {c})")]
    SingularInvolutePoint { s: f64, c: f64 },
    #[error("frame transfer degenerate at s = {s}: {which} = {value:e}")]
    DegenerateTransfer { s: f64, which: &'static str, value: f64 },
    #[error("not a w-curve at s = {s}: kappa' = {kappa_prime:e}, k' = {k_prime:e}")]
    NotWCurve { s: f64, kappa_prime: f64, k_prime: f64 },
    #[error("spatial extraction of {which} failed at s = {s}: scalar part {scalar:e}")]
    ExtractionFailure { s: f64, which: &'static str, scalar: f64 },
    #[error("curve is not spatial at s = {s}: scalar part {scalar:e}")]
    NonSpatialCurve { s: f64, scalar: f64 },
    #[error("invalid curve data: {0}")]
    InvalidCurve(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
