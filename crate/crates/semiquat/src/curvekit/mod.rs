//! Curves with derivative access, arc-length tools, and the 4D
//! Serret-Frenet apparatus.

pub mod builtin;
pub mod curve;
pub mod frenet;
pub mod jet;
pub mod quadrature;
pub mod reparam;
pub mod spline;
pub mod stencil;

pub use curve::{linspace, CurveSource, CurveSpec, DerivativeMode, Domain};
pub use frenet::{
    apparatus_from_derivatives, check_unit_speed, frenet_apparatus, frenet_ode_residual, tangent_normal,
    tangent_normal_from_derivatives,    FrenetApparatus4, FrenetSigns, TangentNormal, UnitSpeedReport,
};
pub use reparam::{arclength_derivatives, reparameterize_by_arclength, ArcLengthMap, Reparameterized};
