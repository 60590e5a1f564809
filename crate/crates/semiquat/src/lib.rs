//! Semi-real quaternionic curves in E^4_2 and their associated spatial
//! curves in E^3_1: algebra, Frenet apparatus, involutes, and checks.

pub mod config;
pub mod curvekit;
pub mod error;
pub mod involute;
pub mod semialgebra;
pub mod spatial3;
pub mod verify;

pub use error::{GeomError, Result};
pub use semialgebra::{Causal, CausalSign, MetricContext, SemiQuaternion};

/// Shortest-exact decimal text with 17 significant digits, as used in
/// every CSV and JSON output.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}
