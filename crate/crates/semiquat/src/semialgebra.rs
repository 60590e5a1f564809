//! Semi-real quaternions with a configurable index-2 metric.
//!
//! The basis is (e1, e2, e3, 1). The bilinear form is the coordinate form
//! `h(p, q) = sum_i eps_i p_i q_i` with `eps = ambient_signs`. The product
//! uses the signs normalized against the scalar unit, `eps_i * eps_4`,
//! which keeps it associative for every index-2 signature and makes it
//! invariant under a global flip of the metric.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SemiQuaternion {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    /// Scalar part.
    pub q4: f64,
}

impl SemiQuaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(0.0, 0.0, 0.0, 1.0);
    pub const E1: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const E2: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const E3: Self = Self::new(0.0, 0.0, 1.0, 0.0);

    pub const fn new(q1: f64, q2: f64, q3: f64, q4: f64) -> Self {
        Self { q1, q2, q3, q4 }
    }

    pub const fn scalar(x: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, x)
    }

    pub const fn spatial(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        Self::from(c)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q1, self.q2, self.q3, self.q4]
    }

    pub fn scalar_part(self) -> f64 {
        self.q4
    }

    pub fn vector_part(self) -> Self {
        Self::spatial(self.q1, self.q2, self.q3)
    }

    pub fn conjugate(self) -> Self {
        Self::new(-self.q1, -self.q2, -self.q3, self.q4)
    }

    /// Split into `(temporal, spatial)` = (1/2 (q + q̄), 1/2 (q - q̄)).
    pub fn decompose(self) -> (Self, Self) {
        (Self::scalar(self.q4), self.vector_part())
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Euclidean length of the coefficient vector. Only used for
    /// conditioning checks, never as a geometric quantity.
    pub fn coeff_norm(self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Spatial (vector) components as a 3-array.
    pub fn xyz(self) -> [f64; 3] {
        [self.q1, self.q2, self.q3]
    }

    /// Distance in the max norm, for approximate comparisons.
    pub fn dist(self, other: Self) -> f64 {
        (self - other).max_abs()
    }

    /// Distance to `other` or `-other`, whichever is smaller.
    pub fn dist_up_to_sign(self, other: Self) -> f64 {
        self.dist(other).min(self.dist(-other))
    }
}

impl From<[f64; 4]> for SemiQuaternion {
    fn from(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl fmt::Display for SemiQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.q1, self.q2, self.q3, self.q4)
    }
}

impl Add for SemiQuaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.q1 + o.q1, self.q2 + o.q2, self.q3 + o.q3, self.q4 + o.q4)
    }
}

impl AddAssign for SemiQuaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for SemiQuaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.q1 - o.q1, self.q2 - o.q2, self.q3 - o.q3, self.q4 - o.q4)
    }
}

impl Neg for SemiQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.q1, -self.q2, -self.q3, -self.q4)
    }
}

impl Mul<f64> for SemiQuaternion {
    type Output = Self;
    fn mul(self, a: f64) -> Self {
        Self::new(self.q1 * a, self.q2 * a, self.q3 * a, self.q4 * a)
    }
}

impl Mul<SemiQuaternion> for f64 {
    type Output = SemiQuaternion;
    fn mul(self, q: SemiQuaternion) -> SemiQuaternion {
        q * self
    }
}

impl Div<f64> for SemiQuaternion {
    type Output = Self;
    fn div(self, a: f64) -> Self {
        Self::new(self.q1 / a, self.q2 / a, self.q3 / a, self.q4 / a)
    }
}

impl std::iter::Sum for SemiQuaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// The sign of `h(x, x)` for a non-null `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum CausalSign {
    Plus,
    Minus,
}

impl CausalSign {
    pub fn of(value: f64) -> Result<Self> {
        if value > 0.0 {
            Ok(Self::Plus)
        } else if value < 0.0 {
            Ok(Self::Minus)
        } else {
            Err(GeomError::NullSign { value })
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

impl Mul for CausalSign {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self == o {
            Self::Plus
        } else {
            Self::Minus
        }
    }
}

impl Neg for CausalSign {
    type Output = Self;
    fn neg(self) -> Self {
        self * Self::Minus
    }
}

impl From<CausalSign> for i8 {
    fn from(s: CausalSign) -> i8 {
        match s {
            CausalSign::Plus => 1,
            CausalSign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for CausalSign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Self::Plus),
            -1 => Ok(Self::Minus),
            _ => Err(format!("causal sign must be +1 or -1, got {v}")),
        }
    }
}

impl fmt::Display for CausalSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Causal {
    Spacelike,
    Timelike,
    Null,
}

pub const DEFAULT_NULL_TOLERANCE: f64 = 1e-9;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    ambient_signs: [i8; 4],
    spatial_signs: Option<[i8; 3]>,
    #[serde(default = "one")]
    orientation: i8,
    #[serde(default = "default_tol")]
    null_tolerance: f64,
}

fn one() -> i8 {
    1
}

fn default_tol() -> f64 {
    DEFAULT_NULL_TOLERANCE
}

/// Metric signs and orientation shared by every geometric operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetric")]
pub struct MetricContext {
    ambient_signs: [i8; 4],
    spatial_signs: [i8; 3],
    orientation: i8,
    null_tolerance: f64,
}

impl TryFrom<RawMetric> for MetricContext {
    type Error = GeomError;
    fn try_from(raw: RawMetric) -> Result<Self> {
        let ctx = Self {
            ambient_signs: raw.ambient_signs,
            spatial_signs: raw.spatial_signs.unwrap_or([
                raw.ambient_signs[0],
                raw.ambient_signs[1],
                raw.ambient_signs[2],
            ]),
            orientation: raw.orientation,
            null_tolerance: raw.null_tolerance,
        };
        ctx.validate()?;
        Ok(ctx)
    }
}

impl Default for MetricContext {
    fn default() -> Self {
        Self::new([-1, -1, 1, 1]).expect("default signature is valid")
    }
}

impl MetricContext {
    pub fn new(ambient_signs: [i8; 4]) -> Result<Self> {
        let ctx = Self {
            ambient_signs,
            spatial_signs: [ambient_signs[0], ambient_signs[1], ambient_signs[2]],
            orientation: 1,
            null_tolerance: DEFAULT_NULL_TOLERANCE,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// The literal sign pattern (+, +, -, -) of the alternate norm.
    pub fn paper24() -> Self {
        Self::new([1, 1, -1, -1]).expect("valid signature")
    }

    pub fn with_orientation(mut self, orientation: i8) -> Result<Self> {
        self.orientation = orientation;
        self.validate()?;
        Ok(self)
    }

    pub fn with_null_tolerance(mut self, tol: f64) -> Result<Self> {
        self.null_tolerance = tol;
        self.validate()?;
        Ok(self)
    }

    /// Every ambient sign negated. Norms and null classification are unchanged.
    pub fn flipped(self) -> Self {
        let a = self.ambient_signs.map(|x| -x);
        Self {
            ambient_signs: a,
            spatial_signs: [a[0], a[1], a[2]],
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeomError::InvalidMetric(m));
        if self.ambient_signs.iter().any(|&x| x != 1 && x != -1) {
            return bad(format!("ambient signs must be +-1: {:?}", self.ambient_signs));
        }
        if self.ambient_signs.iter().filter(|&&x| x == 1).count() != 2 {
            return bad(format!(
                "ambient signs need two +1 and two -1: {:?}",
                self.ambient_signs
            ));
        }
        if self.spatial_signs != [self.ambient_signs[0], self.ambient_signs[1], self.ambient_signs[2]] {
            return bad(format!(
                "spatial signs {:?} must equal the first three ambient signs {:?}",
                self.spatial_signs, self.ambient_signs
            ));
        }
        if self.orientation != 1 && self.orientation != -1 {
            return bad(format!("orientation must be +-1, got {}", self.orientation));
        }
        if !(self.null_tolerance > 0.0 && self.null_tolerance.is_finite()) {
            return bad(format!("null tolerance must be positive, got {}", self.null_tolerance));
        }
        Ok(())
    }

    pub fn ambient_signs(&self) -> [i8; 4] {
        self.ambient_signs
    }

    pub fn spatial_signs(&self) -> [i8; 3] {
        self.spatial_signs
    }

    pub fn orientation(&self) -> f64 {
        self.orientation as f64
    }

    pub fn null_tolerance(&self) -> f64 {
        self.null_tolerance
    }

    pub fn ambient(&self, i: usize) -> f64 {
        self.ambient_signs[i] as f64
    }

    /// Sign attached to e_i in the product table: `e_i * e_i = -basis_sign(i)`.
    pub fn basis_sign(&self, i: usize) -> f64 {
        self.ambient(i) * self.ambient(3)
    }

    /// Product of two basis elements as `(sign, index)`; index 3 is the unit.
    pub fn basis_product(&self, i: usize, j: usize) -> (f64, usize) {
        if i == 3 {
            return (1.0, j);
        }
        if j == 3 {
            return (1.0, i);
        }
        if i == j {
            return (-self.basis_sign(i), 3);
        }
        let k = 3 - i - j;
        let s = -self.basis_sign(i) * self.basis_sign(j);
        // (i, j, k) even iff j follows i cyclically
        if (i + 1) % 3 == j {
            (s, k)
        } else {
            (-s, k)
        }
    }

    pub fn mul(&self, p: SemiQuaternion, q: SemiQuaternion) -> SemiQuaternion {
        let (a, b) = (p.to_array(), q.to_array());
        let mut r = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                let (s, k) = self.basis_product(i, j);
                r[k] += s * a[i] * b[j];
            }
        }
        r.into()
    }

    pub fn h(&self, p: SemiQuaternion, q: SemiQuaternion) -> f64 {
        let (a, b) = (p.to_array(), q.to_array());
        (0..4).map(|i| self.ambient(i) * a[i] * b[i]).sum()
    }

    pub fn norm(&self, q: SemiQuaternion) -> f64 {
        self.h(q, q).abs().sqrt()
    }

    /// Spatial form: `h` restricted to e1, e2, e3.
    pub fn g(&self, u: SemiQuaternion, v: SemiQuaternion) -> f64 {
        let (a, b) = (u.xyz(), v.xyz());
        (0..3).map(|i| self.spatial_signs[i] as f64 * a[i] * b[i]).sum()
    }

    /// Null iff `|h(q,q)| <= tol * max|q_i|^2`.
    pub fn classify_with(&self, q: SemiQuaternion, tol: f64) -> Causal {
        let v = self.h(q, q);
        let m = q.max_abs();
        if v.abs() <= tol * m * m {
            Causal::Null
        } else if v > 0.0 {
            Causal::Spacelike
        } else {
            Causal::Timelike
        }
    }

    pub fn classify(&self, q: SemiQuaternion) -> Causal {
        self.classify_with(q, self.null_tolerance)
    }

    pub fn causal_sign(&self, q: SemiQuaternion) -> Result<CausalSign> {
        let v = self.h(q, q);
        match self.classify(q) {
            Causal::Null => Err(GeomError::NullSign { value: v }),
            _ => CausalSign::of(v),
        }
    }

    /// Vector part of the product of two spatial quaternions, so that
    /// `u v = -ε4 g(u, v) + cross3(u, v)` with ε4 the scalar-unit sign.
    pub fn cross3(&self, u: SemiQuaternion, v: SemiQuaternion) -> Result<SemiQuaternion> {
        for x in [u, v] {
            let m = x.vector_part().max_abs().max(1.0);
            if x.q4.abs() > self.null_tolerance * m {
                return Err(GeomError::NonSpatialInput { scalar: x.q4 });
            }
        }
        Ok(self.mul(u.vector_part(), v.vector_part()).vector_part())
    }

    /// The X with `h(X, w) = orientation * det(a, b, c, w)` for all w.
    pub fn wedge4(&self, a: SemiQuaternion, b: SemiQuaternion, c: SemiQuaternion) -> SemiQuaternion {
        let mut x = [0.0; 4];
        for (i, xi) in x.iter_mut().enumerate() {
            let d = det4([a, b, c, SemiQuaternion::basis(i)]);
            *xi = self.orientation() * d * self.ambient(i);
        }
        x.into()
    }
}

/// Determinant of the 4x4 matrix whose rows are the given quaternions.
pub fn det4(rows: [SemiQuaternion; 4]) -> f64 {
    let m = rows.map(|r| r.to_array());
    let minor = |c0: usize, c1: usize, c2: usize, r: usize| {
        let (a, b, c) = (m[r + 1], m[r + 2], m[r + 3]);
        a[c0] * (b[c1] * c[c2] - b[c2] * c[c1]) - a[c1] * (b[c0] * c[c2] - b[c2] * c[c0])
            + a[c2] * (b[c0] * c[c1] - b[c1] * c[c0])
    };
    m[0][0] * minor(1, 2, 3, 0) - m[0][1] * minor(0, 2, 3, 0) + m[0][2] * minor(0, 1, 3, 0)
        - m[0][3] * minor(0, 1, 2, 0)
}
