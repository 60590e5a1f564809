//! Truncated Taylor series for exact derivatives of closed-form curves.

use std::ops::{Add, Mul, Neg, Sub};

/// Number of Taylor coefficients carried; derivatives up to order 7.
pub const JET_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    /// Taylor coefficients, `c[k] = f^(k)(s) / k!`.
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x;
        Self { c }
    }

    /// The independent variable at `s`.
    pub fn var(s: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = s;
        c[1] = 1.0;
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    // k y_k = sum_j j u_j z_{k-j}, the shared shape of every recurrence below.
    fn conv_deriv(u: &Jet, z: &[f64; JET_LEN], k: usize) -> f64 {
        (1..=k).map(|j| j as f64 * u.c[j] * z[k - j]).sum::<f64>() / k as f64
    }

    pub fn exp(self) -> Self {
        let mut y = [0.0; JET_LEN];
        y[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            y[k] = Self::conv_deriv(&self, &y, k);
        }
        Self { c: y }
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        (s[0], c[0]) = self.c[0].sin_cos();
        for k in 1..JET_LEN {
            s[k] = Self::conv_deriv(&self, &c, k);
            c[k] = -Self::conv_deriv(&self, &s, k);
        }
        (Self { c: s }, Self { c })
    }

    pub fn sinh_cosh(self) -> (Self, Self) {
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = self.c[0].sinh();
        c[0] = self.c[0].cosh();
        for k in 1..JET_LEN {
            s[k] = Self::conv_deriv(&self, &c, k);
            c[k] = Self::conv_deriv(&self, &s, k);
        }
        (Self { c: s }, Self { c })
    }

    pub fn sqrt(self) -> Self {
        let mut y = [0.0; JET_LEN];
        y[0] = self.c[0].sqrt();
        for k in 1..JET_LEN {
            let cross: f64 = (1..k).map(|j| y[j] * y[k - j]).sum();
            y[k] = (self.c[k] - cross) / (2.0 * y[0]);
        }
        Self { c: y }
    }

    pub fn recip(self) -> Self {
        let mut y = [0.0; JET_LEN];
        y[0] = 1.0 / self.c[0];
        for k in 1..JET_LEN {
            let acc: f64 = (1..=k).map(|j| self.c[j] * y[k - j]).sum();
            y[k] = -acc * y[0];
        }
        Self { c: y }
    }

    /// The series of `self` evaluated at `inner - inner(0)`, i.e. the
    /// Taylor coefficients of f(s0 + δ(σ)) when `self` is expanded at s0.
    pub fn compose(self, inner: Jet) -> Self {
        let mut d = inner;
        d.c[0] = 0.0;
        let mut acc = Jet::constant(self.c[JET_LEN - 1]);
        for k in (0..JET_LEN - 1).rev() {
            acc = acc * d + self.c[k];
        }
        acc
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn sinh(self) -> Self {
        self.sinh_cosh().0
    }

    pub fn cosh(self) -> Self {
        self.sinh_cosh().1
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(o.c) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        Self { c: self.c.map(|x| -x) }
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; JET_LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Self { c }
    }
}

impl Mul<f64> for Jet {
    type Output = Self;
    fn mul(self, a: f64) -> Self {
        Self { c: self.c.map(|x| x * a) }
    }
}

impl Add<f64> for Jet {
    type Output = Self;
    fn add(mut self, a: f64) -> Self {
        self.c[0] += a;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_derivatives_cycle() {
        let s = 0.7f64;
        let (sh, ch) = Jet::var(s).sinh_cosh();
        for k in 0..JET_LEN {
            let (es, ec) = if k % 2 == 0 { (s.sinh(), s.cosh()) } else { (s.cosh(), s.sinh()) };
            assert!((sh.derivative(k) - es).abs() < 1e-12);
            assert!((ch.derivative(k) - ec).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_rule_through_sin() {
        // d/ds sin(3s) = 3 cos(3s), d2 = -9 sin(3s)
        let s = 0.2f64;
        let y = (Jet::var(s) * 3.0).sin();
        assert!((y.derivative(1) - 3.0 * (3.0 * s).cos()).abs() < 1e-12);
        assert!((y.derivative(2) + 9.0 * (3.0 * s).sin()).abs() < 1e-12);
        assert!((y.derivative(5) - 243.0 * (3.0 * s).cos()).abs() < 1e-9);
    }

    #[test]
    fn sqrt_recip_compose() {
        let s = 0.3f64;
        let x = Jet::var(s);
        let y = (x * x + 1.0).sqrt();
        let d1 = s / (s * s + 1.0).sqrt();
        assert!((y.derivative(1) - d1).abs() < 1e-14);
        let r = (x + 2.0).recip();
        assert!((r.derivative(3) + 6.0 / (s + 2.0).powi(4)).abs() < 1e-13);
        // exp(sin(σ)) at σ = 0.2: compose the exp series at sin(0.2) with sin
        let inner = Jet::var(0.2).sin();
        let outer = Jet::var(inner.value()).exp();
        let direct = inner.exp();
        let comp = outer.compose(inner);
        for k in 0..JET_LEN {
            assert!((comp.c[k] - direct.c[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn product_and_exp() {
        let s = -0.4f64;
        let x = Jet::var(s);
        let y = (x * x).exp();
        // (e^{s^2})'' = (2 + 4 s^2) e^{s^2}
        let e = (s * s).exp();
        assert!((y.derivative(2) - (2.0 + 4.0 * s * s) * e).abs() < 1e-12);
        let cube = x * x * x + 1.0;
        assert_eq!(cube.derivative(3), 6.0);
        assert_eq!(cube.derivative(4), 0.0);
    }
}
