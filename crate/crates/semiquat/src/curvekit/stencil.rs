//! Central finite-difference stencils built from Fornberg's recurrence.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use crate::semialgebra::SemiQuaternion;

/// Values that stencils and quadrature rules can combine linearly.
pub trait Linear: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl Linear for f64 {}
impl Linear for SemiQuaternion {}

pub const MAX_FD_ORDER: usize = 4;

/// Half-width of the stencil used for each derivative order.
///
/// Orders 1 and 2 use 5 points, order 3 uses 7, order 4 uses 9. All are
/// at least fourth-order accurate.
pub fn half_width(order: usize) -> usize {
    match order {
        0..=2 => 2,
        3 => 3,
        _ => 4,
    }
}

/// Fornberg weights for derivatives 0..=m at `x0` from arbitrary `nodes`.
/// Returns `w[k][j]`, the weight of node j in the k-th derivative.
pub fn fornberg(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Unit-step central weights for `order`, indexed by offset `-hw..=hw`.
pub fn central_weights(order: usize) -> &'static [f64] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_FD_ORDER)
            .map(|k| {
                let hw = half_width(k) as i64;
                let nodes: Vec<f64> = (-hw..=hw).map(|j| j as f64).collect();
                fornberg(0.0, &nodes, k).swap_remove(k)
            })
            .collect()
    });
    &table[order]
}

/// Derivatives of orders `1..=max_order` at `s` with step `h`.
///
/// Each stencil is applied to `f(s + jh) - f(s)`, so components that are
/// constant come out exactly zero.
pub fn derivatives<T: Linear>(f: impl Fn(f64) -> T, s: f64, h: f64, max_order: usize) -> Vec<T> {
    assert!((1..=MAX_FD_ORDER).contains(&max_order));
    let hw = half_width(max_order) as i64;
    let center = f(s);
    let diffs: Vec<T> = (-hw..=hw)
        .map(|j| if j == 0 { T::default() } else { f(s + j as f64 * h) - center })
        .collect();
    (1..=max_order)
        .map(|order| {
            let w = central_weights(order);
            let off = (hw as usize) - half_width(order);
            let mut acc = T::default();
            for (i, &wi) in w.iter().enumerate() {
                if wi != 0.0 {
                    acc = acc + diffs[off + i] * wi;
                }
            }
            acc * h.powi(-(order as i32))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_five_point_weights() {
        let w1 = central_weights(1);
        let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w1.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let w2 = central_weights(2);
        let expect = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w2.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(central_weights(3).len(), 7);
        assert_eq!(central_weights(4).len(), 9);
    }

    #[test]
    fn weights_annihilate_constants_and_match_monomials() {
        for order in 1..=4 {
            let w = central_weights(order);
            let hw = half_width(order) as i64;
            for p in 0..=order + 3 {
                let m: f64 = (-hw..=hw)
                    .zip(w)
                    .map(|(j, wi)| wi * (j as f64).powi(p as i32))
                    .sum();
                let expect = if p == order { (1..=order).product::<usize>() as f64 } else { 0.0 };
                assert!((m - expect).abs() < 1e-10, "order {order} moment {p}: {m}");
            }
        }
    }

    #[test]
    fn exp_derivatives() {
        let d = derivatives(f64::exp, 0.3, 1e-2, 4);
        let e = 0.3f64.exp();
        assert!((d[0] - e).abs() < 1e-9);
        assert!((d[1] - e).abs() < 1e-8);
        assert!((d[2] - e).abs() < 1e-6);
        assert!((d[3] - e).abs() < 1e-6);
    }

    #[test]
    fn constant_gives_exact_zero() {
        let d = derivatives(|_| 1.234567, 0.1, 1e-3, 4);
        assert!(d.iter().all(|&x| x == 0.0));
    }
}
