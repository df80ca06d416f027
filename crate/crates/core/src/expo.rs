//! Divided differences of `exp` and a first-order dual number.
//!
//! Every closed-form integral of an exponential piece reduces to a divided
//! difference `exp[z0, ..., zn]`. Writing the integrals this way keeps them
//! finite and accurate when nodes coincide (e.g. a rate `beta - ik` that
//! happens to vanish) instead of dividing by a tiny difference.

use num_complex::Complex64 as C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and derivative with respect to `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: C64,
    pub d: C64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        v: C64::new(0.0, 0.0),
        d: C64::new(0.0, 0.0),
    };

    pub fn new(v: C64, d: C64) -> Self {
        Jet { v, d }
    }

    pub fn constant(v: C64) -> Self {
        Jet {
            v,
            d: C64::new(0.0, 0.0),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Jet { v: e, d: e * self.d }
    }

    pub fn recip(self) -> Self {
        let r = self.v.inv();
        Jet {
            v: r,
            d: -self.d * r * r,
        }
    }

    pub fn scale(self, s: C64) -> Self {
        Jet {
            v: self.v * s,
            d: self.d * s,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d: -self.d }
    }
}

impl Add<C64> for Jet {
    type Output = Jet;
    fn add(self, o: C64) -> Jet {
        Jet {
            v: self.v + o,
            d: self.d,
        }
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, o: C64) -> Jet {
        self.scale(o)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        self.scale(C64::new(o, 0.0))
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::ZERO, |a, b| a + b)
    }
}

const TAYLOR_TERMS: usize = 26;

/// `exp[z0, ..., zn]`, the divided difference of `exp` on the given nodes.
///
/// Nodes may repeat (confluent case).
pub fn exp_dd(z: &[C64]) -> C64 {
    let n = z.len();
    assert!(n >= 1, "exp_dd needs at least one node");
    if n == 1 {
        return z[0].exp();
    }
    let (mut far_i, mut far_j, mut diam) = (0, 1, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let d = (z[i] - z[j]).norm();
            if d > diam {
                diam = d;
                far_i = i;
                far_j = j;
            }
        }
    }
    if diam < 1.0 {
        return taylor_dd(z);
    }
    let without = |skip: usize| -> Vec<C64> {
        z.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, &w)| w)
            .collect()
    };
    (exp_dd(&without(far_i)) - exp_dd(&without(far_j))) / (z[far_j] - z[far_i])
}

/// Series about the centroid: `e^c * sum_m h_m(w) / (m + n - 1)!` with
/// `h_m` the complete homogeneous symmetric polynomials of `w = z - c`.
fn taylor_dd(z: &[C64]) -> C64 {
    let n = z.len();
    let c = z.iter().sum::<C64>() / n as f64;
    let mut h = [C64::new(0.0, 0.0); TAYLOR_TERMS];
    h[0] = C64::new(1.0, 0.0);
    let w0 = z[0] - c;
    for m in 1..TAYLOR_TERMS {
        h[m] = h[m - 1] * w0;
    }
    for &zr in &z[1..] {
        let w = zr - c;
        for m in 1..TAYLOR_TERMS {
            let prev = h[m - 1];
            h[m] += w * prev;
        }
    }
    let mut fact: f64 = (1..n).map(|j| j as f64).product();
    let mut sum = C64::new(0.0, 0.0);
    for (m, hm) in h.iter().enumerate() {
        if m > 0 {
            fact *= (m + n - 1) as f64;
        }
        sum += hm / fact;
    }
    c.exp() * sum
}

/// Divided difference on jet-valued nodes, with the derivative obtained
/// from confluent differences (`d/dt exp[.., z_j(t), ..] = z_j' exp[.., z_j, z_j, ..]`).
pub fn exp_dd_jet(z: &[Jet]) -> Jet {
    let vals: Vec<C64> = z.iter().map(|j| j.v).collect();
    let v = exp_dd(&vals);
    let mut d = C64::new(0.0, 0.0);
    let mut ext = Vec::with_capacity(vals.len() + 1);
    for (j, zj) in z.iter().enumerate() {
        if zj.d == C64::new(0.0, 0.0) {
            continue;
        }
        ext.clear();
        ext.extend_from_slice(&vals);
        ext.insert(j, vals[j]);
        d += zj.d * exp_dd(&ext);
    }
    Jet { v, d }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_point_matches_quotient() {
        let a = c(0.3, -1.2);
        let b = c(2.1, 0.7);
        let exact = (b.exp() - a.exp()) / (b - a);
        assert!((exp_dd(&[a, b]) - exact).norm() < 1e-14 * exact.norm());
        let a = c(0.3, 0.1);
        let b = c(0.31, 0.1);
        let exact = (b.exp() - a.exp()) / (b - a);
        assert!((exp_dd(&[a, b]) - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn confluent_limit_is_scaled_exp() {
        let a = c(-0.4, 0.9);
        // exp[a, a, a] = e^a / 2
        assert!((exp_dd(&[a, a, a]) - a.exp() / 2.0).norm() < 1e-15);
        assert!((exp_dd(&[a, a, a, a]) - a.exp() / 6.0).norm() < 1e-15);
    }

    #[test]
    fn symmetric_in_nodes() {
        let z = [c(0.1, 0.2), c(-3.0, 1.0), c(2.0, -0.5), c(0.4, 4.0)];
        let base = exp_dd(&z);
        let perm = [z[2], z[0], z[3], z[1]];
        assert!((exp_dd(&perm) - base).norm() < 1e-13 * base.norm().max(1e-3));
    }

    #[test]
    fn three_point_recursion_against_formula() {
        let (a, b, cc) = (c(0.0, 0.0), c(3.0, 1.0), c(-2.0, 2.5));
        let ab = (b.exp() - a.exp()) / (b - a);
        let bc = (cc.exp() - b.exp()) / (cc - b);
        let exact = (bc - ab) / (cc - a);
        assert!((exp_dd(&[a, b, cc]) - exact).norm() < 1e-13 * exact.norm());
    }

    #[test]
    fn jet_derivative_matches_finite_difference() {
        let f = |k: C64| {
            let z = [
                Jet::new(c(0.2, 0.0) - C64::i() * k, -C64::i()),
                Jet::new(C64::i() * k * 1.5, C64::i() * 1.5),
                Jet::constant(c(0.1, 0.3)),
            ];
            exp_dd_jet(&z)
        };
        let k = c(0.7, 0.4);
        let h = 1e-6;
        let fd = (f(k + h).v - f(k - h).v) / (2.0 * h);
        assert!((f(k).d - fd).norm() < 1e-8);
    }
}
