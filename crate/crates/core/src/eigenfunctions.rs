//! Eigenfunctions of the maximal operator: the general basis `u, v`, the
//! delta-case `u_lambda`, and two closed-form special cases.

use crate::error::{Error, Result};
use crate::greens::{bil_jet, conv_jet, fourier_moment, green, green_prime};
use crate::model::{Potential, SpectralParameter};
use crate::quad::integrate_any;
use num_complex::Complex64 as C64;
use serde::Serialize;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenfunctionKind {
    GeneralU,
    GeneralV,
    DeltaU,
    EmbeddedBox,
    ExpEven,
}

/// Which one-sided limit to take at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `-(G*p) + alpha G + beta G'`.
    Green { p: Potential, alpha: C64, beta: C64 },
    /// `Z (1 - cos k0(rho - |x|)) / k0^2` on `[-rho, rho]`.
    Box { z: f64, rho: f64, k0: f64 },
    /// `amp e^{ik|x|} + c e^{-mu|x|} / (mu^2 + lambda)`.
    Exp { c: C64, mu: f64, amp: C64 },
}

/// A solution of `-f'' + f_r(0) q1 - f'_r(0) q2 = k^2 f` off the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub k: SpectralParameter,
    pub kind: EigenfunctionKind,
    q1: Potential,
    q2: Potential,
    repr: Repr,
    tol: f64,
}

/// `Gamma_0 f = (f_r(0), -f'_r(0))`, `Gamma_1 f = (f'_s(0) - (q1, f), f_s(0) - (q2, f))`.
///
/// Regular parts are means of the one-sided limits, singular parts are jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryData {
    pub gamma0: [C64; 2],
    pub gamma1: [C64; 2],
}

/// Plane-wave amplitudes: `u = A e^{ikx} + B e^{-ikx}` for `x > 0`,
/// `C e^{ikx} + D e^{-ikx}` for `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveCoefficients {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

fn side_sign(s: Side) -> f64 {
    match s {
        Side::Left => -1.0,
        Side::Right => 1.0,
    }
}

/// `sign(x)`, or the side's sign exactly at 0.
fn sign_at(x: f64, s: Side) -> f64 {
    if x == 0.0 {
        side_sign(s)
    } else {
        x.signum()
    }
}

impl Eigenfunction {
    pub fn potentials(&self) -> (&Potential, &Potential) {
        (&self.q1, &self.q2)
    }

    /// One-sided value; the side only matters at `x = 0`.
    pub fn value_side(&self, x: f64, s: Side) -> Result<C64> {
        let k = self.k.k;
        Ok(match &self.repr {
            Repr::Green { p, alpha, beta } => {
                let conv = if p.is_zero() {
                    ZERO
                } else {
                    conv_jet(k, p, x, false, false, self.tol)?.v
                };
                let gp = if x == 0.0 {
                    -0.5 * side_sign(s) * C64::new(1.0, 0.0)
                } else {
                    green_prime(k, x)
                };
                -conv + alpha * green(k, x) + beta * gp
            }
            Repr::Box { z, rho, k0 } => {
                if x.abs() > *rho {
                    ZERO
                } else {
                    C64::new(z * (1.0 - (k0 * (rho - x.abs())).cos()) / (k0 * k0), 0.0)
                }
            }
            Repr::Exp { c, mu, amp } => {
                amp * (I * k * x.abs()).exp() + c * (-mu * x.abs()).exp() / (mu * mu + self.k.lambda)
            }
        })
    }

    /// One-sided derivative; the side only matters at `x = 0`.
    pub fn derivative_side(&self, x: f64, s: Side) -> Result<C64> {
        let k = self.k.k;
        let sg = sign_at(x, s);
        Ok(match &self.repr {
            Repr::Green { p, alpha, beta } => {
                let conv = if p.is_zero() {
                    ZERO
                } else {
                    conv_jet(k, p, x, true, false, self.tol)?.v
                };
                let gp = -0.5 * sg * (I * k * x.abs()).exp();
                -conv + alpha * gp - beta * k * k * green(k, x)
            }
            Repr::Box { z, rho, k0 } => {
                if x.abs() > *rho {
                    ZERO
                } else {
                    C64::new(-z * sg * (k0 * (rho - x.abs())).sin() / k0, 0.0)
                }
            }
            Repr::Exp { c, mu, amp } => {
                let t =
                    amp * I * k * (I * k * x.abs()).exp() - mu * c * (-mu * x.abs()).exp() / (mu * mu + self.k.lambda);
                sg * t
            }
        })
    }

    /// Value at `x`; at `0` the mean of the one-sided limits.
    pub fn value(&self, x: f64) -> Result<C64> {
        if x == 0.0 {
            Ok(0.5 * (self.value_side(0.0, Side::Left)? + self.value_side(0.0, Side::Right)?))
        } else {
            self.value_side(x, Side::Right)
        }
    }

    /// Derivative at `x`; at `0` the mean of the one-sided limits.
    pub fn derivative(&self, x: f64) -> Result<C64> {
        if x == 0.0 {
            Ok(0.5 * (self.derivative_side(0.0, Side::Left)? + self.derivative_side(0.0, Side::Right)?))
        } else {
            self.derivative_side(x, Side::Right)
        }
    }

    /// `(q, f) = int q* f`.
    pub fn inner(&self, q: &Potential) -> Result<C64> {
        if q.is_zero() {
            return Ok(ZERO);
        }
        let k = self.k.k;
        match &self.repr {
            Repr::Green { p, alpha, beta } => {
                let qc = q.conj();
                let bil = if p.is_zero() {
                    ZERO
                } else {
                    bil_jet(k, q, p, false, self.tol)?.v
                };
                let g = conv_jet(k, &qc, 0.0, false, false, self.tol)?.v;
                let gp = conv_jet(k, &qc, 0.0, true, false, self.tol)?.v;
                Ok(-bil + alpha * g - beta * gp)
            }
            _ => {
                let (lo, hi) = q.support();
                let mut err = None;
                let r = integrate_any(
                    |x| match self.value(x) {
                        Ok(v) => q.eval(x).conj() * v,
                        Err(e) => {
                            err.get_or_insert(e);
                            ZERO
                        }
                    },
                    lo,
                    hi,
                    &q.breakpoints(),
                    self.tol,
                )?;
                match err {
                    Some(e) => Err(e),
                    None => Ok(r.value),
                }
            }
        }
    }

    pub fn boundary_data(&self) -> Result<BoundaryData> {
        let (fl, fr) = (self.value_side(0.0, Side::Left)?, self.value_side(0.0, Side::Right)?);
        let (dl, dr) = (
            self.derivative_side(0.0, Side::Left)?,
            self.derivative_side(0.0, Side::Right)?,
        );
        Ok(BoundaryData {
            gamma0: [0.5 * (fl + fr), -0.5 * (dl + dr)],
            gamma1: [dr - dl - self.inner(&self.q1)?, fr - fl - self.inner(&self.q2)?],
        })
    }

    /// `-f'' - k^2 f + Gamma_0 f . (q1, q2)` at `x != 0`, with a 5-point
    /// second difference of step `1e-4`.
    pub fn ode_residual(&self, x: f64) -> Result<C64> {
        let h = 1e-4;
        let f = |t: f64| self.value(t);
        let d2 =
            (-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f(x)? + 16.0 * f(x - h)? - f(x - 2.0 * h)?) / (12.0 * h * h);
        let g0 = self.boundary_data()?.gamma0;
        Ok(-d2 - self.k.lambda * f(x)? + g0[0] * self.q1.eval(x) + g0[1] * self.q2.eval(x))
    }

    fn decay_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        for q in [&self.q1, &self.q2] {
            r = r.max(match (q, q.support_radius()) {
                (_, Some(s)) => s,
                (Potential::ExpEven { mu, .. }, None) => 30.0 / mu,
                _ => 0.0,
            });
        }
        r
    }
}

/// `||f||^2` over the line: quadrature on `[-L, L]` plus the plane-wave tail
/// `|f(+-L)|^2 / (2 Im k)`. `L` defaults to `max(support, 30 / Im k)`.
pub fn norm_squared(f: &Eigenfunction, truncation: Option<f64>, tol: f64) -> Result<f64> {
    let im = f.k.k.im;
    let compact = matches!(f.repr, Repr::Box { .. });
    if !(im > 0.0) && !compact {
        return Err(Error::Precondition("norm_squared needs Im k > 0".into()));
    }
    let base = f.decay_radius();
    let l = match truncation {
        Some(l) if l > 0.0 && l.is_finite() => l,
        Some(_) => return Err(Error::validation("L", "must be a positive finite real")),
        None if compact => base,
        None => base.max(30.0 / im),
    };
    let mut breaks = vec![0.0];
    for q in [&f.q1, &f.q2] {
        breaks.extend(q.breakpoints().into_iter().filter(|b| b.abs() < l));
    }
    for j in 1..8 {
        let t = l * j as f64 / 8.0;
        breaks.push(t);
        breaks.push(-t);
    }
    let mut err = None;
    let r = integrate_any(
        |x| match f.value(x) {
            Ok(v) => C64::new(v.norm_sqr(), 0.0),
            Err(e) => {
                err.get_or_insert(e);
                ZERO
            }
        },
        -l,
        l,
        &breaks,
        tol,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    let tail = if compact || !(im > 0.0) {
        0.0
    } else {
        (f.value(l)?.norm_sqr() + f.value(-l)?.norm_sqr()) / (2.0 * im)
    };
    Ok(r.value.re + tail)
}

/// The basis `u, v` of `ker(S_max - k^2)` with `Gamma_0 u = (1, 0)`,
/// `Gamma_0 v = (0, 1)`.
pub fn basis_general(
    k: &SpectralParameter,
    q1: &Potential,
    q2: &Potential,
    tol: f64,
) -> Result<(Eigenfunction, Eigenfunction)> {
    if !(k.k.im > 0.0) {
        return Err(Error::Precondition("basis_general needs Im k > 0".into()));
    }
    let kk = k.k;
    let g = |q: &Potential, prime: bool| -> Result<C64> {
        if q.is_zero() {
            Ok(ZERO)
        } else {
            Ok(conv_jet(kk, q, 0.0, prime, false, tol)?.v)
        }
    };
    let (g1, g1p) = (g(q1, false)?, g(q1, true)?);
    let (g2, g2p) = (g(q2, false)?, g(q2, true)?);
    let one = C64::new(1.0, 0.0);
    let make = |kind, p: &Potential, alpha, beta| Eigenfunction {
        k: *k,
        kind,
        q1: q1.clone(),
        q2: q2.clone(),
        repr: Repr::Green {
            p: p.clone(),
            alpha,
            beta,
        },
        tol,
    };
    let u = make(
        EigenfunctionKind::GeneralU,
        q1,
        -2.0 * I * kk * (one + g1),
        2.0 * I / kk * g1p,
    );
    let v = make(
        EigenfunctionKind::GeneralV,
        q2,
        -2.0 * I * kk * g2,
        -2.0 * I / kk * (one - g2p),
    );
    Ok((u, v))
}

/// `u_lambda = -(G*q) - 2ik (1 + (G*q)(0)) G`, normalized by `u_r(0) = 1`.
pub fn u_delta(k: &SpectralParameter, q: &Potential, tol: f64) -> Result<Eigenfunction> {
    if k.k == ZERO {
        return Err(Error::BranchPoint);
    }
    let g = if q.is_zero() {
        ZERO
    } else {
        conv_jet(k.k, q, 0.0, false, false, tol)?.v
    };
    Ok(Eigenfunction {
        k: *k,
        kind: EigenfunctionKind::DeltaU,
        q1: q.clone(),
        q2: Potential::Zero,
        repr: Repr::Green {
            p: q.clone(),
            alpha: -2.0 * I * k.k * (C64::new(1.0, 0.0) + g),
            beta: ZERO,
        },
        tol,
    })
}

/// Amplitudes of `u_lambda` at `x` (all four integral expressions).
pub fn wave_coefficients(k: &SpectralParameter, q: &Potential, x: f64, tol: f64) -> Result<WaveCoefficients> {
    let kk = k.k;
    if kk == ZERO {
        return Err(Error::BranchPoint);
    }
    let one = C64::new(1.0, 0.0);
    let g = if q.is_zero() {
        ZERO
    } else {
        conv_jet(kk, q, 0.0, false, false, tol)?.v
    };
    let pre = I / (2.0 * kk);
    let below = fourier_moment(kk, q, -1.0, f64::NEG_INFINITY, x, tol)?;
    let above = fourier_moment(kk, q, 1.0, x, f64::INFINITY, tol)?;
    Ok(WaveCoefficients {
        a: one + g - pre * below,
        b: -pre * above,
        c: -pre * below,
        d: one + g - pre * above,
    })
}

/// The compactly supported eigenfunction of an even box at an embedded root
/// `Z (1 - cos k0 rho) = k0^2`.
pub fn embedded_box_eigenfunction(z: f64, rho: f64, k0: f64) -> Result<Eigenfunction> {
    let q = Potential::box_even(z, rho)?;
    if !(k0.is_finite() && k0 != 0.0) {
        return Err(Error::validation("k0", "must be a nonzero finite real"));
    }
    let defect = z * (1.0 - (k0 * rho).cos()) - k0 * k0;
    if defect.abs() > 1e-10 {
        return Err(Error::CriterionViolated(defect));
    }
    Ok(Eigenfunction {
        k: SpectralParameter::from_k(C64::new(k0, 0.0))?,
        kind: EigenfunctionKind::EmbeddedBox,
        q1: q,
        q2: Potential::Zero,
        repr: Repr::Box { z, rho, k0 },
        tol: crate::DEFAULT_TOL,
    })
}

/// Closed form of `u_lambda` for `q = c e^{-mu|x|}`.
pub fn exp_even_eigenfunction(c: C64, mu: f64, k: &SpectralParameter) -> Result<Eigenfunction> {
    let q = Potential::exp_even(c, mu)?;
    let den = mu * mu + k.lambda;
    if den.norm() < 1e-14 * (1.0 + mu * mu) {
        return Err(Error::Pole);
    }
    Ok(Eigenfunction {
        k: *k,
        kind: EigenfunctionKind::ExpEven,
        q1: q,
        q2: Potential::Zero,
        repr: Repr::Exp {
            c,
            mu,
            amp: C64::new(1.0, 0.0) - c / den,
        },
        tol: crate::DEFAULT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{k_from_lambda, BoundarySide};
    use crate::weyl::{weyl_matrix, weyl_scalar};
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn kp(k: C64) -> SpectralParameter {
        SpectralParameter::from_k(k).unwrap()
    }

    fn catalog() -> Vec<Potential> {
        vec![
            Potential::Zero,
            Potential::box_even(0.7, 1.3).unwrap(),
            Potential::box_odd_sign(c(0.4, -0.9), 0.8).unwrap(),
            Potential::exp_even(c(0.5, 0.5), 0.6).unwrap(),
            Potential::exp_even(c(-1.2, 0.0), 1.5).unwrap(),
        ]
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn zero_potential_basis() {
        let k = kp(c(0.3, 0.7));
        let (u, v) = basis_general(&k, &Potential::Zero, &Potential::Zero, 1e-12).unwrap();
        for x in [-2.0, -0.4, 0.3, 1.7] {
            let e = (I * k.k * f64::abs(x)).exp();
            assert!(close(u.value(x).unwrap(), e, 1e-14));
            assert!(close(v.value(x).unwrap(), I / k.k * x.signum() * e, 1e-14));
        }
        let b = v.boundary_data().unwrap();
        assert!(close(b.gamma0[1], c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn general_boundary_table() {
        let k = kp(c(0.3, 0.7));
        let cat = catalog();
        for q1 in &cat {
            for q2 in &cat {
                let (u, v) = basis_general(&k, q1, q2, 1e-12).unwrap();
                let w = weyl_matrix(&k, q1, q2, 1e-12).unwrap().entries;
                let bu = u.boundary_data().unwrap();
                let bv = v.boundary_data().unwrap();
                let want = [
                    (bu.gamma0[0], c(1.0, 0.0)),
                    (bu.gamma0[1], c(0.0, 0.0)),
                    (bv.gamma0[0], c(0.0, 0.0)),
                    (bv.gamma0[1], c(1.0, 0.0)),
                    (bu.gamma1[0], w[0][0]),
                    (bu.gamma1[1], w[1][0]),
                    (bv.gamma1[0], w[0][1]),
                    (bv.gamma1[1], w[1][1]),
                ];
                for (j, (got, exp)) in want.iter().enumerate() {
                    assert!(close(*got, *exp, 1e-9), "{q1:?} {q2:?} entry {j}: {got} vs {exp}");
                }
            }
        }
    }

    #[test]
    fn general_basis_solves_the_ode() {
        let k = kp(c(0.3, 0.7));
        let cat = catalog();
        let (u, v) = basis_general(&k, &cat[1], &cat[3], 1e-12).unwrap();
        for x in [-2.0, -0.5, 0.5, 2.0] {
            assert!(u.ode_residual(x).unwrap().norm() < 1e-6, "u at {x}");
            assert!(v.ode_residual(x).unwrap().norm() < 1e-6, "v at {x}");
        }
    }

    #[test]
    fn delta_u_boundary_data() {
        let k = kp(c(-0.4, 0.9));
        for q in catalog() {
            let u = u_delta(&k, &q, 1e-12).unwrap();
            let b = u.boundary_data().unwrap();
            assert!(close(b.gamma0[0], c(1.0, 0.0), 1e-12));
            let w = weyl_scalar(&k, &q, 1e-12).unwrap().value;
            assert!(close(b.gamma1[0], w, 1e-8), "{q:?}");
        }
        let u = u_delta(&k, &Potential::Zero, 1e-12).unwrap();
        assert!(close(u.value(1.5).unwrap(), (I * k.k * 1.5).exp(), 1e-14));
    }

    #[test]
    fn delta_u_on_real_axis_is_allowed() {
        let u = u_delta(&kp(c(1.0, 0.0)), &catalog()[1], 1e-12).unwrap();
        assert!(close(u.boundary_data().unwrap().gamma0[0], c(1.0, 0.0), 1e-12));
        assert!(matches!(
            u_delta(
                &SpectralParameter {
                    k: ZERO,
                    lambda: ZERO,
                    boundary_side: BoundarySide::None
                },
                &Potential::Zero,
                1e-12
            ),
            Err(Error::BranchPoint)
        ));
    }

    #[test]
    fn continuity_at_origin() {
        let k = kp(c(0.3, 0.7));
        let (u, _) = basis_general(&k, &catalog()[2], &catalog()[3], 1e-12).unwrap();
        let (l, r) = (
            u.value_side(0.0, Side::Left).unwrap(),
            u.value_side(0.0, Side::Right).unwrap(),
        );
        let (nl, nr) = (u.value(-1e-9).unwrap(), u.value(1e-9).unwrap());
        assert!(close(l, nl, 1e-7) && close(r, nr, 1e-7));
        let b = u.boundary_data().unwrap();
        assert!(close(r - l, b.gamma1[1] + u.inner(&catalog()[3]).unwrap(), 1e-12));
    }

    #[test]
    fn wave_coefficients_zero_potential() {
        let k = kp(c(0.8, 0.3));
        for x in [-3.0, 0.0, 2.0] {
            let w = wave_coefficients(&k, &Potential::Zero, x, 1e-12).unwrap();
            assert_eq!((w.a, w.b, w.c, w.d), (c(1.0, 0.0), ZERO, ZERO, c(1.0, 0.0)));
        }
    }

    #[test]
    fn wave_coefficients_reproduce_u() {
        let k = kp(c(0.8, 0.3));
        for q in catalog() {
            let u = u_delta(&k, &q, 1e-12).unwrap();
            for x in [-2.5, -0.3, 0.4, 1.9] {
                let w = wave_coefficients(&k, &q, x, 1e-12).unwrap();
                let got = if x > 0.0 {
                    w.a * (I * k.k * x).exp() + w.b * (-I * k.k * x).exp()
                } else {
                    w.c * (I * k.k * x).exp() + w.d * (-I * k.k * x).exp()
                };
                assert!(close(got, u.value(x).unwrap(), 1e-11), "{q:?} at {x}");
            }
        }
    }

    #[test]
    fn embedded_box_tail_vanishes() {
        let q = Potential::box_even(0.5, std::f64::consts::PI).unwrap();
        let k = kp(c(1.0, 0.0));
        for x in [3.5, 6.0] {
            let w = wave_coefficients(&k, &q, x, 1e-12).unwrap();
            assert!(w.a.norm() < 1e-12 && w.b.norm() < 1e-12);
            let w = wave_coefficients(&k, &q, -x, 1e-12).unwrap();
            assert!(w.d.norm() < 1e-12 && w.c.norm() < 1e-12);
        }
    }

    #[test]
    fn odd_box_tail_amplitudes() {
        let (z, rho) = (0.9, 1.2);
        let q = Potential::box_odd_sign(c(z, 0.0), rho).unwrap();
        for j in 1..=40 {
            let k = 0.1 * j as f64;
            let t = z * (1.0 - (k * rho).cos()) / (k * k);
            let kk = kp(c(k, 0.0));
            let r = wave_coefficients(&kk, &q, rho + 0.5, 1e-12).unwrap();
            let l = wave_coefficients(&kk, &q, -rho - 0.5, 1e-12).unwrap();
            assert!(close(r.a, c(1.0 - t, 0.0), 1e-12));
            assert!(close(l.d, c(1.0 + t, 0.0), 1e-12));
            assert!(r.a.norm().max(l.d.norm()) > 0.5);
        }
    }

    #[test]
    fn embedded_box_closed_form() {
        let pi = std::f64::consts::PI;
        let u = embedded_box_eigenfunction(0.5, pi, 1.0).unwrap();
        for x in [-3.0, -1.0, 0.0, 0.5, 2.9] {
            assert!((u.value(x).unwrap().re - 0.5 * (1.0 + f64::cos(x))).abs() < 1e-14);
        }
        assert_eq!(u.value(3.2).unwrap(), ZERO);
        assert!((u.value(0.0).unwrap().re - 1.0).abs() < 1e-14);
        for x in [-pi, pi] {
            assert!(u.value(x).unwrap().norm() < 1e-14);
            assert!(u.derivative(x).unwrap().norm() < 1e-14);
        }
        // -u'' + u(0) q - u = 0 inside the box
        for x in [-2.0, 0.7] {
            assert!(u.ode_residual(x).unwrap().norm() < 1e-6);
        }
        let b = u.boundary_data().unwrap();
        assert!((b.gamma1[0].re + pi / 2.0).abs() < 1e-9);
        assert!(matches!(
            embedded_box_eigenfunction(0.5, pi, 1.1),
            Err(Error::CriterionViolated(_))
        ));
    }

    #[test]
    fn exp_even_closed_form() {
        let k = kp(c((0.75f64).sqrt(), 0.0));
        let u = exp_even_eigenfunction(c(1.0, 0.0), 0.5, &k).unwrap();
        for x in [-4.0, 0.0, 1.0, 7.0] {
            assert!(close(u.value(x).unwrap(), c((-0.5 * f64::abs(x)).exp(), 0.0), 1e-14));
        }
        let b = u.boundary_data().unwrap();
        assert!(close(b.gamma1[0], c(-3.0, 0.0), 1e-8));

        let k0 = kp(c(0.2, 0.9));
        let u0 = exp_even_eigenfunction(ZERO, 0.5, &k0).unwrap();
        assert!(close(u0.value(1.3).unwrap(), (I * k0.k * 1.3).exp(), 1e-14));

        let lam = k_from_lambda(c(-0.25, 0.0), BoundarySide::None).unwrap();
        assert!(matches!(
            exp_even_eigenfunction(c(1.0, 0.0), 0.5, &lam),
            Err(Error::Pole)
        ));
    }

    #[test]
    fn exp_even_matches_delta_construction() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let k = kp(c(0.4, 0.6));
        let (cc, mu) = (c(0.5, -0.8), 0.7);
        let a = exp_even_eigenfunction(cc, mu, &k).unwrap();
        let b = u_delta(&k, &Potential::exp_even(cc, mu).unwrap(), 1e-12).unwrap();
        for _ in 0..10 {
            let x = rng.gen_range(-5.0..5.0);
            assert!(close(a.value(x).unwrap(), b.value(x).unwrap(), 1e-9));
        }
    }

    #[test]
    fn free_norm() {
        let k = kp(c(1.0, 1.0) / 2f64.sqrt());
        let u = u_delta(&k, &Potential::Zero, 1e-12).unwrap();
        let n = norm_squared(&u, None, 1e-12).unwrap();
        assert!((n - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn norm_identity() {
        let cases = [
            (Potential::exp_even(c(0.0, 0.5), 0.25).unwrap(), c(0.5, 0.5)),
            (Potential::box_odd_sign(c(1.0, 0.0), 1.0).unwrap(), c(-0.3, 0.4)),
            (Potential::box_even(0.7, 1.3).unwrap(), c(1.2, -0.6)),
        ];
        for (q, lam) in cases {
            let k = k_from_lambda(lam, BoundarySide::None).unwrap();
            let u = u_delta(&k, &q, 1e-12).unwrap();
            let n = norm_squared(&u, None, 1e-11).unwrap();
            let w = weyl_scalar(&k, &q, 1e-12).unwrap().value;
            let want = w.im / lam.im;
            assert!((n - want).abs() < 1e-6 * want.abs(), "{q:?}: {n} vs {want}");
        }
    }

    #[test]
    fn norm_requires_decay() {
        let u = u_delta(&kp(c(1.0, 0.0)), &Potential::Zero, 1e-12).unwrap();
        assert!(matches!(norm_squared(&u, None, 1e-10), Err(Error::Precondition(_))));
        let e = embedded_box_eigenfunction(0.5, std::f64::consts::PI, 1.0).unwrap();
        // int 0.25 (1 + cos x)^2 over [-pi, pi] = 3 pi / 4
        let n = norm_squared(&e, None, 1e-12).unwrap();
        assert!((n - 0.75 * std::f64::consts::PI).abs() < 1e-10);
    }
}
