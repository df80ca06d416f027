//! Free Green kernel `G(x) = (i/2k) e^{ik|x|}` and its convolutions.
//!
//! Catalog potentials are sums of exponential pieces, so every integral has a
//! closed form in terms of divided differences of `exp` (see [`crate::expo`]).
//! Those closed forms carry `d/dk` along as a [`Jet`]. For sampled potentials
//! the convolutions are integrated exactly piece by piece (the data is
//! piecewise linear) and the outer integral of a bilinear form is adaptive.
//! The pure quadrature path is public so it can be used as an independent
//! check on both.

use crate::error::Result;
use crate::expo::{exp_dd_jet, Jet};
use crate::model::{Piece, Potential, SampledPotential, SpectralParameter};
use crate::quad::{integrate_any, Integral};
use num_complex::Complex64 as C64;
use serde::Serialize;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionValue {
    pub value: C64,
    pub method: Method,
    pub est_error: f64,
}

impl ConvolutionValue {
    fn closed(value: C64) -> Self {
        ConvolutionValue {
            value,
            method: Method::ClosedForm,
            est_error: 0.0,
        }
    }

    fn quad(r: Integral) -> Self {
        ConvolutionValue {
            value: r.value,
            method: Method::Quadrature,
            est_error: r.est_error,
        }
    }
}

/// `sign` with `sign(0) = 0`.
fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn green_kernel(k: &SpectralParameter, x: f64) -> C64 {
    green(k.k, x)
}

/// `G'(x) = -1/2 sign(x) e^{ik|x|}`, zero at `x = 0`.
pub fn green_kernel_derivative(k: &SpectralParameter, x: f64) -> C64 {
    green_prime(k.k, x)
}

pub(crate) fn green(k: C64, x: f64) -> C64 {
    I / (2.0 * k) * (I * k * x.abs()).exp()
}

pub(crate) fn green_prime(k: C64, x: f64) -> C64 {
    -0.5 * sign0(x) * (I * k * x.abs()).exp()
}

// ---------------------------------------------------------------------------
// Closed forms on exponential pieces

fn ik_jet(k: C64) -> Jet {
    Jet::new(I * k, I)
}

/// `i/(2k)` with its k-derivative.
fn prefactor(k: C64) -> Jet {
    Jet::new(I / (2.0 * k), -I / (2.0 * k * k))
}

/// `int_lo^hi e^{r s + shift} ds`; ends may be infinite (then `Re r` must
/// have the decaying sign).
fn seg(r: Jet, shift: Jet, lo: f64, hi: f64) -> Jet {
    if !(hi > lo) {
        return Jet::ZERO;
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => exp_dd_jet(&[r * lo + shift, r * hi + shift]).scale(C64::new(hi - lo, 0.0)),
        (true, false) => -(r * lo + shift).exp() / r,
        (false, true) => (r * hi + shift).exp() / r,
        (false, false) => unreachable!("pieces are split at the origin"),
    }
}

/// `int_c^d e^{p x} int_c^x e^{q s} ds dx` (inner limit `c` may be `-inf`).
fn tri(p: Jet, q: Jet, c: f64, d: f64) -> Jet {
    if !(d > c) {
        return Jet::ZERO;
    }
    let s = p + q;
    match (c.is_finite(), d.is_finite()) {
        (true, true) => {
            let l = d - c;
            let z0 = s * c;
            exp_dd_jet(&[z0, z0 + p * l, s * d]).scale(C64::new(l * l, 0.0))
        }
        (true, false) => (s * c).exp() / (p * s),
        (false, true) => (s * d).exp() / (q * s),
        (false, false) => unreachable!("pieces are split at the origin"),
    }
}

/// `(G*q)(x)` over pieces, as a jet in `k`.
pub(crate) fn conv_g_jet(k: C64, pieces: &[Piece], x: f64) -> Jet {
    let ik = ik_jet(k);
    let shift = ik * x;
    let sum: Jet = pieces
        .iter()
        .map(|p| {
            let beta = Jet::constant(C64::new(p.rate, 0.0));
            let left = seg(beta - ik, shift, p.lo, p.hi.min(x));
            let right = seg(beta + ik, -shift, p.lo.max(x), p.hi);
            (left + right).scale(p.coef)
        })
        .sum();
    sum * prefactor(k)
}

/// `(G'*q)(x)` over pieces, as a jet in `k`.
pub(crate) fn conv_gp_jet(k: C64, pieces: &[Piece], x: f64) -> Jet {
    let ik = ik_jet(k);
    let shift = ik * x;
    pieces
        .iter()
        .map(|p| {
            let beta = Jet::constant(C64::new(p.rate, 0.0));
            let left = seg(beta - ik, shift, p.lo, p.hi.min(x));
            let right = seg(beta + ik, -shift, p.lo.max(x), p.hi);
            (right - left).scale(0.5 * p.coef)
        })
        .sum()
}

fn split(lo: f64, hi: f64, at: [f64; 2]) -> Vec<(f64, f64)> {
    let mut pts = vec![lo];
    let mut cuts: Vec<f64> = at.iter().copied().filter(|&t| t > lo && t < hi).collect();
    cuts.sort_by(f64::total_cmp);
    pts.extend(cuts);
    pts.push(hi);
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `int_A int_B e^{alpha x + beta s + ik|x - s|} ds dx`.
fn pair_integral(ik: Jet, a: &Piece, b: &Piece) -> Jet {
    let alpha = Jet::constant(C64::new(a.rate, 0.0));
    let beta = Jet::constant(C64::new(b.rate, 0.0));
    let zero = Jet::ZERO;
    let mut total = Jet::ZERO;
    let xs = split(a.lo, a.hi, [b.lo, b.hi]);
    let ss = split(b.lo, b.hi, [a.lo, a.hi]);
    for &(x0, x1) in &xs {
        for &(s0, s1) in &ss {
            let x_in_b = x0 >= b.lo && x1 <= b.hi;
            let s_in_a = s0 >= a.lo && s1 <= a.hi;
            if x_in_b && s_in_a {
                total = total + tri(alpha + ik, beta - ik, x0, x1) + tri(beta + ik, alpha - ik, x0, x1);
            } else if x0 >= s1 {
                total = total + seg(alpha + ik, zero, x0, x1) * seg(beta - ik, zero, s0, s1);
            } else {
                debug_assert!(x1 <= s0);
                total = total + seg(alpha - ik, zero, x0, x1) * seg(beta + ik, zero, s0, s1);
            }
        }
    }
    total
}

/// `(qa, G*qb)` over pieces (first argument conjugated), as a jet in `k`.
pub(crate) fn bilinear_jet(k: C64, pa: &[Piece], pb: &[Piece]) -> Jet {
    let ik = ik_jet(k);
    let mut sum = Jet::ZERO;
    for a in pa {
        for b in pb {
            sum = sum + pair_integral(ik, a, b).scale(a.coef.conj() * b.coef);
        }
    }
    sum * prefactor(k)
}

/// `int_lo^hi e^{sign * iks} q(s) ds` (closed form for catalog kinds).
pub(crate) fn fourier_moment(k: C64, q: &Potential, sign: f64, lo: f64, hi: f64, tol: f64) -> Result<C64> {
    if !(hi > lo) || q.is_zero() {
        return Ok(C64::new(0.0, 0.0));
    }
    if let Some(pieces) = q.pieces() {
        let r = Jet::constant(sign * I * k);
        return Ok(pieces
            .iter()
            .map(|p| {
                let rate = r + C64::new(p.rate, 0.0);
                seg(rate, Jet::ZERO, p.lo.max(lo), p.hi.min(hi)).v * p.coef
            })
            .sum());
    }
    let (slo, shi) = q.support();
    let r = integrate_any(
        |s| (sign * I * k * s).exp() * q.eval(s),
        lo.max(slo),
        hi.min(shi),
        &q.breakpoints(),
        tol,
    )?;
    Ok(r.value)
}

// ---------------------------------------------------------------------------
// Quadrature path

/// Integral kernels available to the quadrature path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    G,
    GPrime,
    /// `dG/dk`.
    DkG,
    /// `dG'/dk`.
    DkGPrime,
}

fn kernel(kind: Kernel, k: C64, x: f64) -> C64 {
    let ax = x.abs();
    let e = (I * k * ax).exp();
    match kind {
        Kernel::G => I / (2.0 * k) * e,
        Kernel::GPrime => -0.5 * sign0(x) * e,
        Kernel::DkG => (-I / (2.0 * k * k) - ax / (2.0 * k)) * e,
        Kernel::DkGPrime => -0.5 * sign0(x) * I * ax * e,
    }
}

fn zero_value() -> ConvolutionValue {
    ConvolutionValue::quad(Integral {
        value: C64::new(0.0, 0.0),
        est_error: 0.0,
    })
}

pub(crate) fn conv_quad(kind: Kernel, k: C64, q: &Potential, x: f64, tol: f64) -> Result<ConvolutionValue> {
    if q.is_zero() {
        return Ok(zero_value());
    }
    let (lo, hi) = q.support();
    let mut breaks = q.breakpoints();
    breaks.push(x);
    let r = integrate_any(|s| kernel(kind, k, x - s) * q.eval(s), lo, hi, &breaks, tol)?;
    Ok(ConvolutionValue::quad(r))
}

/// `int_0^1 t^m e^{zt} dt` for `m = 0, 1, 2`.
fn phi(z: C64) -> [C64; 3] {
    if z.norm() < 0.5 {
        let mut out = [C64::new(0.0, 0.0); 3];
        let mut term = C64::new(1.0, 0.0);
        for j in 0..16 {
            out[0] += term / (j + 1) as f64;
            out[1] += term / (j + 2) as f64;
            out[2] += term / (j + 3) as f64;
            term = term * z / (j + 1) as f64;
        }
        out
    } else {
        let e = z.exp();
        let p0 = (e - 1.0) / z;
        let p1 = (e - p0) / z;
        let p2 = (e - 2.0 * p1) / z;
        [p0, p1, p2]
    }
}

/// Moments `int e^{ik tau} q` and `int tau e^{ik tau} q` of one linear piece,
/// with `tau` the distance from a reference point: `tau` runs over
/// `[d0, d0 + h]` while `q` goes from `qn` to `qf`.
fn piece_moments(k: C64, d0: f64, h: f64, qn: C64, qf: C64) -> (C64, C64) {
    if h == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let dq = qf - qn;
    let f = phi(I * k * h);
    let scale = h * (I * k * d0).exp();
    let base = qn * f[0] + dq * f[1];
    (scale * base, scale * (d0 * base + h * (qn * f[1] + dq * f[2])))
}

/// Running moments of piecewise-linear data for a fixed `k`.
///
/// `left[j]` holds the moments of `q` on `s < nodes[j]` about `nodes[j]`,
/// `right[j]` those of `s > nodes[j]`. Transfer factors `e^{ikh}` have
/// modulus at most one, so the recursions are stable.
struct SampledTable<'a> {
    k: C64,
    data: &'a SampledPotential,
    left: Vec<(C64, C64)>,
    right: Vec<(C64, C64)>,
}

impl<'a> SampledTable<'a> {
    fn new(k: C64, data: &'a SampledPotential) -> Self {
        let (x, v) = (data.nodes(), data.values());
        let n = x.len();
        let zero = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let shift = |(m0, m1): (C64, C64), h: f64| {
            let e = (I * k * h).exp();
            (e * m0, e * (m1 + h * m0))
        };
        let mut left = vec![zero; n];
        for j in 1..n {
            let h = x[j] - x[j - 1];
            let (a, b) = shift(left[j - 1], h);
            let (p0, p1) = piece_moments(k, 0.0, h, v[j], v[j - 1]);
            left[j] = (a + p0, b + p1);
        }
        let mut right = vec![zero; n];
        for j in (0..n - 1).rev() {
            let h = x[j + 1] - x[j];
            let (a, b) = shift(right[j + 1], h);
            let (p0, p1) = piece_moments(k, 0.0, h, v[j], v[j + 1]);
            right[j] = (a + p0, b + p1);
        }
        SampledTable { k, data, left, right }
    }

    /// Left and right moments about an arbitrary `x`.
    fn moments(&self, x: f64) -> ((C64, C64), (C64, C64)) {
        let (nodes, n) = (self.data.nodes(), self.data.nodes().len());
        let k = self.k;
        let zero = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        // Moments about a node `d` away from `x` (d > 0).
        let moved = |(m0, m1): (C64, C64), d: f64| {
            let e = (I * k * d).exp();
            (e * m0, e * (m1 + d * m0))
        };
        let add = |a: (C64, C64), b: (C64, C64)| (a.0 + b.0, a.1 + b.1);
        if x <= nodes[0] {
            return (zero, moved(self.right[0], nodes[0] - x));
        }
        if x >= nodes[n - 1] {
            return (moved(self.left[n - 1], x - nodes[n - 1]), zero);
        }
        let j = nodes.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (nodes[j - 1], nodes[j]);
        let vx = self.data.eval(x);
        let v = self.data.values();
        let l = add(
            moved(self.left[j - 1], x - x0),
            piece_moments(k, 0.0, x - x0, vx, v[j - 1]),
        );
        let r = add(moved(self.right[j], x1 - x), piece_moments(k, 0.0, x1 - x, vx, v[j]));
        (l, r)
    }

    fn conv(&self, kind: Kernel, x: f64) -> C64 {
        let k = self.k;
        let ((l0, l1), (r0, r1)) = self.moments(x);
        match kind {
            Kernel::G => I / (2.0 * k) * (l0 + r0),
            Kernel::GPrime => -0.5 * (l0 - r0),
            Kernel::DkG => -I / (2.0 * k * k) * (l0 + r0) - (l1 + r1) / (2.0 * k),
            Kernel::DkGPrime => -0.5 * I * (l1 - r1),
        }
    }
}

/// Exact `(K*q)(x)` for piecewise-linear `q`.
fn conv_sampled(kind: Kernel, k: C64, sp: &SampledPotential, x: f64) -> C64 {
    SampledTable::new(k, sp).conv(kind, x)
}

/// Convolution used by the evaluation path: always exact, quadrature only
/// as a fallback.
fn conv_eval(kind: Kernel, k: C64, q: &Potential, x: f64, tol: f64) -> Result<ConvolutionValue> {
    if let Potential::Sampled(sp) = q {
        return Ok(ConvolutionValue::closed(conv_sampled(kind, k, sp, x)));
    }
    let Some(p) = q.pieces() else {
        return conv_quad(kind, k, q, x, tol);
    };
    let v = match kind {
        Kernel::G => conv_g_jet(k, &p, x).v,
        Kernel::GPrime => conv_gp_jet(k, &p, x).v,
        Kernel::DkG => conv_g_jet(k, &p, x).d,
        Kernel::DkGPrime => conv_gp_jet(k, &p, x).d,
    };
    Ok(ConvolutionValue::closed(v))
}

/// `(G*q)(x)` by adaptive quadrature (any potential kind).
pub fn conv_g_q_quadrature(k: C64, q: &Potential, x: f64, tol: f64) -> Result<ConvolutionValue> {
    conv_quad(Kernel::G, k, q, x, tol)
}

/// `(G'*q)(x)` by adaptive quadrature (any potential kind).
pub fn conv_gprime_q_quadrature(k: C64, q: &Potential, x: f64, tol: f64) -> Result<ConvolutionValue> {
    conv_quad(Kernel::GPrime, k, q, x, tol)
}

fn l1_norm(q: &Potential) -> Result<f64> {
    let (lo, hi) = q.support();
    let r = integrate_any(|s| C64::new(q.eval(s).norm(), 0.0), lo, hi, &q.breakpoints(), 1e-6)?;
    Ok(r.value.re)
}

pub(crate) fn bilinear_quad(
    kind: Kernel,
    k: C64,
    qa: &Potential,
    qb: &Potential,
    tol: f64,
    exact_inner: bool,
) -> Result<ConvolutionValue> {
    if qa.is_zero() || qb.is_zero() {
        return Ok(zero_value());
    }
    let mass = l1_norm(qa)?.max(1e-300);
    let inner_tol = 0.5 * tol / mass;
    let mut breaks = qa.breakpoints();
    breaks.extend(qb.breakpoints());
    let (lo, hi) = qa.support();
    let table = match qb {
        Potential::Sampled(data) if exact_inner => Some(SampledTable::new(k, data)),
        _ => None,
    };
    let mut inner_err = 0.0f64;
    let mut failure = None;
    let r = integrate_any(
        |x| {
            let qx = qa.eval(x);
            if qx == C64::new(0.0, 0.0) {
                return qx;
            }
            let inner = match &table {
                Some(t) => Ok(ConvolutionValue::closed(t.conv(kind, x))),
                None if exact_inner => conv_eval(kind, k, qb, x, inner_tol),
                None => conv_quad(kind, k, qb, x, inner_tol),
            };
            match inner {
                Ok(c) => {
                    inner_err = inner_err.max(c.est_error);
                    qx.conj() * c.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        },
        lo,
        hi,
        &breaks,
        0.5 * tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ConvolutionValue::quad(Integral {
        value: r.value,
        est_error: r.est_error + inner_err * mass,
    }))
}

/// `(qa, G*qb)` by nested adaptive quadrature (any potential kinds).
pub fn bilinear_quadrature(k: C64, qa: &Potential, qb: &Potential, tol: f64) -> Result<ConvolutionValue> {
    bilinear_quad(Kernel::G, k, qa, qb, tol, false)
}

/// `(G*q)(x)` or `(G'*q)(x)` as a jet in `k`: closed form for catalog kinds,
/// otherwise quadrature of the kernel and of its k-derivative.
pub(crate) fn conv_jet(k: C64, q: &Potential, x: f64, prime: bool, want_d: bool, tol: f64) -> Result<Jet> {
    if let Some(p) = q.pieces() {
        return Ok(if prime {
            conv_gp_jet(k, &p, x)
        } else {
            conv_g_jet(k, &p, x)
        });
    }
    let (kv, kd) = if prime {
        (Kernel::GPrime, Kernel::DkGPrime)
    } else {
        (Kernel::G, Kernel::DkG)
    };
    let v = conv_eval(kv, k, q, x, tol)?.value;
    let d = if want_d {
        conv_eval(kd, k, q, x, tol)?.value
    } else {
        C64::new(f64::NAN, f64::NAN)
    };
    Ok(Jet::new(v, d))
}

/// `(qa, G*qb)` as a jet in `k`.
pub(crate) fn bil_jet(k: C64, qa: &Potential, qb: &Potential, want_d: bool, tol: f64) -> Result<Jet> {
    if let (Some(pa), Some(pb)) = (qa.pieces(), qb.pieces()) {
        return Ok(bilinear_jet(k, &pa, &pb));
    }
    let v = bilinear_quad(Kernel::G, k, qa, qb, tol, true)?.value;
    let d = if want_d {
        bilinear_quad(Kernel::DkG, k, qa, qb, tol, true)?.value
    } else {
        C64::new(f64::NAN, f64::NAN)
    };
    Ok(Jet::new(v, d))
}

// ---------------------------------------------------------------------------
// Public entry points

/// `(G*q)(x)` in closed form.
pub fn conv_g_q(k: &SpectralParameter, q: &Potential, x: f64, tol: f64) -> Result<ConvolutionValue> {
    match q.pieces() {
        Some(p) => Ok(ConvolutionValue::closed(conv_g_jet(k.k, &p, x).v)),
        None => conv_eval(Kernel::G, k.k, q, x, tol),
    }
}

/// `(G'*q)(x)` in closed form.
pub fn conv_gprime_q(k: &SpectralParameter, q: &Potential, x: f64, tol: f64) -> Result<ConvolutionValue> {
    match q.pieces() {
        Some(p) => Ok(ConvolutionValue::closed(conv_gp_jet(k.k, &p, x).v)),
        None => conv_eval(Kernel::GPrime, k.k, q, x, tol),
    }
}

/// `(qa, G*qb) = int int qa*(x) G(x - s) qb(s) ds dx`; adaptive in `x` when
/// either side is sampled.
pub fn bilinear(k: &SpectralParameter, qa: &Potential, qb: &Potential, tol: f64) -> Result<ConvolutionValue> {
    match (qa.pieces(), qb.pieces()) {
        (Some(pa), Some(pb)) => Ok(ConvolutionValue::closed(bilinear_jet(k.k, &pa, &pb).v)),
        _ => bilinear_quad(Kernel::G, k.k, qa, qb, tol, true),
    }
}
