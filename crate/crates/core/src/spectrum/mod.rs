//! Eigenvalues, multiplicities, exceptional points, spectral singularities and
//! embedded eigenvalues.
//!
//! Interior searches run in the k-plane (`lambda = k^2`, `Im k > 0`), where the
//! characteristic functions are holomorphic on a plain rectangle.

pub mod contour;
mod phase;

pub use phase::{phase_diagram, phase_point, singular_coupling, PhaseGrid, PhaseLabel, PhasePoint};

use crate::error::{Error, Result};
use crate::expo::Jet;
use crate::model::{k_from_lambda, BoundarySide, CouplingMatrix, DeltaModel, Model, Potential, SpectralParameter};
use crate::quad::integrate;
use crate::weyl::{matrix_jet, scalar_jet, weyl_boundary_scalar};
use contour::{find_zeros, winding, Rect};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

/// A located eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub lambda: C64,
    pub k: C64,
    pub geometric_mult: usize,
    pub algebraic_mult: usize,
    /// `|char(k)|` at the polished root.
    pub residual: f64,
}

/// Rectangle in the k upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchRegion {
    pub k_re_min: f64,
    pub k_re_max: f64,
    pub k_im_min: f64,
    pub k_im_max: f64,
    pub margin: f64,
}

impl Default for SearchRegion {
    fn default() -> Self {
        SearchRegion {
            k_re_min: -10.0,
            k_re_max: 10.0,
            k_im_min: 1e-6,
            k_im_max: 10.0,
            margin: 1e-6,
        }
    }
}

impl SearchRegion {
    pub fn new(k_re_min: f64, k_re_max: f64, k_im_min: f64, k_im_max: f64) -> Result<Self> {
        let r = SearchRegion {
            k_re_min,
            k_re_max,
            k_im_min,
            k_im_max,
            margin: k_im_min.min(1e-6),
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.k_re_min, self.k_re_max, self.k_im_min, self.k_im_max, self.margin];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("region", "bounds must be finite"));
        }
        if !(self.k_re_min < self.k_re_max && self.k_im_min < self.k_im_max) {
            return Err(Error::validation("region", "empty rectangle"));
        }
        if !(self.margin > 0.0 && self.k_im_min >= self.margin) {
            return Err(Error::validation("region", "need k_im_min >= margin > 0"));
        }
        Ok(())
    }

    pub(crate) fn rect(&self) -> Rect {
        Rect {
            re0: self.k_re_min,
            re1: self.k_re_max,
            im0: self.k_im_min,
            im1: self.k_im_max,
        }
    }

    /// `j`-th point of a 2D Halton sequence mapped into the rectangle.
    fn halton(&self, j: usize) -> C64 {
        let h = |mut i: usize, b: usize| {
            let (mut f, mut r) = (1.0, 0.0);
            while i > 0 {
                f /= b as f64;
                r += f * (i % b) as f64;
                i /= b;
            }
            r
        };
        C64::new(
            self.k_re_min + h(j + 1, 2) * (self.k_re_max - self.k_re_min),
            self.k_im_min + h(j + 1, 3) * (self.k_im_max - self.k_im_min),
        )
    }
}

// ---------------------------------------------------------------------------
// Characteristic functions

/// `a - W(k)` (delta case) or `det(T - W(k))` (general case) with `d/dk`.
pub(crate) fn char_jet(model: &Model, k: C64, want_d: bool, tol: f64) -> Result<Jet> {
    match model {
        Model::Delta(m) => Ok(-scalar_jet(k, &m.q, want_d, tol)? + m.a),
        Model::General(g) => {
            let w = matrix_jet(k, &g.q1, &g.q2, want_d, tol)?;
            let t = g.t.entries();
            let m = |i: usize, j: usize| -w[i][j] + t[i][j];
            Ok(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0))
        }
    }
}

pub fn char_value(model: &Model, k: &SpectralParameter, tol: f64) -> Result<C64> {
    if !(k.k.im > 0.0) {
        return Err(Error::Precondition("char_value needs Im k > 0".into()));
    }
    Ok(char_jet(model, k.k, false, tol)?.v)
}

/// Roots of the free-case polynomial `2d k^2 + ik(det T - 4) + 2a = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalRoots {
    /// Eigenvalues `lambda = k^2` for roots with `Im k > 0`, sorted.
    Roots(Vec<C64>),
    /// All coefficients vanish: every `lambda` off `[0, inf)` is an eigenvalue.
    WholeDomain,
}

pub fn local_char_roots(t: &CouplingMatrix) -> LocalRoots {
    let a2 = 2.0 * t.d;
    let b1 = I * (t.det() - 4.0);
    let c0 = 2.0 * t.a;
    let scale = 1.0 + t.norm() * t.norm();
    let tiny = 1e-14 * scale;
    let mut ks = Vec::new();
    if a2.norm() < tiny {
        if b1.norm() < tiny {
            if c0.norm() < tiny {
                return LocalRoots::WholeDomain;
            }
        } else {
            ks.push(-c0 / b1);
        }
    } else {
        let disc = (b1 * b1 - 4.0 * a2 * c0).sqrt();
        // Stable pair: q = -(b + sign * sqrt(disc)) / 2.
        let qq = if (b1.conj() * disc).re >= 0.0 {
            -0.5 * (b1 + disc)
        } else {
            -0.5 * (b1 - disc)
        };
        if qq.norm() > 0.0 {
            ks.push(qq / a2);
            ks.push(c0 / qq);
        } else {
            ks.push(C64::new(0.0, 0.0));
            ks.push(C64::new(0.0, 0.0));
        }
    }
    let mut lams: Vec<C64> = ks
        .into_iter()
        .filter(|k| k.im > 1e-14 * (1.0 + k.norm()))
        .map(|k| k * k)
        .collect();
    sort_complex(&mut lams);
    LocalRoots::Roots(lams)
}

fn sort_complex(v: &mut [C64]) {
    v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

fn check_not_degenerate(f: &dyn Fn(C64) -> Result<C64>, region: &SearchRegion, threshold: f64) -> Result<()> {
    for j in 0..25 {
        if f(region.halton(j))?.norm() >= threshold {
            return Ok(());
        }
    }
    Err(Error::DegenerateFamily)
}

// ---------------------------------------------------------------------------
// Eigenvalues

fn geometric_multiplicity(model: &Model, k: C64, tol: f64) -> Result<usize> {
    let g = model.to_general();
    let w = matrix_jet(k, &g.q1, &g.q2, false, tol)?;
    let t = g.t.entries();
    let m = [
        [t[0][0] - w[0][0].v, t[0][1] - w[0][1].v],
        [t[1][0] - w[1][0].v, t[1][1] - w[1][1].v],
    ];
    let (s1, s2) = singular_values_2x2(&m);
    let thr = 1e-8 * (s1 * s1 + s2 * s2).sqrt();
    let rank = [s1, s2].iter().filter(|&&s| s > thr).count();
    Ok(2 - rank)
}

/// Singular values (largest first) of a 2x2 complex matrix.
pub(crate) fn singular_values_2x2(m: &[[C64; 2]; 2]) -> (f64, f64) {
    let fro2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    // s1^2 + s2^2 = fro2, s1 s2 = |det|.
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = (0.5 * (fro2 + disc)).sqrt();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    (s1, s2)
}

/// Index `(1/2 pi i) tr oint W'(W - T)^{-1} d xi` on a circle in the lambda-plane.
pub fn algebraic_multiplicity(model: &Model, lambda0: C64, radius: f64, tol: f64) -> Result<usize> {
    let value = multiplicity_index(model, lambda0, radius, tol)?;
    let n = value.round();
    if (value - n).abs() > 0.05 || n < 1.0 {
        return Err(Error::NonIntegerIndex { value });
    }
    Ok(n as usize)
}

/// Converged (real part of the) multiplicity index before rounding.
pub fn multiplicity_index(model: &Model, lambda0: C64, radius: f64, tol: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    let g = model.to_general();
    let t = g.t.entries();
    let integrand = |xi: C64| -> Result<C64> {
        let p = k_from_lambda(xi, BoundarySide::None)?;
        let w = matrix_jet(p.k, &g.q1, &g.q2, true, tol)?;
        let s = 1.0 / (2.0 * p.k);
        let a = [
            [w[0][0].v - t[0][0], w[0][1].v - t[0][1]],
            [w[1][0].v - t[1][0], w[1][1].v - t[1][1]],
        ];
        let wp = [[w[0][0].d * s, w[0][1].d * s], [w[1][0].d * s, w[1][1].d * s]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
        Ok(wp[0][0] * inv[0][0] + wp[0][1] * inv[1][0] + wp[1][0] * inv[0][1] + wp[1][1] * inv[1][1])
    };
    let trapezoid = |n: usize| -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..n {
            let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            s += integrand(lambda0 + radius * e)? * e;
        }
        Ok(s * radius / n as f64)
    };
    let mut n = 256;
    let mut prev = trapezoid(n)?;
    while n < 1 << 16 {
        n *= 2;
        let next = trapezoid(n)?;
        if (next - prev).norm() < 0.01 {
            return Ok(next.re);
        }
        prev = next;
    }
    Err(Error::NoConvergence("multiplicity index quadrature".into()))
}

/// Index-contour radius: well inside the cut distance and other zeros.
fn index_radius(lambda0: C64, others: impl Iterator<Item = C64>) -> f64 {
    let cut = if lambda0.re >= 0.0 {
        lambda0.im.abs()
    } else {
        lambda0.norm()
    };
    let mut r = (0.5 * cut).min(0.05 * lambda0.norm()).min(0.05);
    for o in others {
        let d = (o - lambda0).norm();
        if d > 0.0 {
            r = r.min(0.4 * d);
        }
    }
    r
}

pub fn find_eigenvalues(model: &Model, region: &SearchRegion, tol: f64) -> Result<Vec<Eigenvalue>> {
    region.validate()?;
    let thr = 1e-12 * (1.0 + model.coupling_norm());
    check_not_degenerate(&|k| Ok(char_jet(model, k, false, tol)?.v), region, thr)?;
    let f = |k: C64, d: bool| char_jet(model, k, d, tol);
    let zeros = find_zeros(&f, &region.rect())?;

    // Merge near-coincident lambdas.
    let mut merged: Vec<(C64, C64, usize, f64)> = Vec::new();
    for z in zeros {
        let lam = z.k * z.k;
        if let Some(m) = merged.iter_mut().find(|m| (m.0 - lam).norm() < 1e-8) {
            m.2 += z.mult;
            m.3 = m.3.max(z.residual);
        } else {
            merged.push((lam, z.k, z.mult, z.residual));
        }
    }
    let lambdas: Vec<C64> = merged.iter().map(|m| m.0).collect();
    let mut out = Vec::with_capacity(merged.len());
    for (lambda, k, _mult, residual) in merged {
        let geometric_mult = geometric_multiplicity(model, k, tol)?.max(1);
        let r = index_radius(lambda, lambdas.iter().copied());
        let algebraic_mult = algebraic_multiplicity(model, lambda, r, tol)?;
        out.push(Eigenvalue {
            lambda,
            k,
            geometric_mult,
            algebraic_mult: algebraic_mult.max(geometric_mult),
            residual,
        });
    }
    out.sort_by(|x, y| {
        x.lambda
            .re
            .total_cmp(&y.lambda.re)
            .then(x.lambda.im.total_cmp(&y.lambda.im))
    });
    Ok(out)
}

/// Number of zeros of the characteristic function inside the region boundary.
pub fn winding_count(model: &Model, region: &SearchRegion, tol: f64) -> Result<usize> {
    let f = |k: C64, d: bool| char_jet(model, k, d, tol);
    winding(&f, &region.rect())
}

// ---------------------------------------------------------------------------
// Exceptional points

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalPoint {
    pub lambda: C64,
    pub k: C64,
    /// The coupling `a = W(lambda0)` for which `lambda0` is exceptional.
    pub a: C64,
}

/// `dW/dk` with a central-difference derivative for Newton steps.
fn weyl_dk(q: &Potential, k: C64, want_d: bool, tol: f64) -> Result<Jet> {
    let v = scalar_jet(k, q, true, tol)?.d;
    if !want_d {
        return Ok(Jet::new(v, C64::new(0.0, 0.0)));
    }
    let h = 1e-6 * (1.0 + k.norm());
    let p = scalar_jet(k + h, q, true, tol)?.d;
    let m = scalar_jet(k - h, q, true, tol)?.d;
    Ok(Jet::new(v, (p - m) / (2.0 * h)))
}

/// Zeros of `lambda -> dW/dlambda` (non-real `lambda` only), paired with `a = W`.
pub fn find_exceptional_points(q: &Potential, region: &SearchRegion, tol: f64) -> Result<Vec<ExceptionalPoint>> {
    region.validate()?;
    check_not_degenerate(&|k| Ok(weyl_dk(q, k, false, tol)?.v), region, 1e-12)?;
    let f = |k: C64, d: bool| weyl_dk(q, k, d, tol);
    let zeros = find_zeros(&f, &region.rect())?;
    let mut out = Vec::new();
    for z in zeros {
        let lambda = z.k * z.k;
        if lambda.im.abs() <= 1e-10 * (1.0 + lambda.norm()) {
            continue;
        }
        let a = scalar_jet(z.k, q, false, tol)?.v;
        out.push(ExceptionalPoint { lambda, k: z.k, a });
    }
    out.sort_by(|x, y| {
        x.lambda
            .re
            .total_cmp(&y.lambda.re)
            .then(x.lambda.im.total_cmp(&y.lambda.im))
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Continuous spectrum

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularityRecord {
    pub lambda: f64,
    pub k: f64,
    pub a_plus: C64,
    pub is_singular: bool,
}

/// For each grid `k > 0`: `a_plus = W^+(k)`; singular when `a_plus` is non-real.
pub fn singularity_scan(q: &Potential, k_grid: &[f64], tol: f64) -> Result<Vec<SingularityRecord>> {
    k_grid
        .iter()
        .map(|&k| {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Precondition(format!("grid point k = {k} must be positive")));
            }
            let a_plus = weyl_boundary_scalar(k, q, tol)?.value;
            Ok(SingularityRecord {
                lambda: k * k,
                k,
                a_plus,
                is_singular: a_plus.im.abs() > tol * (1.0 + a_plus.norm()),
            })
        })
        .collect()
}

/// `|Im W(lambda)| / |a - W(lambda)|`; `+inf` when the denominator vanishes.
pub fn blowup_ratio(model: &DeltaModel, lambda: C64, tol: f64) -> Result<f64> {
    if lambda.im == 0.0 {
        return Err(Error::Precondition("blowup_ratio needs Im lambda != 0".into()));
    }
    let k = k_from_lambda(lambda, BoundarySide::None)?;
    let w = scalar_jet(k.k, &model.q, false, tol)?.v;
    let den = (model.a - w).norm();
    if den < 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(w.im.abs() / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddedEigenvalue {
    pub lambda: f64,
    pub k: f64,
    /// Real coupling `a = W^+(k)` realizing the eigenvalue.
    pub a: f64,
}

/// `beta_k = 1 - (1/k) int_0^R sin(ks) q(s) ds` for an even potential.
pub fn beta(q: &Potential, k: f64, tol: f64) -> Result<f64> {
    match q {
        Potential::BoxEven { z, rho } => {
            let s = (0.5 * k * rho).sin();
            Ok(1.0 - z * 2.0 * s * s / (k * k))
        }
        Potential::Sampled(s) => {
            let hi = s.nodes()[s.nodes().len() - 1];
            let r = integrate(
                |x| C64::new((k * x).sin() / k * s.eval(x).re, 0.0),
                0.0,
                hi,
                s.nodes(),
                tol,
            )?;
            Ok(1.0 - r.value.re)
        }
        _ => Err(Error::Precondition(
            "beta_k needs box_even or an even sampled potential".into(),
        )),
    }
}

fn check_even_real_sampled(q: &Potential) -> Result<()> {
    if let Potential::Sampled(s) = q {
        let n = s.nodes();
        let v = s.values();
        for j in 0..n.len() {
            let m = n.len() - 1 - j;
            let scale = 1e-12 * (1.0 + n[j].abs());
            if (n[j] + n[m]).abs() > scale {
                return Err(Error::ParityUndecidable("node grid is not symmetric about 0".into()));
            }
            if (v[j] - v[m]).norm() > 1e-12 * (1.0 + v[j].norm()) {
                return Err(Error::Precondition("sampled potential is not even".into()));
            }
            if v[j].im.abs() > 1e-12 * (1.0 + v[j].norm()) {
                return Err(Error::Precondition(
                    "embedded search needs a real-valued potential".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Real roots of `beta_k` in `[k_min, k_max]` with the couplings realizing them.
pub fn embedded_eigenvalues(q: &Potential, k_interval: (f64, f64), tol: f64) -> Result<Vec<EmbeddedEigenvalue>> {
    match q {
        Potential::BoxEven { .. } => {}
        Potential::Sampled(_) => check_even_real_sampled(q)?,
        _ => {
            return Err(Error::Precondition(
                "embedded eigenvalues need box_even or an even sampled potential".into(),
            ))
        }
    }
    let (k_min, k_max) = (k_interval.0.max(1e-6), k_interval.1);
    if !(k_max > k_min) {
        return Err(Error::validation("k_interval", "need 0 < k_min < k_max"));
    }
    let radius = q.support_radius().unwrap_or(1.0).max(1e-3);
    let n = ((k_max - k_min) * radius * 100.0).ceil().max(2000.0) as usize;
    let f = |k: f64| beta(q, k, 0.01 * tol);
    let mut roots = Vec::new();
    let mut k0 = k_min;
    let mut f0 = f(k0)?;
    for j in 1..=n {
        let k1 = k_min + (k_max - k_min) * j as f64 / n as f64;
        let f1 = f(k1)?;
        if f0 == 0.0 {
            roots.push(k0);
        } else if f0 * f1 < 0.0 {
            roots.push(bisect_secant(&f, k0, f0, k1, f1)?);
        }
        k0 = k1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(k0);
    }
    let mut out = Vec::with_capacity(roots.len());
    for k in roots {
        let a = weyl_boundary_scalar(k, q, tol)?.value;
        if a.im.abs() > tol {
            return Err(Error::NonRealCoupling {
                k,
                a_re: a.re,
                a_im: a.im,
            });
        }
        out.push(EmbeddedEigenvalue {
            lambda: k * k,
            k,
            a: a.re,
        });
    }
    Ok(out)
}

fn bisect_secant(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<f64> {
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // Secant polish inside the final bracket.
    let s = b - fb * (b - a) / (fb - fa);
    Ok(if s.is_finite() && s >= a && s <= b {
        s
    } else {
        0.5 * (a + b)
    })
}

/// Positive eigenvalue `lambda = c - mu^2` of `c e^{-mu|x|}` (real `c > mu^2`)
/// and the real coupling `a = W^+` realizing it.
pub fn exp_even_embedded(c: C64, mu: f64, tol: f64) -> Result<Option<EmbeddedEigenvalue>> {
    if c.im != 0.0 {
        return Err(Error::Precondition(
            "the positive-eigenvalue branch needs real c".into(),
        ));
    }
    let lambda = c.re - mu * mu;
    if !(lambda > 0.0) {
        return Ok(None);
    }
    let k = lambda.sqrt();
    let q = Potential::exp_even(c, mu)?;
    let a = weyl_boundary_scalar(k, &q, tol)?.value;
    if a.im.abs() > tol * (1.0 + a.norm()) {
        return Err(Error::NonRealCoupling {
            k,
            a_re: a.re,
            a_im: a.im,
        });
    }
    Ok(Some(EmbeddedEigenvalue { lambda, k, a: a.re }))
}

#[cfg(test)]
mod tests;
