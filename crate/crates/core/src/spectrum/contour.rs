//! Argument-principle zero search on rectangles of the k-plane.

use crate::error::{Error, Result};
use crate::expo::Jet;
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_4, PI};

/// Axis-aligned rectangle `[re0, re1] x [im0, im1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }

    /// Counter-clockwise corners.
    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re0, self.im0),
            C64::new(self.re1, self.im0),
            C64::new(self.re1, self.im1),
            C64::new(self.re0, self.im1),
        ]
    }
}

/// A located zero; `mult` is the winding count of its isolating rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub k: C64,
    pub mult: usize,
    pub residual: f64,
}

/// A holomorphic function of `k` with its derivative.
pub trait Holo {
    fn eval(&self, k: C64, want_d: bool) -> Result<Jet>;
}

impl<F: Fn(C64, bool) -> Result<Jet>> Holo for F {
    fn eval(&self, k: C64, want_d: bool) -> Result<Jet> {
        self(k, want_d)
    }
}

const INITIAL_SEGMENTS: usize = 16;
const CLUSTER_DIAMETER: f64 = 1e-6;
const NEWTON_STEP_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;
const MAX_RETRIES: usize = 5;

fn value<F: Holo>(f: &F, z: C64) -> Result<Jet> {
    let j = f.eval(z, true)?;
    let v = j.v;
    if !(v.re.is_finite() && v.im.is_finite()) || v == C64::new(0.0, 0.0) {
        return Err(Error::ContourThroughZero { retries: 0 });
    }
    Ok(j)
}

/// Bound on the phase turned over a step `dz` from the logarithmic derivative.
/// A zero or pole close to the contour makes `|f'/f|` large, which forces
/// refinement before samples can alias by a full turn.
fn phase_rate(j: &Jet) -> f64 {
    let r = (j.d / j.v).norm();
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// Phase change of `f` from `z0` to `z1`, halving until increments are small.
fn segment_phase<F: Holo>(f: &F, z0: C64, f0: &Jet, z1: C64, f1: &Jet, depth: u32) -> Result<f64> {
    let zm = 0.5 * (z0 + z1);
    let fm = value(f, zm)?;
    let d1 = (fm.v / f0.v).arg();
    let d2 = (f1.v / fm.v).arg();
    let d = (f1.v / f0.v).arg();
    let consistent = (d1 + d2 - d).abs() < 1e-9;
    let half = 0.5 * (z1 - z0).norm();
    let rate = phase_rate(f0).max(phase_rate(&fm)).max(phase_rate(f1));
    if d1.abs() <= FRAC_PI_4 && d2.abs() <= FRAC_PI_4 && consistent && rate * half <= FRAC_PI_4 {
        return Ok(d1 + d2);
    }
    if depth > 60 || (z1 - z0).norm() < 1e-14 * (1.0 + z0.norm()) {
        return Err(Error::ContourThroughZero { retries: 0 });
    }
    Ok(segment_phase(f, z0, f0, zm, &fm, depth + 1)? + segment_phase(f, zm, &fm, z1, f1, depth + 1)?)
}

fn edge_phase<F: Holo>(f: &F, a: C64, b: C64) -> Result<f64> {
    let mut total = 0.0;
    let mut z0 = a;
    let mut f0 = value(f, a)?;
    for j in 1..=INITIAL_SEGMENTS {
        let z1 = a + (b - a) * (j as f64 / INITIAL_SEGMENTS as f64);
        let f1 = value(f, z1)?;
        total += segment_phase(f, z0, &f0, z1, &f1, 0)?;
        z0 = z1;
        f0 = f1;
    }
    Ok(total)
}

/// Number of zeros of `f` inside `r` (argument principle).
pub fn winding<F: Holo>(f: &F, r: &Rect) -> Result<usize> {
    let c = r.corners();
    let mut total = 0.0;
    for j in 0..4 {
        total += edge_phase(f, c[j], c[(j + 1) % 4])?;
    }
    let n = total / (2.0 * PI);
    let rounded = n.round();
    if (n - rounded).abs() > 1e-3 || rounded < 0.0 {
        return Err(Error::ContourThroughZero { retries: 0 });
    }
    Ok(rounded as usize)
}

/// Modified Newton `k <- k - m f/f'`, returning the best iterate.
pub fn newton<F: Holo>(f: &F, start: C64, m: usize, max_step: f64) -> Result<(C64, f64, bool)> {
    let mut k = start;
    let mut best = (k, f.eval(k, false)?.v.norm());
    for _ in 0..NEWTON_MAX_ITER {
        let j = f.eval(k, true)?;
        let r = j.v.norm();
        if r < best.1 {
            best = (k, r);
        }
        if j.v == C64::new(0.0, 0.0) {
            return Ok((k, 0.0, true));
        }
        if j.d == C64::new(0.0, 0.0) || !(j.d.re.is_finite() && j.d.im.is_finite()) {
            return Ok((best.0, best.1, false));
        }
        let mut step = m as f64 * j.v / j.d;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        k -= step;
        if step.norm() < NEWTON_STEP_TOL {
            let r = f.eval(k, false)?.v.norm();
            return Ok(if r <= best.1 {
                (k, r, true)
            } else {
                (best.0, best.1, true)
            });
        }
    }
    Ok((best.0, best.1, false))
}

fn split(r: &Rect, attempt: usize) -> (Rect, Rect) {
    // Shift the cut away from the midpoint on retries.
    let shift = if attempt == 0 {
        0.0
    } else {
        1e-3 * attempt as f64 * if attempt % 2 == 0 { 1.0 } else { -1.0 }
    };
    let t = 0.5 + shift;
    if r.width() >= r.height() {
        let m = r.re0 + t * r.width();
        (Rect { re1: m, ..*r }, Rect { re0: m, ..*r })
    } else {
        let m = r.im0 + t * r.height();
        (Rect { im1: m, ..*r }, Rect { im0: m, ..*r })
    }
}

fn isolate<F: Holo>(f: &F, r: Rect, count: usize, out: &mut Vec<Zero>) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let scale = 1.0 + r.center().norm();
    if count == 1 {
        let (k, res, ok) = newton(f, r.center(), 1, r.diameter())?;
        if ok && r.contains(k, 1e-9 * scale) {
            out.push(Zero {
                k,
                mult: 1,
                residual: res,
            });
            return Ok(());
        }
        if r.diameter() < 1e-12 * scale {
            let res = f.eval(r.center(), false)?.v.norm();
            out.push(Zero {
                k: r.center(),
                mult: 1,
                residual: res,
            });
            return Ok(());
        }
    } else if r.diameter() < CLUSTER_DIAMETER * scale {
        let (k, res, _) = newton(f, r.center(), count, r.diameter())?;
        let k = if r.contains(k, r.diameter()) { k } else { r.center() };
        let res = res.min(f.eval(k, false)?.v.norm());
        out.push(Zero {
            k,
            mult: count,
            residual: res,
        });
        return Ok(());
    }
    for attempt in 0..=MAX_RETRIES {
        let (a, b) = split(&r, attempt);
        let counts = winding(f, &a).and_then(|ca| Ok((ca, winding(f, &b)?)));
        match counts {
            Ok((ca, cb)) if ca + cb == count => {
                isolate(f, a, ca, out)?;
                return isolate(f, b, cb, out);
            }
            Ok(_) | Err(Error::ContourThroughZero { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ContourThroughZero { retries: MAX_RETRIES })
}

/// All zeros of `f` inside `region`, with cluster multiplicities.
///
/// If the region boundary itself passes through a zero, it is enlarged by
/// `1e-3` (relative) per retry, keeping the bottom edge at or above its
/// original height.
pub fn find_zeros<F: Holo>(f: &F, region: &Rect) -> Result<Vec<Zero>> {
    let mut r = *region;
    for attempt in 0..=MAX_RETRIES {
        match winding(f, &r) {
            Ok(n) => {
                let mut out = Vec::new();
                isolate(f, r, n, &mut out)?;
                out.sort_by(|x, y| x.k.re.total_cmp(&y.k.re).then(x.k.im.total_cmp(&y.k.im)));
                return Ok(out);
            }
            Err(Error::ContourThroughZero { .. }) => {
                let d = 1e-3 * (attempt + 1) as f64;
                r = Rect {
                    re0: region.re0 - d * region.width(),
                    re1: region.re1 + d * region.width(),
                    im0: region.im0 + d * region.im0,
                    im1: region.im1 + d * region.height(),
                };
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ContourThroughZero { retries: MAX_RETRIES })
}
