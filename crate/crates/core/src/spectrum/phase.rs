//! Classification of the coupling plane `a` for a fixed potential.

use super::{find_eigenvalues, SearchRegion};
use crate::error::Result;
use crate::model::{DeltaModel, Model, Potential};
use crate::weyl::scalar_jet;
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    NonrealEigenvalue,
    RealEigenvalue,
    Singularity,
    NoEigenvalue,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::NonrealEigenvalue => "nonreal_eigenvalue",
            PhaseLabel::RealEigenvalue => "real_eigenvalue",
            PhaseLabel::Singularity => "singularity",
            PhaseLabel::NoEigenvalue => "no_eigenvalue",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub a: C64,
    pub eigenvalues: Vec<C64>,
    pub real_eigenvalues: usize,
    /// `lambda = k^2` of a spectral singularity, if one was found.
    pub singularity: Option<f64>,
    pub label: PhaseLabel,
}

/// Uniform grid of couplings `a` (inclusive ends).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl PhaseGrid {
    fn axis(lo: f64, hi: f64, n: usize, j: usize) -> f64 {
        if n <= 1 {
            lo
        } else {
            lo + (hi - lo) * j as f64 / (n - 1) as f64
        }
    }

    /// Grid points, real part varying fastest.
    pub fn points(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.n_re * self.n_im);
        for i in 0..self.n_im {
            for j in 0..self.n_re {
                v.push(C64::new(
                    Self::axis(self.re_min, self.re_max, self.n_re, j),
                    Self::axis(self.im_min, self.im_max, self.n_im, i),
                ));
            }
        }
        v
    }
}

const SCAN_POINTS: usize = 2000;

/// Real `k != 0` with `W^{sign k}(k) = a`, if `a` is non-real and such `k`
/// exists in `0 < |k| <= k_max`: the sufficient condition for a spectral
/// singularity at `lambda = k^2`.
pub fn singular_coupling(q: &Potential, a: C64, k_max: f64, tol: f64) -> Result<Option<f64>> {
    if a.im.abs() <= 1e-12 * (1.0 + a.norm()) {
        return Ok(None);
    }
    let dist = |k: f64| -> Result<f64> { Ok((a - scalar_jet(C64::new(k, 0.0), q, false, tol)?.v).norm()) };
    let accept = 1e-8 * (1.0 + a.norm());
    for sign in [1.0, -1.0] {
        let h = k_max / SCAN_POINTS as f64;
        let ks: Vec<f64> = (1..=SCAN_POINTS).map(|j| sign * h * j as f64).collect();
        let ds = ks.iter().map(|&k| dist(k)).collect::<Result<Vec<_>>>()?;
        for j in 0..ks.len() {
            let left = if j == 0 { f64::INFINITY } else { ds[j - 1] };
            let right = if j + 1 == ks.len() { f64::INFINITY } else { ds[j + 1] };
            if ds[j] > left || ds[j] > right {
                continue;
            }
            let lo = if j == 0 { sign * 1e-9 * k_max } else { ks[j - 1] };
            let hi = if j + 1 == ks.len() { ks[j] } else { ks[j + 1] };
            let (k, d) = golden_min(&dist, lo.min(hi), lo.max(hi))?;
            if d < accept {
                return Ok(Some(k));
            }
        }
    }
    Ok(None)
}

fn golden_min(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Classify a single coupling `a`.
pub fn phase_point(q: &Potential, a: C64, region: &SearchRegion, tol: f64) -> Result<PhasePoint> {
    let model = Model::Delta(DeltaModel::new(a, q.clone()));
    let eigs = find_eigenvalues(&model, region, tol)?;
    let eigenvalues: Vec<C64> = eigs.iter().map(|e| e.lambda).collect();
    let real_eigenvalues = eigenvalues
        .iter()
        .filter(|l| l.im.abs() <= 1e-8 * (1.0 + l.norm()))
        .count();
    let k_max = region.k_re_min.abs().max(region.k_re_max.abs());
    let singularity = singular_coupling(q, a, k_max, tol)?.map(|k| k * k);
    let label = if !eigenvalues.is_empty() {
        if real_eigenvalues > 0 {
            PhaseLabel::RealEigenvalue
        } else {
            PhaseLabel::NonrealEigenvalue
        }
    } else if singularity.is_some() {
        PhaseLabel::Singularity
    } else {
        PhaseLabel::NoEigenvalue
    };
    Ok(PhasePoint {
        a,
        eigenvalues,
        real_eigenvalues,
        singularity,
        label,
    })
}

/// Classify every grid point (sequentially; parallelize over `grid.points()`
/// with [`phase_point`] when needed).
pub fn phase_diagram(q: &Potential, grid: &PhaseGrid, region: &SearchRegion, tol: f64) -> Result<Vec<PhasePoint>> {
    grid.points()
        .into_iter()
        .map(|a| phase_point(q, a, region, tol))
        .collect()
}
