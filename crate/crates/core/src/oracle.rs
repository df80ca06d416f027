//! Finite-difference discretization of the delta-type operator on `[-L, L]`
//! with Dirichlet ends, independent of the Weyl-function code path.
//!
//! The matrix is `A = Lap + U M` with the second-difference Laplacian and a
//! rank-2 coupling at the central node `c`: row `c` carries
//! `(a f_c + (q, f)) / h` and every row `i` carries `q_i f_c`. `q_i` is the
//! hat-weighted average of `q` around `x_i`, which keeps rows next to jumps
//! of `q` second-order accurate.

use crate::eigenfunctions::Eigenfunction;
use crate::error::{Error, Result};
use crate::model::{DeltaModel, Potential};
use crate::quad::integrate;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);
const DENSE_CAP: usize = 5001;
/// `|lambda| h^2` above this is not resolved by the grid.
const RESOLUTION_LIMIT: f64 = 0.1;

/// `N` nodes `x_j = -L + j h`, `h = 2L / (N - 1)`, with `x_c = 0` at `c = (N - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdGrid {
    pub l: f64,
    pub n: usize,
}

impl FdGrid {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::validation("grid.L", "must be a positive finite real"));
        }
        if n < 201 || n % 2 == 0 {
            return Err(Error::validation("grid.N", "must be an odd integer >= 201"));
        }
        let g = FdGrid { l, n };
        if !(g.h() < 0.1) {
            return Err(Error::validation("grid.N", "spacing h = 2L/(N-1) must be below 0.1"));
        }
        Ok(g)
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / (self.n - 1) as f64
    }

    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.center() {
            0.0
        } else {
            -self.l + j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// `(1/h) int q(s) phi_j(s) ds` for the hat function `phi_j` at `x_j`.
fn hat_average(q: &Potential, grid: &FdGrid, j: usize) -> Result<C64> {
    let h = grid.h();
    let x = grid.node(j);
    let breaks = q.breakpoints();
    let left = integrate(|s| q.eval(s) * (1.0 - (x - s) / h), x - h, x, &breaks, 1e-14)?;
    let right = integrate(|s| q.eval(s) * (1.0 - (s - x) / h), x, x + h, &breaks, 1e-14)?;
    Ok((left.value + right.value) / h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdOperator {
    pub grid: FdGrid,
    pub a: C64,
    /// Hat-averaged potential at the nodes.
    pub q: Vec<C64>,
}

/// Discretize `H_a` on `grid`.
pub fn assemble(model: &DeltaModel, grid: &FdGrid) -> Result<FdOperator> {
    let (lo, hi) = model.q.support();
    let h = grid.h();
    let q = (0..grid.n)
        .map(|j| {
            let x = grid.node(j);
            if model.q.is_zero() || x + h <= lo || x - h >= hi {
                Ok(ZERO)
            } else {
                hat_average(&model.q, grid, j)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdOperator {
        grid: *grid,
        a: model.a,
        q,
    })
}

impl FdOperator {
    fn inv_h2(&self) -> f64 {
        let h = self.grid.h();
        1.0 / (h * h)
    }

    /// `U = [e_c, q]`.
    fn u_cols(&self) -> [Vec<C64>; 2] {
        let mut e = vec![ZERO; self.grid.n];
        e[self.grid.center()] = C64::new(1.0, 0.0);
        [e, self.q.clone()]
    }

    /// Rows of `M`: `(a/h) e_c + conj(q)` and `e_c`.
    fn m_rows(&self) -> [Vec<C64>; 2] {
        let c = self.grid.center();
        let mut m0: Vec<C64> = self.q.iter().map(|v| v.conj()).collect();
        m0[c] += self.a / self.grid.h();
        let mut m1 = vec![ZERO; self.grid.n];
        m1[c] = C64::new(1.0, 0.0);
        [m0, m1]
    }

    /// `A v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.grid.n;
        let s = self.inv_h2();
        let c = self.grid.center();
        let mut out: Vec<C64> = (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { ZERO };
                let r = if i + 1 < n { v[i + 1] } else { ZERO };
                (2.0 * v[i] - l - r) * s + self.q[i] * v[c]
            })
            .collect();
        let coupling: C64 = self.q.iter().zip(v).map(|(q, f)| q.conj() * f).sum();
        out[c] += self.a / self.grid.h() * v[c] + coupling;
        out
    }

    /// Row-major dense copy (for `N <= 5001`).
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let n = self.grid.n;
        if n > DENSE_CAP {
            return Err(Error::Precondition(format!("dense matrix capped at N <= {DENSE_CAP}")));
        }
        let mut m = vec![ZERO; n * n];
        let mut e = vec![ZERO; n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            for (i, v) in self.apply(&e).into_iter().enumerate() {
                m[i * n + j] = v;
            }
            e[j] = ZERO;
        }
        Ok(m)
    }

    fn shifted(&self, sigma: C64) -> Result<Shifted> {
        let s = self.inv_h2();
        let n = self.grid.n;
        let lu = TriLu::new(n, C64::new(2.0 * s, 0.0) - sigma, -s)?;
        LowRankSolve::new(lu, self.u_cols(), self.m_rows())
    }

    fn shifted_adjoint(&self, sigma: C64) -> Result<Shifted> {
        let s = self.inv_h2();
        let n = self.grid.n;
        let lu = TriLu::new(n, C64::new(2.0 * s, 0.0) - sigma.conj(), -s)?;
        // (U M)^H = M^H U^H
        let m = self.m_rows().map(|r| r.iter().map(|v| v.conj()).collect());
        let u = self.u_cols().map(|r| r.iter().map(|v| v.conj()).collect());
        LowRankSolve::new(lu, m, u)
    }

    fn check_resolution(&self, lambda: C64) -> Result<()> {
        let h = self.grid.h();
        if lambda.norm() * h * h > RESOLUTION_LIMIT {
            return Err(Error::Resolution {
                lambda: lambda.norm(),
                h,
            });
        }
        Ok(())
    }

    /// Eigenpair nearest `shift` by shift-invert iteration.
    pub fn eigenvalue_near(&self, shift: C64) -> Result<(C64, Vec<C64>)> {
        self.check_resolution(shift)?;
        let solver = self.shifted(shift)?;
        let n = self.grid.n;
        let mut x: Vec<C64> = (0..n).map(|j| C64::new(1.0, 0.1 * (j % 7) as f64)).collect();
        normalize(&mut x);
        let mut prev = C64::new(f64::INFINITY, 0.0);
        for _ in 0..2000 {
            let y = solver.solve(&x);
            let nu: C64 = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
            if nu == ZERO {
                break;
            }
            let lam = shift + 1.0 / nu;
            x = y;
            normalize(&mut x);
            if (lam - prev).norm() <= 1e-13 * (1.0 + lam.norm()) {
                return Ok((lam, x));
            }
            prev = lam;
        }
        Err(Error::NoConvergence(format!("shift-invert iteration near {shift}")))
    }

    /// Smallest singular value of `A - lambda I` (inverse iteration on `B^H B`).
    pub fn sigma_min(&self, lambda: C64) -> Result<f64> {
        let b = self.shifted(lambda)?;
        let bh = self.shifted_adjoint(lambda)?;
        let n = self.grid.n;
        let mut x: Vec<C64> = (0..n).map(|j| C64::new(1.0 + 0.01 * (j % 11) as f64, 0.0)).collect();
        normalize(&mut x);
        let mut prev = f64::INFINITY;
        for _ in 0..2000 {
            let y = b.solve(&bh.solve(&x));
            let g = norm(&y);
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::NoConvergence("inverse iteration for sigma_min".into()));
            }
            x = y.into_iter().map(|v| v / g).collect();
            // ||B^H B x|| ~ 1/g once converged; Rayleigh value ||B x|| is sharper.
            let bx = self.apply(&x);
            let s = x
                .iter()
                .zip(&bx)
                .map(|(xi, yi)| (yi - lambda * xi).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if (s - prev).abs() <= 1e-13 * s.max(1e-300) {
                return Ok(s);
            }
            prev = s;
        }
        Ok(prev)
    }

    /// Median singular value of `A - lambda I`.
    ///
    /// `B^H B = X^H X + P K P^H` with `X = Lap - lambda` diagonal in the sine
    /// basis, so eigenvalue counts below `t` follow from the inertia of a 4x4
    /// Schur complement; the median is found by bisection on `t`.
    pub fn sigma_median(&self, lambda: C64) -> Result<f64> {
        let n = self.grid.n;
        let s = self.inv_h2();
        let mu: Vec<C64> = (1..=n)
            .map(|j| {
                let t = (j as f64 * PI / (2.0 * (n + 1) as f64)).sin();
                C64::new(4.0 * s * t * t, 0.0) - lambda
            })
            .collect();
        let d: Vec<f64> = mu.iter().map(|m| m.norm_sqr()).collect();
        let u = self.u_cols();
        let m = self.m_rows();
        let su = [sine_transform(&u[0]), sine_transform(&u[1])];
        let mh: [Vec<C64>; 2] = [
            sine_transform(&m[0].iter().map(|v| v.conj()).collect::<Vec<_>>()),
            sine_transform(&m[1].iter().map(|v| v.conj()).collect::<Vec<_>>()),
        ];
        // P in the sine basis: [conj(mu) S u0, conj(mu) S u1, S m0^H, S m1^H].
        let p: Vec<[C64; 4]> = (0..n)
            .map(|j| {
                let cm = mu[j].conj();
                [cm * su[0][j], cm * su[1][j], mh[0][j], mh[1][j]]
            })
            .collect();
        let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
        let g = [
            [dot(&u[0], &u[0]), dot(&u[0], &u[1])],
            [dot(&u[1], &u[0]), dot(&u[1], &u[1])],
        ];
        // -K^{-1} = [[G, -I], [-I, 0]]
        let mut neg_kinv = [[ZERO; 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                neg_kinv[a][b] = g[a][b];
            }
            neg_kinv[a][a + 2] = C64::new(-1.0, 0.0);
            neg_kinv[a + 2][a] = C64::new(-1.0, 0.0);
        }
        let count_below = |t: f64| -> Result<usize> {
            let mut neg = 0usize;
            let mut h4 = neg_kinv;
            for j in 0..n {
                let mut dt = d[j] - t;
                if dt == 0.0 {
                    dt = -f64::EPSILON * t.max(1.0);
                }
                if dt < 0.0 {
                    neg += 1;
                }
                for a in 0..4 {
                    for b in 0..4 {
                        h4[a][b] -= p[j][a].conj() * p[j][b] / dt;
                    }
                }
            }
            let ev = Mat::<C64>::from_fn(4, 4, |a, b| h4[a][b])
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|_| Error::NoConvergence("4x4 Hermitian eigenvalues".into()))?;
            let neg4 = ev.iter().filter(|&&e| e < 0.0).count();
            // inertia(-K^{-1}) has two negative eigenvalues.
            Ok((neg + neg4).saturating_sub(2))
        };
        let target = (n - 1) / 2 + 1;
        let um_bound = norm(&u[0]).hypot(norm(&u[1])) * norm(&m[0]).hypot(norm(&m[1]));
        let top = d.iter().cloned().fold(0.0, f64::max).sqrt() + um_bound;
        let (mut lo, mut hi) = (0.0, 1.01 * top * top);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid)? >= target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok((0.5 * (lo + hi)).sqrt())
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Orthonormal DST-I: `(S x)_j = sqrt(2/(N+1)) sum_i sin(pi (i+1) (j+1) / (N+1)) x_i`.
fn sine_transform(x: &[C64]) -> Vec<C64> {
    let n = x.len();
    let period = 2 * (n + 1);
    let table: Vec<f64> = (0..period).map(|m| (PI * m as f64 / (n + 1) as f64).sin()).collect();
    let scale = (2.0 / (n + 1) as f64).sqrt();
    let nz: Vec<(usize, C64)> = x.iter().cloned().enumerate().filter(|(_, v)| *v != ZERO).collect();
    (0..n)
        .map(|j| {
            let mut acc = ZERO;
            for &(i, v) in &nz {
                acc += v * table[((i + 1) * (j + 1)) % period];
            }
            acc * scale
        })
        .collect()
}

/// LU with partial pivoting of the constant tridiagonal `tridiag(off, diag, off)`.
#[derive(Debug, Clone)]
struct TriLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swap: Vec<bool>,
}

impl TriLu {
    fn new(n: usize, diag: C64, off: f64) -> Result<Self> {
        let off = C64::new(off, 0.0);
        let mut dl = vec![off; n - 1];
        let mut d = vec![diag; n];
        let mut du = vec![off; n - 1];
        let mut du2 = vec![ZERO; n.saturating_sub(2)];
        let mut swap = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].norm() >= dl[i].norm() {
                if d[i] == ZERO {
                    return Err(Error::NoConvergence("singular tridiagonal factor".into()));
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if d[n - 1] == ZERO {
            return Err(Error::NoConvergence("singular tridiagonal factor".into()));
        }
        Ok(TriLu { dl, d, du, du2, swap })
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if self.swap[i] {
                let t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - self.dl[i] * x[i];
            } else {
                x[i + 1] = x[i + 1] - self.dl[i] * x[i];
            }
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}

/// `(T + U M)^{-1}` by Woodbury with a 2x2 capacitance matrix.
struct LowRankSolve {
    lu: TriLu,
    m: [Vec<C64>; 2],
    z: [Vec<C64>; 2],
    cap_inv: [[C64; 2]; 2],
}

type Shifted = LowRankSolve;

impl LowRankSolve {
    fn new(lu: TriLu, u: [Vec<C64>; 2], m: [Vec<C64>; 2]) -> Result<Self> {
        let z = [lu.solve(&u[0]), lu.solve(&u[1])];
        let row = |r: &[C64], v: &[C64]| -> C64 { r.iter().zip(v).map(|(a, b)| a * b).sum() };
        let one = C64::new(1.0, 0.0);
        let cap = [
            [one + row(&m[0], &z[0]), row(&m[0], &z[1])],
            [row(&m[1], &z[0]), one + row(&m[1], &z[1])],
        ];
        let det = cap[0][0] * cap[1][1] - cap[0][1] * cap[1][0];
        let scale = cap.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        if det.norm() <= 1e-300 || det.norm() <= f64::EPSILON * scale * scale * 1e-3 {
            return Err(Error::NoConvergence(
                "shift is an eigenvalue of the discrete operator".into(),
            ));
        }
        let cap_inv = [[cap[1][1] / det, -cap[0][1] / det], [-cap[1][0] / det, cap[0][0] / det]];
        Ok(LowRankSolve { lu, m, z, cap_inv })
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut y = self.lu.solve(b);
        let row = |r: &[C64], v: &[C64]| -> C64 { r.iter().zip(v).map(|(a, b)| a * b).sum() };
        let w = [row(&self.m[0], &y), row(&self.m[1], &y)];
        let s = [
            self.cap_inv[0][0] * w[0] + self.cap_inv[0][1] * w[1],
            self.cap_inv[1][0] * w[0] + self.cap_inv[1][1] * w[1],
        ];
        for (i, v) in y.iter_mut().enumerate() {
            *v -= self.z[0][i] * s[0] + self.z[1][i] * s[1];
        }
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    pub sigma_min: f64,
    pub sigma_median: f64,
    pub sigma_min_ratio: f64,
    /// `||(A - lambda) v|| / ||v||` for the candidate sampled at the nodes.
    pub residual: Option<f64>,
}

/// Discrete evidence that `lambda` is an eigenvalue of `H_a`.
pub fn verify_eigenvalue(
    model: &DeltaModel,
    lambda: C64,
    grid: &FdGrid,
    candidate: Option<&Eigenfunction>,
) -> Result<Verification> {
    let op = assemble(model, grid)?;
    op.check_resolution(lambda)?;
    let sigma_min = op.sigma_min(lambda)?;
    let sigma_median = op.sigma_median(lambda)?;
    let residual = match candidate {
        None => None,
        Some(f) => {
            let v = grid
                .nodes()
                .into_iter()
                .map(|x| f.value(x))
                .collect::<Result<Vec<_>>>()?;
            let av = op.apply(&v);
            let r: Vec<C64> = av.iter().zip(&v).map(|(a, b)| a - lambda * b).collect();
            Some(norm(&r) / norm(&v))
        }
    };
    Ok(Verification {
        sigma_min,
        sigma_median,
        sigma_min_ratio: sigma_min / sigma_median,
        residual,
    })
}

/// FD eigenvalue of `H_a` nearest `shift`.
pub fn fd_eigenvalue(model: &DeltaModel, grid: &FdGrid, shift: C64) -> Result<C64> {
    Ok(assemble(model, grid)?.eigenvalue_near(shift)?.0)
}
