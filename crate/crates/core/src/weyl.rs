//! Weyl–Titchmarsh functions: the scalar `W(lambda)` of the delta case and the
//! 2x2 matrix `W(lambda)` of the general case.
//!
//! Scalar: `W = (q, G*q) + 2ik [1 + (G*q)(0)] [1 + (G*q*)(0)]`.
//!
//! Matrix: `W = [(q_j, G*q_l)] + B(q1*, q2*)^t diag(2ik, 2i/k) B(q1, q2)` with
//! `B(q1, q2) = [[1 + g(q1), g(q2)], [-g'(q1), 1 - g'(q2)]]`, where
//! `g(q) = (G*q)(0)` and `g'(q) = (G'*q)(0)`.

use crate::error::{Error, Result};
use crate::expo::Jet;
use crate::greens::{bil_jet, conv_jet};
use crate::model::{Potential, SpectralParameter};
use num_complex::Complex64 as C64;
use serde::Serialize;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylScalar {
    pub value: C64,
    pub at: SpectralParameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylMatrix {
    pub entries: [[C64; 2]; 2],
    pub at: SpectralParameter,
}

impl WeylMatrix {
    /// Conjugate transpose of the entries.
    pub fn adjoint_entries(&self) -> [[C64; 2]; 2] {
        let e = &self.entries;
        [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]]
    }
}

/// Scalar Weyl function and `dW/dk` at (complex) `k`.
pub(crate) fn scalar_jet(k: C64, q: &Potential, want_d: bool, tol: f64) -> Result<Jet> {
    let ik = Jet::new(I * k, I);
    let one = C64::new(1.0, 0.0);
    if q.is_zero() {
        return Ok(ik * 2.0);
    }
    let qc = q.conj();
    let g = conv_jet(k, q, 0.0, false, want_d, tol)?;
    let gc = conv_jet(k, &qc, 0.0, false, want_d, tol)?;
    let bil = bil_jet(k, q, q, want_d, tol)?;
    Ok(bil + ik * (g + one) * (gc + one) * 2.0)
}

/// Matrix Weyl function with entrywise `dW/dk`.
pub(crate) fn matrix_jet(k: C64, q1: &Potential, q2: &Potential, want_d: bool, tol: f64) -> Result<[[Jet; 2]; 2]> {
    let one = C64::new(1.0, 0.0);
    let qs = [q1, q2];
    let qcs = [q1.conj(), q2.conj()];
    let g = |q: &Potential, prime: bool| -> Result<Jet> {
        if q.is_zero() {
            Ok(Jet::ZERO)
        } else {
            conv_jet(k, q, 0.0, prime, want_d, tol)
        }
    };
    let bmat = |p1: &Potential, p2: &Potential| -> Result<[[Jet; 2]; 2]> {
        Ok([
            [g(p1, false)? + one, g(p2, false)?],
            [-g(p1, true)?, -g(p2, true)? + one],
        ])
    };
    let b = bmat(qs[0], qs[1])?;
    let bc = bmat(&qcs[0], &qcs[1])?;
    let diag = [
        Jet::new(2.0 * I * k, 2.0 * I),
        Jet::new(2.0 * I / k, -2.0 * I / (k * k)),
    ];
    let mut w = [[Jet::ZERO; 2]; 2];
    for j in 0..2 {
        for l in 0..2 {
            let mut e = if qs[j].is_zero() || qs[l].is_zero() {
                Jet::ZERO
            } else {
                bil_jet(k, qs[j], qs[l], want_d, tol)?
            };
            for m in 0..2 {
                e = e + bc[m][j] * diag[m] * b[m][l];
            }
            w[j][l] = e;
        }
    }
    Ok(w)
}

fn require_nonzero(k: &SpectralParameter) -> Result<()> {
    if k.k == C64::new(0.0, 0.0) {
        Err(Error::BranchPoint)
    } else {
        Ok(())
    }
}

pub fn weyl_scalar(k: &SpectralParameter, q: &Potential, tol: f64) -> Result<WeylScalar> {
    require_nonzero(k)?;
    Ok(WeylScalar {
        value: scalar_jet(k.k, q, false, tol)?.v,
        at: *k,
    })
}

pub fn weyl_matrix(k: &SpectralParameter, q1: &Potential, q2: &Potential, tol: f64) -> Result<WeylMatrix> {
    require_nonzero(k)?;
    let w = matrix_jet(k.k, q1, q2, false, tol)?;
    Ok(WeylMatrix {
        entries: [[w[0][0].v, w[0][1].v], [w[1][0].v, w[1][1].v]],
        at: *k,
    })
}

fn boundary_param(k: f64) -> Result<SpectralParameter> {
    if !k.is_finite() || k == 0.0 {
        return Err(Error::Precondition("boundary value needs real k != 0".into()));
    }
    SpectralParameter::from_k(C64::new(k, 0.0))
}

/// `W^+` (k > 0) or `W^-` (k < 0) on the continuous spectrum `lambda = k^2`.
pub fn weyl_boundary_scalar(k: f64, q: &Potential, tol: f64) -> Result<WeylScalar> {
    weyl_scalar(&boundary_param(k)?, q, tol)
}

pub fn weyl_boundary_matrix(k: f64, q1: &Potential, q2: &Potential, tol: f64) -> Result<WeylMatrix> {
    weyl_matrix(&boundary_param(k)?, q1, q2, tol)
}

/// `dW/dlambda = (dW/dk) / (2k)` for the scalar function.
pub fn weyl_derivative(k: &SpectralParameter, q: &Potential, tol: f64) -> Result<C64> {
    if !(k.k.im > 0.0) {
        return Err(Error::Precondition("weyl_derivative needs Im k > 0".into()));
    }
    Ok(scalar_jet(k.k, q, true, tol)?.d / (2.0 * k.k))
}

/// Central difference of `W` in `k` with step `1e-8`, converted to `d/dlambda`.
///
/// Independent of the analytic derivative; used to cross-check it.
pub fn weyl_derivative_fd(k: &SpectralParameter, q: &Potential, tol: f64) -> Result<C64> {
    let h = 1e-8;
    let f = |kk: C64| scalar_jet(kk, q, false, tol).map(|j| j.v);
    Ok((f(k.k + h)? - f(k.k - h)?) / (2.0 * h) / (2.0 * k.k))
}

/// Entrywise `dW/dlambda` of the matrix function.
pub fn weyl_matrix_derivative(
    k: &SpectralParameter,
    q1: &Potential,
    q2: &Potential,
    tol: f64,
) -> Result<[[C64; 2]; 2]> {
    let w = matrix_jet(k.k, q1, q2, true, tol)?;
    let s = 1.0 / (2.0 * k.k);
    Ok([[w[0][0].d * s, w[0][1].d * s], [w[1][0].d * s, w[1][1].d * s]])
}
