//! Self-adjointness, PT-symmetry and P-self-adjointness from the coupling
//! matrix and the parity of the potentials.
//!
//! The PT and P flags are sufficient conditions: `true` means the condition
//! holds, `false` means it does not (the operator may still be symmetric).

use crate::error::{Error, Result};
use crate::model::{Model, Potential};
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub self_adjoint: bool,
    pub pt_symmetric: bool,
    pub p_self_adjoint: bool,
    /// Parity of `q1`, `q2` (the zero function counts as even).
    pub potential_parity: [Parity; 2],
    /// `PT q1 = q1` and `PT q2 = -q2`, with `(PT q)(x) = q(-x)*`.
    pub pt_fixed: [bool; 2],
    /// `P q1 = q1` and `P q2 = -q2`, with `(P q)(x) = q(-x)`.
    pub p_fixed: [bool; 2],
}

/// How `q(-x)` and `q(-x)*` relate to `q(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Reflections {
    even: bool,
    odd: bool,
    pt_even: bool,
    pt_odd: bool,
}

fn small(x: f64, scale: f64, tol: f64) -> bool {
    x.abs() <= tol * (1.0 + scale)
}

fn is_real(z: C64, tol: f64) -> bool {
    small(z.im, z.norm(), tol)
}

fn is_imag(z: C64, tol: f64) -> bool {
    small(z.re, z.norm(), tol)
}

fn near(a: C64, b: C64, tol: f64) -> bool {
    small((a - b).norm(), a.norm().max(b.norm()), tol)
}

fn reflections(q: &Potential, tol: f64) -> Result<Reflections> {
    let all = Reflections {
        even: true,
        odd: true,
        pt_even: true,
        pt_odd: true,
    };
    Ok(match q {
        _ if q.is_zero() => all,
        Potential::Zero => all,
        // BoxEven stores a real Z.
        Potential::BoxEven { .. } => Reflections {
            even: true,
            odd: false,
            pt_even: true,
            pt_odd: false,
        },
        // q(-x)* = -Z* sign x
        Potential::BoxOddSign { z, .. } => Reflections {
            even: false,
            odd: true,
            pt_even: is_imag(*z, tol),
            pt_odd: is_real(*z, tol),
        },
        Potential::ExpEven { c, .. } => Reflections {
            even: true,
            odd: false,
            pt_even: is_real(*c, tol),
            pt_odd: is_imag(*c, tol),
        },
        Potential::Sampled(s) => {
            let x = s.nodes();
            let v = s.values();
            let n = x.len();
            let mirrored = (0..n).all(|i| small(x[i] + x[n - 1 - i], x[i].abs(), tol));
            if !mirrored {
                return Err(Error::ParityUndecidable(
                    "sampled nodes are not symmetric about 0".into(),
                ));
            }
            let mut r = all;
            for i in 0..n {
                let (f, m) = (v[i], v[n - 1 - i]);
                r.even &= near(m, f, tol);
                r.odd &= near(m, -f, tol);
                r.pt_even &= near(m.conj(), f, tol);
                r.pt_odd &= near(m.conj(), -f, tol);
            }
            r
        }
    })
}

fn parity(r: &Reflections) -> Parity {
    if r.even {
        Parity::Even
    } else if r.odd {
        Parity::Odd
    } else {
        Parity::Neither
    }
}

/// Classify `model`; `tol` is relative (`|Im z| <= tol (1 + |z|)` means real).
pub fn classify(model: &Model, tol: f64) -> Result<SymmetryReport> {
    let g = model.to_general();
    let t = g.t;
    let r1 = reflections(&g.q1, tol)?;
    let r2 = reflections(&g.q2, tol)?;
    let diag_real = is_real(t.a, tol) && is_real(t.d, tol);
    let self_adjoint = diag_real && near(t.b, t.c.conj(), tol);
    let pt_fixed = [r1.pt_even, r2.pt_odd];
    let p_fixed = [r1.even, r2.odd];
    let pt_symmetric = diag_real && is_imag(t.b, tol) && is_imag(t.c, tol) && pt_fixed[0] && pt_fixed[1];
    let p_self_adjoint = diag_real && near(t.b, -t.c.conj(), tol) && p_fixed[0] && p_fixed[1];
    Ok(SymmetryReport {
        self_adjoint,
        pt_symmetric,
        p_self_adjoint,
        potential_parity: [parity(&r1), parity(&r2)],
        pt_fixed,
        p_fixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{delta_to_general, CouplingMatrix, DeltaModel, GeneralModel};

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn general(t: CouplingMatrix, q1: Potential, q2: Potential) -> Model {
        Model::General(GeneralModel { t, q1, q2 })
    }

    fn catalog() -> Vec<Potential> {
        vec![
            Potential::Zero,
            Potential::box_even(0.7, 1.3).unwrap(),
            Potential::box_odd_sign(c(0.4, -0.9), 0.8).unwrap(),
            Potential::exp_even(c(0.5, 0.5), 0.6).unwrap(),
        ]
    }

    #[test]
    fn hermitian_t_is_self_adjoint_for_any_q() {
        let t = CouplingMatrix::new(c(1.0, 0.0), c(3.0, 1.0), c(3.0, -1.0), c(-2.0, 0.0));
        for q1 in catalog() {
            for q2 in catalog() {
                assert!(classify(&general(t, q1.clone(), q2), TOL).unwrap().self_adjoint);
            }
        }
        let t = CouplingMatrix::new(c(1.0, 0.0), c(3.0, 1.0), c(3.0, 1.0), c(-2.0, 0.0));
        assert!(
            !classify(&general(t, Potential::Zero, Potential::Zero), TOL)
                .unwrap()
                .self_adjoint
        );
    }

    #[test]
    fn real_delta_with_real_even_box() {
        let m = Model::Delta(DeltaModel::new(c(-2.0, 0.0), Potential::box_even(0.5, 1.0).unwrap()));
        let r = classify(&m, TOL).unwrap();
        assert!(r.self_adjoint && r.pt_symmetric && r.p_self_adjoint);
        assert_eq!(r.potential_parity, [Parity::Even, Parity::Even]);
    }

    #[test]
    fn pt_with_odd_sign_box() {
        let t = CouplingMatrix::new(c(0.0, 0.0), c(0.0, 2.0), c(0.0, 3.0), c(0.0, 0.0));
        let q1 = Potential::box_even(0.5, 1.0).unwrap();
        // Real Z: PT q2 = -Z sign x = -q2.
        let real = classify(
            &general(t, q1.clone(), Potential::box_odd_sign(c(1.5, 0.0), 1.0).unwrap()),
            TOL,
        )
        .unwrap();
        assert!(real.pt_symmetric && !real.self_adjoint);
        // Imaginary Z: PT q2 = q2, so the condition fails.
        let imag = classify(&general(t, q1, Potential::box_odd_sign(c(0.0, 1.5), 1.0).unwrap()), TOL).unwrap();
        assert!(!imag.pt_symmetric && !imag.self_adjoint);
        assert_eq!(imag.pt_fixed, [true, false]);
        assert_eq!(imag.potential_parity[1], Parity::Odd);
    }

    #[test]
    fn p_self_adjoint_condition() {
        let t = CouplingMatrix::new(c(1.0, 0.0), c(1.0, 2.0), c(-1.0, 2.0), c(0.5, 0.0));
        let q1 = Potential::exp_even(c(0.3, 0.9), 1.0).unwrap();
        let q2 = Potential::box_odd_sign(c(0.2, 0.7), 1.0).unwrap();
        let r = classify(&general(t, q1.clone(), q2.clone()), TOL).unwrap();
        assert!(r.p_self_adjoint && !r.self_adjoint && !r.pt_symmetric);
        let r = classify(&general(t, q2, q1), TOL).unwrap();
        assert!(!r.p_self_adjoint);
    }

    #[test]
    fn delta_and_general_forms_agree() {
        for q in catalog() {
            for a in [c(-2.0, 0.0), c(1.0, 0.5), c(0.0, 3.0)] {
                let d = DeltaModel::new(a, q.clone());
                let g = Model::General(delta_to_general(&d));
                assert_eq!(classify(&Model::Delta(d), TOL).unwrap(), classify(&g, TOL).unwrap());
            }
        }
    }

    #[test]
    fn adjoint_preserves_self_adjointness() {
        let ts = [
            CouplingMatrix::new(c(1.0, 0.0), c(3.0, 1.0), c(3.0, -1.0), c(-2.0, 0.0)),
            CouplingMatrix::new(c(1.0, 0.2), c(3.0, 1.0), c(3.0, -1.0), c(-2.0, 0.0)),
            CouplingMatrix::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 2.0), c(0.0, 0.0)),
        ];
        for t in ts {
            let a = classify(&general(t, Potential::Zero, Potential::Zero), TOL).unwrap();
            let b = classify(&general(t.adjoint(), Potential::Zero, Potential::Zero), TOL).unwrap();
            assert_eq!(a.self_adjoint, b.self_adjoint);
        }
    }

    #[test]
    fn sampled_parity() {
        let xs: Vec<f64> = (0..21).map(|j| -1.0 + 0.1 * j as f64).collect();
        let odd: Vec<C64> = xs.iter().map(|&x| c(x * x * x, 0.0)).collect();
        let even: Vec<C64> = xs.iter().map(|&x| c(1.0 - x * x, 2.0 * x * x)).collect();
        let q1 = Potential::sampled(xs.clone(), even).unwrap();
        let q2 = Potential::sampled(xs.clone(), odd).unwrap();
        let t = CouplingMatrix::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        let r = classify(&general(t, q1, q2), 1e-9).unwrap();
        assert_eq!(r.potential_parity, [Parity::Even, Parity::Odd]);
        assert_eq!(r.p_fixed, [true, true]);
        assert_eq!(r.pt_fixed, [false, true]);

        let skew: Vec<f64> = (0..21).map(|j| -1.0 + 0.11 * j as f64).collect();
        let q = Potential::sampled(skew, vec![c(1.0, 0.0); 21]).unwrap();
        let m = Model::Delta(DeltaModel::new(c(1.0, 0.0), q));
        assert!(matches!(classify(&m, 1e-9), Err(Error::ParityUndecidable(_))));
    }
}
