//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature for complex integrands.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 4000;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: C64,
    pub est_error: f64,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: C64,
    err: f64,
}

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Integrate `f` over `[a, b]` with `a`, `b` finite, splitting first at the
/// given interior breakpoints. Absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<Integral> {
    if !(b > a) {
        return Ok(Integral {
            value: C64::new(0.0, 0.0),
            est_error: 0.0,
        });
    }
    let mut pts: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    pts.dedup();

    let mut panels: Vec<Panel> = pts
        .windows(2)
        .map(|w| {
            let (value, err) = gk15(&mut f, w[0], w[1]);
            Panel {
                a: w[0],
                b: w[1],
                depth: 0,
                value,
                err,
            }
        })
        .collect();

    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol {
            break;
        }
        let (idx, worst) = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < MAX_DEPTH)
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, p)| (i, *p))
            .unwrap_or((usize::MAX, panels[0]));
        if idx == usize::MAX || panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature {
                estimate: total_err,
                tol,
            });
        }
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        panels[idx] = Panel {
            a: worst.a,
            b: m,
            depth: worst.depth + 1,
            value: v1,
            err: e1,
        };
        panels.push(Panel {
            a: m,
            b: worst.b,
            depth: worst.depth + 1,
            value: v2,
            err: e2,
        });
    }
    Ok(Integral {
        value: panels.iter().map(|p| p.value).sum(),
        est_error: panels.iter().map(|p| p.err).sum(),
    })
}

/// Integrate over `[a, inf)` via `s = a + t/(1-t)`.
pub fn integrate_upper<F: FnMut(f64) -> C64>(mut f: F, a: f64, breaks: &[f64], tol: f64) -> Result<Integral> {
    let tb: Vec<f64> = breaks
        .iter()
        .filter(|&&s| s > a)
        .map(|&s| (s - a) / (1.0 + s - a))
        .collect();
    integrate(
        |t| {
            let u = 1.0 - t;
            f(a + t / u) / (u * u)
        },
        0.0,
        1.0,
        &tb,
        tol,
    )
}

/// Integrate over `(-inf, b]` via `s = b - t/(1-t)`.
pub fn integrate_lower<F: FnMut(f64) -> C64>(mut f: F, b: f64, breaks: &[f64], tol: f64) -> Result<Integral> {
    let mirrored: Vec<f64> = breaks.iter().map(|&s| 2.0 * b - s).collect();
    integrate_upper(|s| f(2.0 * b - s), b, &mirrored, tol)
}

/// Integrate over an interval whose ends may be infinite.
pub fn integrate_any<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<Integral> {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate(f, a, b, breaks, tol),
        (true, false) => integrate_upper(f, a, breaks, tol),
        (false, true) => integrate_lower(f, b, breaks, tol),
        (false, false) => {
            let lo = integrate_lower(&mut f, 0.0, breaks, 0.5 * tol)?;
            let hi = integrate_upper(&mut f, 0.0, breaks, 0.5 * tol)?;
            Ok(Integral {
                value: lo.value + hi.value,
                est_error: lo.est_error + hi.est_error,
            })
        }
    }
}
