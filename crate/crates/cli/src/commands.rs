use crate::output::{Csv, Output};
use crate::{Command, Common};
use num_complex::Complex64 as C64;
use pointspec::eigenfunctions::{basis_general, u_delta};
use pointspec::model::{model_to_json, parse_model_value, parse_potential};
use pointspec::oracle::{assemble, verify_eigenvalue, FdGrid};
use pointspec::spectrum::{
    find_eigenvalues, find_exceptional_points, phase_point, singularity_scan, PhaseGrid, SearchRegion,
};
use pointspec::symmetry::classify;
use pointspec::weyl::{weyl_derivative, weyl_matrix, weyl_scalar};
use pointspec::{k_from_lambda, BoundarySide, DeltaModel, Error, Model, Potential, Result, SpectralParameter};
use rayon::prelude::*;
use serde_json::{json, Value};

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn numbers(s: &str, flag: &str, count: usize) -> Result<Vec<f64>> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| parse_err(flag, e.to_string()))?;
    if v.len() != count || v.iter().any(|x| !x.is_finite()) {
        return Err(parse_err(
            flag,
            format!("expected {count} finite comma-separated numbers"),
        ));
    }
    Ok(v)
}

/// `re,im` or a bare real.
fn complex_arg(s: &str, flag: &str) -> Result<C64> {
    if !s.contains(',') {
        return Ok(C64::new(numbers(s, flag, 1)?[0], 0.0));
    }
    let v = numbers(s, flag, 2)?;
    Ok(C64::new(v[0], v[1]))
}

fn side_arg(s: &Option<String>) -> BoundarySide {
    match s.as_deref() {
        Some("plus") => BoundarySide::Plus,
        Some("minus") => BoundarySide::Minus,
        _ => BoundarySide::None,
    }
}

fn read_json(common: &Common) -> Result<Value> {
    let path = common
        .model
        .as_ref()
        .ok_or_else(|| parse_err("--model", "a model file is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(&path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| parse_err("$", e.to_string()))
}

fn load_model(common: &Common) -> Result<Model> {
    parse_model_value(&read_json(common)?)
}

/// A bare potential document, or the `q` of a delta model.
fn load_potential(common: &Common) -> Result<(Potential, Value)> {
    let v = read_json(common)?;
    if v.get("kind").is_some() {
        let q = parse_potential(&v, "$")?;
        return Ok((q, v));
    }
    match parse_model_value(&v)? {
        Model::Delta(d) => {
            let echo = model_to_json(&Model::Delta(d.clone()));
            Ok((d.q, echo))
        }
        Model::General(_) => Err(Error::Validation {
            path: "$.case".into(),
            message: "this command needs a delta model or a bare potential".into(),
        }),
    }
}

fn region(common: &Common) -> Result<SearchRegion> {
    match &common.region {
        None => Ok(SearchRegion::default()),
        Some(s) => {
            let v = numbers(s, "--region", 4)?;
            SearchRegion::new(v[0], v[1], v[2], v[3])
        }
    }
}

fn f(x: f64) -> String {
    format!("{x}")
}

pub fn run(cmd: &Command, common: &Common) -> Result<Output> {
    if common.csv
        && !matches!(
            cmd,
            Command::Weyl { .. }
                | Command::Singularities { .. }
                | Command::PhaseDiagram { .. }
                | Command::Eigenfunction { .. }
        )
    {
        return Err(parse_err("--csv", "CSV output is only available for grid commands"));
    }
    match cmd {
        Command::Weyl {
            lambdas,
            k_grid,
            side,
            derivative,
        } => weyl(common, lambdas, k_grid.as_deref(), side_arg(side), *derivative),
        Command::Eigs => eigs(common),
        Command::Exceptional => exceptional(common),
        Command::Singularities { k_range, steps } => singularities(common, k_range, *steps),
        Command::PhaseDiagram { a_range } => phase(common, a_range),
        Command::Eigenfunction { lambda, side, x_range } => eigenfunction(common, lambda, side_arg(side), x_range),
        Command::Classify => {
            let m = load_model(common)?;
            let r = classify(&m, 1e-12)?;
            Ok(Output::Json {
                model: Some(model_to_json(&m)),
                results: json!(r),
            })
        }
        Command::Verify {
            lambda,
            length,
            candidate,
            side,
        } => verify(common, lambda, *length, *candidate, side_arg(side)),
    }
}

fn weyl(
    common: &Common,
    lambdas: &[String],
    k_grid: Option<&str>,
    side: BoundarySide,
    derivative: bool,
) -> Result<Output> {
    let m = load_model(common)?;
    let mut points: Vec<SpectralParameter> = lambdas
        .iter()
        .map(|s| k_from_lambda(complex_arg(s, "--lambda")?, side))
        .collect::<Result<_>>()?;
    if let Some(g) = k_grid {
        let v = numbers(g, "--k-grid", 3)?;
        let n = v[2] as usize;
        if n == 0 || v[2].fract() != 0.0 {
            return Err(parse_err("--k-grid", "N must be a positive integer"));
        }
        for j in 0..n {
            let k = if n == 1 {
                v[0]
            } else {
                v[0] + (v[1] - v[0]) * j as f64 / (n - 1) as f64
            };
            points.push(SpectralParameter::from_k(C64::new(k, 0.0))?);
        }
    }
    if points.is_empty() {
        return Err(parse_err("--lambda", "give at least one --lambda or a --k-grid"));
    }
    let tol = common.tol;
    let rows: Vec<(SpectralParameter, Vec<C64>, Option<C64>)> = points
        .par_iter()
        .map(|p| -> Result<_> {
            match &m {
                Model::Delta(d) => {
                    let w = weyl_scalar(p, &d.q, tol)?.value;
                    let dw = if derivative {
                        Some(weyl_derivative(p, &d.q, tol)?)
                    } else {
                        None
                    };
                    Ok((*p, vec![w], dw))
                }
                Model::General(g) => {
                    let w = weyl_matrix(p, &g.q1, &g.q2, tol)?.entries;
                    Ok((*p, vec![w[0][0], w[0][1], w[1][0], w[1][1]], None))
                }
            }
        })
        .collect::<Result<_>>()?;
    if common.csv {
        let mut csv = match m {
            Model::Delta(_) if derivative => Csv::new(&["lambda_re", "lambda_im", "w_re", "w_im", "dw_re", "dw_im"]),
            Model::Delta(_) => Csv::new(&["lambda_re", "lambda_im", "w_re", "w_im"]),
            Model::General(_) => Csv::new(&[
                "lambda_re",
                "lambda_im",
                "w11_re",
                "w11_im",
                "w12_re",
                "w12_im",
                "w21_re",
                "w21_im",
                "w22_re",
                "w22_im",
            ]),
        };
        for (p, w, dw) in &rows {
            let mut r = vec![f(p.lambda.re), f(p.lambda.im)];
            for z in w.iter().chain(dw.iter()) {
                r.push(f(z.re));
                r.push(f(z.im));
            }
            csv.row(&r);
        }
        return Ok(csv.finish());
    }
    let results: Vec<Value> = rows
        .iter()
        .map(|(p, w, dw)| {
            let mut v = json!({ "lambda": p.lambda, "k": p.k, "boundary_side": p.boundary_side });
            if w.len() == 1 {
                v["value"] = json!(w[0]);
            } else {
                v["entries"] = json!([[w[0], w[1]], [w[2], w[3]]]);
            }
            if let Some(d) = dw {
                v["derivative"] = json!(d);
            }
            v
        })
        .collect();
    Ok(Output::Json {
        model: Some(model_to_json(&m)),
        results: json!(results),
    })
}

/// FD check of one eigenvalue of a delta model.
fn oracle_check(d: &DeltaModel, lambda: C64, k: C64, grid_n: Option<usize>) -> Value {
    let l = if k.im > 0.0 {
        (15.0 / k.im).clamp(20.0, 200.0)
    } else {
        20.0
    };
    let mut n = grid_n.unwrap_or(2001).max((40.0 * l).ceil() as usize + 1);
    if n % 2 == 0 {
        n += 1;
    }
    let run = || -> Result<Value> {
        let grid = FdGrid::new(l, n)?;
        let v = verify_eigenvalue(d, lambda, &grid, None)?;
        let fd = assemble(d, &grid)?.eigenvalue_near(lambda)?.0;
        Ok(json!({
            "grid": { "L": l, "N": n },
            "sigma_min_ratio": v.sigma_min_ratio,
            "fd_eigenvalue": fd,
            "fd_difference": (fd - lambda).norm(),
        }))
    };
    run().unwrap_or_else(|e| json!({ "error": e.kind(), "message": e.to_string() }))
}

fn eigs(common: &Common) -> Result<Output> {
    let m = load_model(common)?;
    let r = region(common)?;
    let eigs = find_eigenvalues(&m, &r, common.tol)?;
    let results: Vec<Value> = eigs
        .par_iter()
        .map(|e| {
            let mut v = json!(e);
            if common.verify {
                v["verification"] = match &m {
                    Model::Delta(d) => oracle_check(d, e.lambda, e.k, common.grid),
                    Model::General(_) => json!({ "skipped": "the oracle covers delta models only" }),
                };
            }
            v
        })
        .collect();
    Ok(Output::Json {
        model: Some(model_to_json(&m)),
        results: json!({ "region": r, "eigenvalues": results }),
    })
}

fn exceptional(common: &Common) -> Result<Output> {
    let (q, echo) = load_potential(common)?;
    let r = region(common)?;
    let pts = find_exceptional_points(&q, &r, common.tol)?;
    Ok(Output::Json {
        model: Some(echo),
        results: json!({ "region": r, "exceptional_points": pts }),
    })
}

fn singularities(common: &Common, k_range: &str, steps: usize) -> Result<Output> {
    let (q, echo) = load_potential(common)?;
    let v = numbers(k_range, "--k-range", 2)?;
    if !(v[0] > 0.0 && v[1] >= v[0]) || steps == 0 {
        return Err(parse_err("--k-range", "need 0 < kmin <= kmax and steps >= 1"));
    }
    let ks: Vec<f64> = (0..steps)
        .map(|j| {
            if steps == 1 {
                v[0]
            } else {
                v[0] + (v[1] - v[0]) * j as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let chunks: Vec<Vec<f64>> = ks.chunks(16).map(|c| c.to_vec()).collect();
    let recs = chunks
        .par_iter()
        .map(|c| singularity_scan(&q, c, common.tol))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    if common.csv {
        let mut csv = Csv::new(&["k", "lambda", "a_re", "a_im", "is_singular"]);
        for r in &recs {
            csv.row(&[
                f(r.k),
                f(r.lambda),
                f(r.a_plus.re),
                f(r.a_plus.im),
                r.is_singular.to_string(),
            ]);
        }
        return Ok(csv.finish());
    }
    Ok(Output::Json {
        model: Some(echo),
        results: json!(recs),
    })
}

fn phase(common: &Common, a_range: &str) -> Result<Output> {
    let (q, echo) = load_potential(common)?;
    let v = numbers(a_range, "--a-range", 4)?;
    let n = common.grid.unwrap_or(41);
    if n == 0 {
        return Err(parse_err("--grid", "must be positive"));
    }
    let grid = PhaseGrid {
        re_min: v[0],
        re_max: v[1],
        im_min: v[2],
        im_max: v[3],
        n_re: n,
        n_im: n,
    };
    let r = region(common)?;
    let pts = grid
        .points()
        .par_iter()
        .map(|&a| phase_point(&q, a, &r, common.tol))
        .collect::<Result<Vec<_>>>()?;
    if common.csv {
        let mut csv = Csv::new(&[
            "a_re",
            "a_im",
            "label",
            "eigenvalues",
            "real_eigenvalues",
            "singularity_lambda",
        ]);
        for p in &pts {
            csv.row(&[
                f(p.a.re),
                f(p.a.im),
                p.label.as_str().to_string(),
                p.eigenvalues.len().to_string(),
                p.real_eigenvalues.to_string(),
                p.singularity.map(f).unwrap_or_default(),
            ]);
        }
        return Ok(csv.finish());
    }
    Ok(Output::Json {
        model: Some(echo),
        results: json!({ "grid": grid, "points": pts }),
    })
}

fn eigenfunction(common: &Common, lambda: &str, side: BoundarySide, x_range: &str) -> Result<Output> {
    let m = load_model(common)?;
    let k = k_from_lambda(complex_arg(lambda, "--lambda")?, side)?;
    let v = numbers(x_range, "--x-range", 2)?;
    let n = common.grid.unwrap_or(201);
    if n < 2 || v[1] <= v[0] {
        return Err(parse_err("--x-range", "need xmin < xmax and --grid >= 2"));
    }
    let xs: Vec<f64> = (0..n)
        .map(|j| v[0] + (v[1] - v[0]) * j as f64 / (n - 1) as f64)
        .collect();
    let funcs = match &m {
        Model::Delta(d) => vec![u_delta(&k, &d.q, common.tol)?],
        Model::General(g) => {
            let (u, w) = basis_general(&k, &g.q1, &g.q2, common.tol)?;
            vec![u, w]
        }
    };
    let rows = xs
        .par_iter()
        .map(|&x| funcs.iter().map(|u| u.value(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if common.csv {
        let mut csv = if funcs.len() == 1 {
            Csv::new(&["x", "re_u", "im_u"])
        } else {
            Csv::new(&["x", "re_u", "im_u", "re_v", "im_v"])
        };
        for (x, r) in xs.iter().zip(&rows) {
            let mut fields = vec![f(*x)];
            for z in r {
                fields.push(f(z.re));
                fields.push(f(z.im));
            }
            csv.row(&fields);
        }
        return Ok(csv.finish());
    }
    let bd = funcs.iter().map(|u| u.boundary_data()).collect::<Result<Vec<_>>>()?;
    let values: Vec<Value> = xs
        .iter()
        .zip(&rows)
        .map(|(x, r)| json!({ "x": x, "values": r }))
        .collect();
    Ok(Output::Json {
        model: Some(model_to_json(&m)),
        results: json!({
            "lambda": k.lambda,
            "k": k.k,
            "kinds": funcs.iter().map(|u| u.kind).collect::<Vec<_>>(),
            "boundary_data": bd,
            "samples": values,
        }),
    })
}

fn verify(common: &Common, lambda: &str, length: f64, candidate: bool, side: BoundarySide) -> Result<Output> {
    let m = load_model(common)?;
    let d = match &m {
        Model::Delta(d) => d,
        Model::General(_) => {
            return Err(Error::Validation {
                path: "$.case".into(),
                message: "the oracle covers delta models only".into(),
            })
        }
    };
    let lam = complex_arg(lambda, "--lambda")?;
    let grid = FdGrid::new(length, common.grid.unwrap_or(2001))?;
    let cand = if candidate {
        let side = if side == BoundarySide::None && lam.im == 0.0 && lam.re > 0.0 {
            BoundarySide::Plus
        } else {
            side
        };
        Some(u_delta(&k_from_lambda(lam, side)?, &d.q, common.tol)?)
    } else {
        None
    };
    let v = verify_eigenvalue(d, lam, &grid, cand.as_ref())?;
    Ok(Output::Json {
        model: Some(model_to_json(&m)),
        results: json!({ "lambda": lam, "grid": grid, "verification": v }),
    })
}
