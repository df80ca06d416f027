//! Model description: coupling matrix, potentials, and the spectral parameter.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Which one-sided limit onto `(0, inf)` a real `k` represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundarySide {
    None,
    Plus,
    Minus,
}

/// The pair `(lambda, k)` with `lambda = k^2`, `Im k >= 0`, `k != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParameter {
    pub k: C64,
    pub lambda: C64,
    pub boundary_side: BoundarySide,
}

impl SpectralParameter {
    /// Build from `k`. Real `k` is a boundary point whose side follows its sign.
    pub fn from_k(k: C64) -> Result<Self> {
        if !(k.re.is_finite() && k.im.is_finite()) {
            return Err(Error::validation("k", "must be finite"));
        }
        if k == C64::new(0.0, 0.0) {
            return Err(Error::BranchPoint);
        }
        if k.im < 0.0 {
            return Err(Error::validation("k", "Im k must be >= 0"));
        }
        let boundary_side = if k.im > 0.0 {
            BoundarySide::None
        } else if k.re > 0.0 {
            BoundarySide::Plus
        } else {
            BoundarySide::Minus
        };
        Ok(SpectralParameter {
            k,
            lambda: k * k,
            boundary_side,
        })
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary_side != BoundarySide::None
    }
}

/// Branch map `lambda -> k` with `Im k > 0` off `[0, inf)`.
///
/// On `(0, inf)` the side hint selects `k = +sqrt(lambda)` or `-sqrt(lambda)`.
pub fn k_from_lambda(lambda: C64, side: BoundarySide) -> Result<SpectralParameter> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::validation("lambda", "must be finite"));
    }
    if lambda == C64::new(0.0, 0.0) {
        return Err(Error::BranchPoint);
    }
    if lambda.im == 0.0 && lambda.re > 0.0 {
        let r = lambda.re.sqrt();
        let k = match side {
            BoundarySide::Plus => r,
            BoundarySide::Minus => -r,
            BoundarySide::None => return Err(Error::AmbiguousBoundary(lambda.re)),
        };
        return Ok(SpectralParameter {
            k: C64::new(k, 0.0),
            lambda,
            boundary_side: side,
        });
    }
    let mut k = lambda.sqrt();
    if k.im < 0.0 {
        k = -k;
    }
    // Negative reals: sqrt gives +i·sqrt|lambda| exactly, already Im k > 0.
    Ok(SpectralParameter {
        k,
        lambda,
        boundary_side: BoundarySide::None,
    })
}

/// Entries of the coupling matrix `T = [[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl CouplingMatrix {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        CouplingMatrix { a, b, c, d }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// `T^*` (conjugate transpose).
    pub fn adjoint(&self) -> Self {
        CouplingMatrix::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }
}

/// Piecewise-linear samples, zero outside `[nodes[0], nodes[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    nodes: Vec<f64>,
    values: Vec<C64>,
}

impl SampledPotential {
    pub fn new(nodes: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::validation("nodes", "need at least 2 nodes"));
        }
        if nodes.len() != values.len() {
            return Err(Error::validation("values", "length must match nodes"));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("nodes", "must be finite"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::validation("values", "must be finite"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation("nodes", "must be strictly increasing"));
        }
        Ok(SampledPotential { nodes, values })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> C64 {
        let n = &self.nodes;
        if x < n[0] || x > n[n.len() - 1] {
            return C64::new(0.0, 0.0);
        }
        let j = n.partition_point(|&t| t <= x).clamp(1, n.len() - 1);
        let (x0, x1) = (n[j - 1], n[j]);
        let t = (x - x0) / (x1 - x0);
        self.values[j - 1] * (1.0 - t) + self.values[j] * t
    }
}

/// The potential `q` entering the nonlocal interaction.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    /// `Z` on `[-rho, rho]`.
    BoxEven {
        z: f64,
        rho: f64,
    },
    /// `Z sign(x)` on `[-rho, rho]`.
    BoxOddSign {
        z: C64,
        rho: f64,
    },
    /// `c e^{-mu |x|}`.
    ExpEven {
        c: C64,
        mu: f64,
    },
    Sampled(SampledPotential),
}

/// `coef * e^{rate s}` on `[lo, hi]`; ends may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub coef: C64,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Potential {
    pub fn box_even(z: f64, rho: f64) -> Result<Self> {
        check_positive("rho", rho)?;
        check_finite("Z", z)?;
        Ok(Potential::BoxEven { z, rho })
    }

    pub fn box_odd_sign(z: C64, rho: f64) -> Result<Self> {
        check_positive("rho", rho)?;
        check_finite("Z", z.re)?;
        check_finite("Z", z.im)?;
        Ok(Potential::BoxOddSign { z, rho })
    }

    pub fn exp_even(c: C64, mu: f64) -> Result<Self> {
        check_positive("mu", mu)?;
        check_finite("c", c.re)?;
        check_finite("c", c.im)?;
        Ok(Potential::ExpEven { c, mu })
    }

    pub fn sampled(nodes: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        Ok(Potential::Sampled(SampledPotential::new(nodes, values)?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::BoxEven { z, .. } => *z == 0.0,
            Potential::BoxOddSign { z, .. } => *z == C64::new(0.0, 0.0),
            Potential::ExpEven { c, .. } => *c == C64::new(0.0, 0.0),
            Potential::Sampled(s) => s.values.iter().all(|v| *v == C64::new(0.0, 0.0)),
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, Potential::Sampled(_))
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Potential::Zero => C64::new(0.0, 0.0),
            Potential::BoxEven { z, rho } => {
                if x.abs() <= *rho {
                    C64::new(*z, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Potential::BoxOddSign { z, rho } => {
                if x.abs() <= *rho && x != 0.0 {
                    *z * x.signum()
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Potential::ExpEven { c, mu } => *c * (-mu * x.abs()).exp(),
            Potential::Sampled(s) => s.eval(x),
        }
    }

    /// Pointwise complex conjugate `q*`.
    pub fn conj(&self) -> Potential {
        match self {
            Potential::Zero => Potential::Zero,
            Potential::BoxEven { z, rho } => Potential::BoxEven { z: *z, rho: *rho },
            Potential::BoxOddSign { z, rho } => Potential::BoxOddSign { z: z.conj(), rho: *rho },
            Potential::ExpEven { c, mu } => Potential::ExpEven { c: c.conj(), mu: *mu },
            Potential::Sampled(s) => Potential::Sampled(SampledPotential {
                nodes: s.nodes.clone(),
                values: s.values.iter().map(|v| v.conj()).collect(),
            }),
        }
    }

    /// Smallest `R` with `q = 0` outside `[-R, R]`; `None` for non-compact support.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Potential::Zero => Some(0.0),
            Potential::BoxEven { rho, .. } | Potential::BoxOddSign { rho, .. } => Some(*rho),
            Potential::ExpEven { .. } => None,
            Potential::Sampled(s) => Some(s.nodes[0].abs().max(s.nodes[s.nodes.len() - 1].abs())),
        }
    }

    /// Points where `q` is not smooth (quadrature panel boundaries).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Potential::Zero => vec![],
            Potential::BoxEven { rho, .. } | Potential::BoxOddSign { rho, .. } => {
                vec![-rho, 0.0, *rho]
            }
            Potential::ExpEven { .. } => vec![0.0],
            Potential::Sampled(s) => s.nodes.clone(),
        }
    }

    /// `[lo, hi]` outside of which `q` vanishes (possibly infinite).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Potential::Zero => (0.0, 0.0),
            Potential::BoxEven { rho, .. } | Potential::BoxOddSign { rho, .. } => (-rho, *rho),
            Potential::ExpEven { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Potential::Sampled(s) => (s.nodes[0], s.nodes[s.nodes.len() - 1]),
        }
    }

    /// Exponential-piece decomposition; `None` for sampled data.
    pub(crate) fn pieces(&self) -> Option<Vec<Piece>> {
        let p = |coef: C64, rate: f64, lo: f64, hi: f64| Piece { coef, rate, lo, hi };
        Some(match self {
            Potential::Zero => vec![],
            Potential::BoxEven { z, rho } => {
                let z = C64::new(*z, 0.0);
                vec![p(z, 0.0, -rho, 0.0), p(z, 0.0, 0.0, *rho)]
            }
            Potential::BoxOddSign { z, rho } => vec![p(-*z, 0.0, -rho, 0.0), p(*z, 0.0, 0.0, *rho)],
            Potential::ExpEven { c, mu } => vec![p(*c, *mu, f64::NEG_INFINITY, 0.0), p(*c, -*mu, 0.0, f64::INFINITY)],
            Potential::Sampled(_) => return None,
        })
    }
}

fn check_positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(path, "must be a positive finite real"))
    }
}

fn check_finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, "must be finite"))
    }
}

/// `H_a`: the delta-type model with scalar coupling `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaModel {
    pub a: C64,
    pub q: Potential,
}

/// `H_T`: coupling matrix `T` with two potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralModel {
    pub t: CouplingMatrix,
    pub q1: Potential,
    pub q2: Potential,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Delta(DeltaModel),
    General(GeneralModel),
}

impl DeltaModel {
    pub fn new(a: C64, q: Potential) -> Self {
        DeltaModel { a, q }
    }
}

/// `T = [[a, 0], [0, 0]]`, `q1 = q`, `q2 = 0`.
pub fn delta_to_general(m: &DeltaModel) -> GeneralModel {
    let zero = C64::new(0.0, 0.0);
    GeneralModel {
        t: CouplingMatrix::new(m.a, zero, zero, zero),
        q1: m.q.clone(),
        q2: Potential::Zero,
    }
}

impl Model {
    pub fn to_general(&self) -> GeneralModel {
        match self {
            Model::Delta(d) => delta_to_general(d),
            Model::General(g) => g.clone(),
        }
    }

    pub fn as_delta(&self) -> Option<&DeltaModel> {
        match self {
            Model::Delta(d) => Some(d),
            Model::General(_) => None,
        }
    }

    pub fn coupling_norm(&self) -> f64 {
        match self {
            Model::Delta(d) => d.a.norm(),
            Model::General(g) => g.t.norm(),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

use serde_json::Value;

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(format!("{path}.{key}"), "missing field"))
}

fn real(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::parse(path, "expected a number"))
}

/// `[re, im]`; a bare number is read as a real.
pub fn parse_complex(v: &Value, path: &str) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(C64::new(
            real(re, &format!("{path}[0]"))?,
            real(im, &format!("{path}[1]"))?,
        )),
        _ => Err(Error::parse(path, "expected [re, im]")),
    }
}

/// Parse a potential object (`{"kind": ..., ...}`).
pub fn parse_potential(v: &Value, path: &str) -> Result<Potential> {
    if !v.is_object() {
        return Err(Error::parse(path, "expected an object"));
    }
    let kind = field(v, "kind", path)?
        .as_str()
        .ok_or_else(|| Error::parse(format!("{path}.kind"), "expected a string"))?;
    let sub = |k: &str| format!("{path}.{k}");
    match kind {
        "zero" => Ok(Potential::Zero),
        "box_even" => {
            let z = parse_complex(field(v, "Z", path)?, &sub("Z"))?;
            if z.im != 0.0 {
                return Err(Error::validation(sub("Z"), "box_even requires a real amplitude"));
            }
            let rho = real(field(v, "rho", path)?, &sub("rho"))?;
            Potential::box_even(z.re, rho).map_err(|e| prefix(e, path))
        }
        "box_odd_sign" => {
            let z = parse_complex(field(v, "Z", path)?, &sub("Z"))?;
            let rho = real(field(v, "rho", path)?, &sub("rho"))?;
            Potential::box_odd_sign(z, rho).map_err(|e| prefix(e, path))
        }
        "exp_even" => {
            let c = parse_complex(field(v, "c", path)?, &sub("c"))?;
            let mu = real(field(v, "mu", path)?, &sub("mu"))?;
            Potential::exp_even(c, mu).map_err(|e| prefix(e, path))
        }
        "sampled" => {
            let nodes = field(v, "nodes", path)?
                .as_array()
                .ok_or_else(|| Error::parse(sub("nodes"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, x)| real(x, &format!("{path}.nodes[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let values = field(v, "values", path)?
                .as_array()
                .ok_or_else(|| Error::parse(sub("values"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, x)| parse_complex(x, &format!("{path}.values[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Potential::sampled(nodes, values).map_err(|e| prefix(e, path))
        }
        other => Err(Error::parse(sub("kind"), format!("unknown kind {other:?}"))),
    }
}

fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::Validation { path: p, message } => Error::Validation {
            path: format!("{path}.{p}"),
            message,
        },
        other => other,
    }
}

/// Parse a model document (JSON text).
pub fn parse_model(text: &str) -> Result<Model> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))?;
    parse_model_value(&v)
}

pub fn parse_model_value(v: &Value) -> Result<Model> {
    let case = field(v, "case", "$")?
        .as_str()
        .ok_or_else(|| Error::parse("$.case", "expected a string"))?;
    match case {
        "delta" => {
            let a = parse_complex(field(v, "a", "$")?, "$.a")?;
            let q = match v.get("q") {
                Some(q) => parse_potential(q, "$.q")?,
                None => Potential::Zero,
            };
            Ok(Model::Delta(DeltaModel { a, q }))
        }
        "general" => {
            let t = field(v, "T", "$")?;
            let e = |k: &str| parse_complex(field(t, k, "$.T")?, &format!("$.T.{k}"));
            let t = CouplingMatrix::new(e("a")?, e("b")?, e("c")?, e("d")?);
            let pot = |k: &str| match v.get(k) {
                Some(q) => parse_potential(q, &format!("$.{k}")),
                None => Ok(Potential::Zero),
            };
            Ok(Model::General(GeneralModel {
                t,
                q1: pot("q1")?,
                q2: pot("q2")?,
            }))
        }
        other => Err(Error::parse("$.case", format!("unknown case {other:?}"))),
    }
}

/// Model document in the input schema (complex numbers as `[re, im]`).
pub fn model_to_json(m: &Model) -> Value {
    use serde_json::json;
    let cx = |z: C64| json!([z.re, z.im]);
    let pot = |q: &Potential| match q {
        Potential::Zero => json!({"kind": "zero"}),
        Potential::BoxEven { z, rho } => json!({"kind": "box_even", "Z": z, "rho": rho}),
        Potential::BoxOddSign { z, rho } => json!({"kind": "box_odd_sign", "Z": cx(*z), "rho": rho}),
        Potential::ExpEven { c, mu } => json!({"kind": "exp_even", "c": cx(*c), "mu": mu}),
        Potential::Sampled(s) => json!({
            "kind": "sampled",
            "nodes": s.nodes(),
            "values": s.values().iter().map(|v| cx(*v)).collect::<Vec<_>>(),
        }),
    };
    match m {
        Model::Delta(d) => json!({"case": "delta", "a": cx(d.a), "q": pot(&d.q)}),
        Model::General(g) => json!({
            "case": "general",
            "T": {"a": cx(g.t.a), "b": cx(g.t.b), "c": cx(g.t.c), "d": cx(g.t.d)},
            "q1": pot(&g.q1),
            "q2": pot(&g.q2),
        }),
    }
}
