use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lambda = 0 is the branch point of k = sqrt(lambda)")]
    BranchPoint,
    #[error("lambda = {0} lies on (0, inf); a boundary side (plus/minus) is required")]
    AmbiguousBoundary(f64),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid input at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {tol:e}")]
    Quadrature { estimate: f64, tol: f64 },
    #[error("characteristic function vanishes identically on the search region")]
    DegenerateFamily,
    #[error("a zero lies on a contour after {retries} perturbations")]
    ContourThroughZero { retries: usize },
    #[error("multiplicity index {value} is not close to an integer")]
    NonIntegerIndex { value: f64 },
    #[error("embedded eigenvalue at k = {k} has non-real coupling a = {a_re} + {a_im}i")]
    NonRealCoupling { k: f64, a_re: f64, a_im: f64 },
    #[error("embedded-eigenvalue criterion violated: residual {0:e}")]
    CriterionViolated(f64),
    #[error("pole of the eigenfunction at lambda = -mu^2")]
    Pole,
    #[error("potential parity cannot be decided: {0}")]
    ParityUndecidable(String),
    #[error("lambda = {lambda} is not resolvable on a grid with h = {h}")]
    Resolution { lambda: f64, h: f64 },
    #[error("{0}")]
    Precondition(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable name, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BranchPoint => "BranchPointError",
            Error::AmbiguousBoundary(_) => "AmbiguousBoundaryError",
            Error::Parse { .. } => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Quadrature { .. } => "QuadratureError",
            Error::DegenerateFamily => "DegenerateFamilyError",
            Error::ContourThroughZero { .. } => "ContourThroughZeroError",
            Error::NonIntegerIndex { .. } => "NonIntegerIndexError",
            Error::NonRealCoupling { .. } => "NonRealCouplingError",
            Error::CriterionViolated(_) => "CriterionViolatedError",
            Error::Pole => "PoleError",
            Error::ParityUndecidable(_) => "ParityUndecidableError",
            Error::Resolution { .. } => "ResolutionError",
            Error::Precondition(_) => "PreconditionError",
            Error::NoConvergence(_) => "NoConvergenceError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
