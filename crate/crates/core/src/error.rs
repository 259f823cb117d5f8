use thiserror::Error;

use crate::expr::parse::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("denominator of component {component} vanishes at ({x}, {y})")]
    Pole { component: usize, x: String, y: String },
    #[error("I - eps*DX is identically singular: det = {0}")]
    SingularKhk(String),
    #[error("expression contains sqrt where a rational function is required")]
    SqrtNotAllowed,
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("point is not on the curve: {0}")]
    NotOnCurve(String),
    #[error("curve is not preserved by the map: {0}")]
    CurveNotPreserved(String),
    #[error("Moebius validation failed: {0}")]
    MoebiusValidation(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("orbit aborted: {0}")]
    Orbit(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable short identifier used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::DivisionByZero(_) => "division_by_zero",
            Error::Pole { .. } => "pole",
            Error::SingularKhk(_) => "singular_khk",
            Error::SqrtNotAllowed => "sqrt_not_allowed",
            Error::Catalog(_) => "catalog",
            Error::NotOnCurve(_) => "not_on_curve",
            Error::CurveNotPreserved(_) => "curve_not_preserved",
            Error::MoebiusValidation(_) => "moebius_validation",
            Error::Degenerate(_) => "degenerate",
            Error::Precondition(_) => "precondition",
            Error::Domain(_) => "domain",
            Error::Orbit(_) => "orbit",
            Error::Io(_) => "io",
        }
    }
}
