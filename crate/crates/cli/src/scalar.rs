use std::fmt;
use std::str::FromStr;

use khk_core::field::{is_decimal_literal, parse_rational, q_from_f64, q_to_f64, Q};
use khk_core::{Error, Result};

/// A numeric flag: `1/3` and `-2` are exact, `0.333` and `1e-2` are floating.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Q),
    Float { value: f64, literal: String },
}

impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if is_decimal_literal(s) {
            let value: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
            if !value.is_finite() {
                return Err(format!("{s:?} is not finite"));
            }
            Ok(Scalar::Float { value, literal: s.to_string() })
        } else {
            parse_rational(s).map(Scalar::Exact).map_err(|e| e.to_string())
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float { literal, .. } => f.write_str(literal),
        }
    }
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q_to_f64(q),
            Scalar::Float { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float { .. } => None,
        }
    }

    /// The exact value, or an error naming the flag.
    pub fn require_exact(&self, flag: &str) -> Result<&Q> {
        self.exact()
            .ok_or_else(|| Error::Precondition(format!("--{flag} must be a rational literal such as 1/3, got {self}")))
    }

    /// Exact value of the literal as written; `0.25` gives `1/4`.
    pub fn as_rational(&self) -> Result<Q> {
        match self {
            Scalar::Exact(q) => Ok(q.clone()),
            Scalar::Float { value, literal } => parse_rational(literal).or_else(|_| q_from_f64(*value)),
        }
    }
}
