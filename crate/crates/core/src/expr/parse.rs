//! Expression trees, a recursive-descent parser, a printer and generic evaluation.
//!
//! Grammar (precedence high to low): `^` (right-assoc, nonnegative integer
//! exponents), unary `-`, `*` `/`, `+` `-`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::rfn::RationalFn2;
use super::upoly::URat;
use crate::error::{Error, Result};
use crate::field::{parse_rational, QuadExt, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    T,
    U,
    V,
    Eps,
    H,
}

impl Var {
    pub const ALL: [Var; 7] = [Var::X, Var::Y, Var::T, Var::U, Var::V, Var::Eps, Var::H];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
            Var::Eps => "eps",
            Var::H => "h",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(Var),
    Num(Q),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Sqrt(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn perr<T>(offset: usize, message: impl Into<String>) -> std::result::Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

/// Allowed variables, sqrt permission and named sub-expressions.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    pub vars: Vec<Var>,
    pub allow_sqrt: bool,
    pub macros: BTreeMap<String, Expr>,
}

impl Grammar {
    pub fn new(vars: &[Var], allow_sqrt: bool) -> Self {
        Grammar { vars: vars.to_vec(), allow_sqrt, macros: BTreeMap::new() }
    }

    /// Bind an identifier to an expression that is inlined wherever it occurs.
    pub fn with_macro(mut self, name: &str, e: Expr) -> Self {
        self.macros.insert(name.to_string(), e);
        self
    }

    pub fn parse(&self, src: &str) -> std::result::Result<Expr, ParseError> {
        if src.trim().is_empty() {
            return perr(0, "empty expression");
        }
        let mut p = Parser { src: src.as_bytes(), pos: 0, g: self };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return perr(p.pos, format!("unexpected {:?}", p.src[p.pos] as char));
        }
        Ok(e.normalize())
    }
}

pub fn parse_expr(src: &str, allowed: &[Var], allow_sqrt: bool) -> std::result::Result<Expr, ParseError> {
    Grammar::new(allowed, allow_sqrt).parse(src)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    g: &'a Grammar,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let n = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    /// Right-associative chain of integer literals.
    fn exponent(&mut self) -> std::result::Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let n = if self.eat(b'(') {
            let e = self.expr()?;
            if !self.eat(b')') {
                return perr(self.pos, "expected ')'");
            }
            match e.normalize() {
                Expr::Num(v) => v,
                _ => return perr(start, "exponent must be a nonnegative integer"),
            }
        } else if self.peek() == Some(b'-') {
            return perr(start, "negative exponent");
        } else if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.number()?
        } else {
            return perr(start, "exponent must be a nonnegative integer");
        };
        if n.is_negative() {
            return perr(start, "negative exponent");
        }
        if !n.is_integer() {
            return perr(start, "non-integer exponent");
        }
        let Some(mut k) = n.to_integer().to_u32() else {
            return perr(start, "exponent too large");
        };
        if self.eat(b'^') {
            let inner = self.exponent()?;
            k = k.checked_pow(inner).ok_or(ParseError { offset: start, message: "exponent too large".into() })?;
        }
        Ok(k)
    }

    fn number(&mut self) -> std::result::Result<Q, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        parse_rational(text).or_else(|_| perr(start, format!("bad number {text:?}")))
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        let Some(c) = self.peek() else {
            return perr(self.pos, "unexpected end of input");
        };
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(b')') {
                return perr(self.pos, "expected ')'");
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return Ok(Expr::Num(self.number()?));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            if name == "sqrt" {
                if !self.g.allow_sqrt {
                    return perr(start, "sqrt is not allowed here");
                }
                if !self.eat(b'(') {
                    return perr(self.pos, "expected '(' after sqrt");
                }
                let e = self.expr()?;
                if !self.eat(b')') {
                    return perr(self.pos, "expected ')'");
                }
                return Ok(Expr::Sqrt(Box::new(e)));
            }
            if let Some(m) = self.g.macros.get(name) {
                return Ok(m.clone());
            }
            return match Var::from_name(name) {
                Some(v) if self.g.vars.contains(&v) => Ok(Expr::Var(v)),
                _ => perr(start, format!("unknown variable {name:?}")),
            };
        }
        perr(self.pos, format!("unexpected {:?}", c as char))
    }
}

impl Expr {
    pub fn num(v: Q) -> Self {
        Expr::Num(v)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    /// Fold `-literal` and `literal/literal` bottom-up.
    pub fn normalize(self) -> Expr {
        use Expr::*;
        match self {
            Neg(a) => match a.normalize() {
                Num(v) => Num(-v),
                a => Neg(Box::new(a)),
            },
            Div(a, b) => match (a.normalize(), b.normalize()) {
                (Num(p), Num(q)) if !q.is_zero() => Num(p / q),
                (a, b) => Div(Box::new(a), Box::new(b)),
            },
            Add(a, b) => Add(Box::new(a.normalize()), Box::new(b.normalize())),
            Sub(a, b) => Sub(Box::new(a.normalize()), Box::new(b.normalize())),
            Mul(a, b) => Mul(Box::new(a.normalize()), Box::new(b.normalize())),
            Pow(a, n) => Pow(Box::new(a.normalize()), n),
            Sqrt(a) => Sqrt(Box::new(a.normalize())),
            e => e,
        }
    }

    pub fn has_sqrt(&self) -> bool {
        use Expr::*;
        match self {
            Var(_) | Num(_) => false,
            Sqrt(_) => true,
            Neg(a) | Pow(a, _) => a.has_sqrt(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.has_sqrt() || b.has_sqrt(),
        }
    }

    pub fn uses(&self, v: Var) -> bool {
        use Expr::*;
        match self {
            Var(w) => *w == v,
            Num(_) => false,
            Neg(a) | Pow(a, _) | Sqrt(a) => a.uses(v),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.uses(v) || b.uses(v),
        }
    }

    /// Replace variables by expressions.
    pub fn subst(&self, f: &dyn Fn(Var) -> Option<Expr>) -> Expr {
        use Expr::*;
        let b = |e: &Expr| Box::new(e.subst(f));
        match self {
            Var(v) => f(*v).unwrap_or(Var(*v)),
            Num(v) => Num(v.clone()),
            Add(x, y) => Add(b(x), b(y)),
            Sub(x, y) => Sub(b(x), b(y)),
            Mul(x, y) => Mul(b(x), b(y)),
            Div(x, y) => Div(b(x), b(y)),
            Neg(x) => Neg(b(x)),
            Pow(x, n) => Pow(b(x), *n),
            Sqrt(x) => Sqrt(b(x)),
        }
    }

    fn level(&self) -> u8 {
        use Expr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            Num(v) if v.is_negative() || !v.is_integer() => 0,
            Var(_) | Num(_) | Sqrt(_) => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        // Wrap `e` in parentheses unless its level is at least `min`.
        fn sub(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if e.level() >= min {
                write!(f, "{e}")
            } else {
                write!(f, "({e})")
            }
        }
        match self {
            Var(v) => write!(f, "{}", v.name()),
            Num(v) => write!(f, "{v}"),
            Add(a, b) => {
                sub(f, a, 1)?;
                write!(f, " + ")?;
                sub(f, b, 2)
            }
            Sub(a, b) => {
                sub(f, a, 1)?;
                write!(f, " - ")?;
                sub(f, b, 2)
            }
            Mul(a, b) => {
                sub(f, a, 2)?;
                write!(f, "*")?;
                sub(f, b, 4)
            }
            Div(a, b) => {
                sub(f, a, 2)?;
                write!(f, "/")?;
                sub(f, b, 4)
            }
            Neg(a) => {
                write!(f, "-")?;
                sub(f, a, 4)
            }
            Pow(a, n) => {
                sub(f, a, 5)?;
                write!(f, "^{n}")
            }
            Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

/// Targets an [`Expr`] can be evaluated into.
pub trait ExprAlgebra: Sized + Clone {
    fn num(v: &Q) -> Result<Self>;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn div(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Result<Self>;
    fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::num(&Q::from_integer(1.into()))?;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
    fn sqrt(&self) -> Result<Self>;
}

/// Evaluate with variable values supplied by `env`.
pub fn eval<A: ExprAlgebra>(e: &Expr, env: &dyn Fn(Var) -> Option<A>) -> Result<A> {
    use Expr::*;
    match e {
        Var(v) => env(*v).ok_or_else(|| Error::Domain(format!("variable {} has no value", v.name()))),
        Num(v) => A::num(v),
        Add(a, b) => eval(a, env)?.add(&eval(b, env)?),
        Sub(a, b) => eval(a, env)?.sub(&eval(b, env)?),
        Mul(a, b) => eval(a, env)?.mul(&eval(b, env)?),
        Div(a, b) => eval(a, env)?.div(&eval(b, env)?),
        Neg(a) => eval(a, env)?.neg(),
        Pow(a, n) => eval(a, env)?.pow(*n),
        Sqrt(a) => eval(a, env)?.sqrt(),
    }
}

impl ExprAlgebra for f64 {
    fn num(v: &Q) -> Result<Self> {
        Ok(crate::field::q_to_f64(v))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if *o == 0.0 {
            return Err(Error::DivisionByZero("floating division".into()));
        }
        Ok(self / o)
    }
    fn neg(&self) -> Result<Self> {
        Ok(-self)
    }
    fn pow(&self, n: u32) -> Result<Self> {
        Ok(self.powi(n as i32))
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(Error::Domain(format!("square root of negative value {self}")));
        }
        Ok(f64::sqrt(*self))
    }
}

impl ExprAlgebra for Q {
    fn num(v: &Q) -> Result<Self> {
        Ok(v.clone())
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero("rational division".into()));
        }
        Ok(self / o)
    }
    fn neg(&self) -> Result<Self> {
        Ok(-self)
    }
    fn sqrt(&self) -> Result<Self> {
        crate::field::rational_sqrt(self).ok_or(Error::SqrtNotAllowed)
    }
}

impl ExprAlgebra for QuadExt {
    fn num(v: &Q) -> Result<Self> {
        Ok(QuadExt::rational(v.clone()))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        self.try_add(o).map_err(Error::Domain)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        self.try_sub(o).map_err(Error::Domain)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        self.try_mul(o).map_err(Error::Domain)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if crate::field::Field::is_zero(o) {
            return Err(Error::DivisionByZero("division in Q(sqrt r)".into()));
        }
        self.try_div(o).map_err(Error::Domain)
    }
    fn neg(&self) -> Result<Self> {
        Ok(crate::field::Field::neg(self))
    }
    fn sqrt(&self) -> Result<Self> {
        self.try_sqrt().map_err(Error::Domain)
    }
}

/// Univariate rational functions in `t` over `Q(√r)`; sqrt only of constants.
impl ExprAlgebra for URat<QuadExt> {
    fn num(v: &Q) -> Result<Self> {
        Ok(URat::constant(QuadExt::rational(v.clone())))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(URat::add(self, o))
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(URat::sub(self, o))
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(URat::mul(self, o))
    }
    fn div(&self, o: &Self) -> Result<Self> {
        URat::div(self, o).ok_or_else(|| Error::DivisionByZero("division by the zero function".into()))
    }
    fn neg(&self) -> Result<Self> {
        Ok(URat::neg(self))
    }
    fn pow(&self, n: u32) -> Result<Self> {
        Ok(URat::pow(self, n))
    }
    fn sqrt(&self) -> Result<Self> {
        match self.constant_value() {
            Some(c) => Ok(URat::constant(c.try_sqrt().map_err(Error::Domain)?)),
            None => Err(Error::SqrtNotAllowed),
        }
    }
}

impl ExprAlgebra for RationalFn2 {
    fn num(v: &Q) -> Result<Self> {
        Ok(RationalFn2::constant(v.clone()))
    }
    fn add(&self, o: &Self) -> Result<Self> {
        Ok(RationalFn2::add(self, o))
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Ok(RationalFn2::sub(self, o))
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(RationalFn2::mul(self, o))
    }
    fn div(&self, o: &Self) -> Result<Self> {
        RationalFn2::div(self, o)
    }
    fn neg(&self) -> Result<Self> {
        Ok(RationalFn2::neg(self))
    }
    fn pow(&self, n: u32) -> Result<Self> {
        Ok(RationalFn2::pow(self, n))
    }
    fn sqrt(&self) -> Result<Self> {
        Err(Error::SqrtNotAllowed)
    }
}

/// Reduced rational function in `x, y`; other variables are taken from `consts`.
pub fn to_rfn_with(e: &Expr, consts: &[(Var, Q)]) -> Result<RationalFn2> {
    if e.has_sqrt() {
        return Err(Error::SqrtNotAllowed);
    }
    eval(e, &|v| match v {
        Var::X => Some(RationalFn2::x()),
        Var::Y => Some(RationalFn2::y()),
        _ => consts.iter().find(|(w, _)| *w == v).map(|(_, c)| RationalFn2::constant(c.clone())),
    })
}

pub fn expr_to_rationalfn(e: &Expr) -> Result<RationalFn2> {
    to_rfn_with(e, &[])
}

/// Floating value with the given variable assignment.
pub fn eval_f64(e: &Expr, vals: &[(Var, f64)]) -> Result<f64> {
    eval(e, &|v| vals.iter().find(|(w, _)| *w == v).map(|(_, c)| *c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::poly::Poly2;
    use crate::field::{q, qi};
    use proptest::prelude::*;

    const XY: &[Var] = &[Var::X, Var::Y];

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2", XY, false).unwrap();
        assert_eq!(e, Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var(Var::X)), 2))));
        let f = expr_to_rationalfn(&parse_expr("2^3^2", XY, false).unwrap()).unwrap();
        assert_eq!(f, RationalFn2::constant(qi(512)));
        let g = expr_to_rationalfn(&parse_expr("1 - 2 - 3", XY, false).unwrap()).unwrap();
        assert_eq!(g, RationalFn2::constant(qi(-4)));
        let h = expr_to_rationalfn(&parse_expr("12/2/3", XY, false).unwrap()).unwrap();
        assert_eq!(h, RationalFn2::constant(qi(2)));
    }

    #[test]
    fn field_component_expands() {
        let f = expr_to_rationalfn(&parse_expr("x*(1+2*y)", XY, false).unwrap()).unwrap();
        assert_eq!(f.num(), &Poly2::from_int_terms(&[(1, 0, 1), (1, 1, 2)]));
        let z = parse_expr("0", XY, false).unwrap();
        assert_eq!(z, Expr::Num(qi(0)));
        let s1 = expr_to_rationalfn(&parse_expr("-y+x^2-y^2", XY, false).unwrap()).unwrap();
        assert_eq!(s1.num(), &Poly2::from_int_terms(&[(0, 1, -1), (2, 0, 1), (0, 2, -1)]));
    }

    #[test]
    fn cancellation() {
        let one = expr_to_rationalfn(&parse_expr("x/x", XY, false).unwrap()).unwrap();
        assert_eq!(one, RationalFn2::constant(qi(1)));
        let s = expr_to_rationalfn(&parse_expr("(x^2-y^2)/(x-y)", XY, false).unwrap()).unwrap();
        assert_eq!(s, RationalFn2::from_poly(Poly2::from_int_terms(&[(1, 0, 1), (0, 1, 1)])));
        let h1 = expr_to_rationalfn(&parse_expr("(x^2+y^2)/(1+2*y)", XY, false).unwrap()).unwrap();
        assert_eq!(h1.den(), &Poly2::from_int_terms(&[(0, 1, 2), (0, 0, 1)]));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_expr("x + z", XY, false).unwrap_err().offset, 4);
        assert_eq!(parse_expr("x ^ -1", XY, false).unwrap_err().message, "negative exponent");
        assert!(parse_expr("x^(1/2)", XY, false).unwrap_err().message.contains("non-integer"));
        assert!(parse_expr("x^y", XY, false).is_err());
        assert_eq!(parse_expr("sqrt(x)", XY, false).unwrap_err().offset, 0);
        assert!(parse_expr("(x", XY, false).is_err());
        assert!(parse_expr("x y", XY, false).is_err());
        assert!(parse_expr("", XY, false).is_err());
        assert!(expr_to_rationalfn(&parse_expr("1/(x-x)", XY, false).unwrap()).is_err());
    }

    #[test]
    fn sqrt_evaluates() {
        let e = parse_expr("sqrt(x^2+y^2)", XY, true).unwrap();
        assert!(expr_to_rationalfn(&e).is_err());
        let v = eval_f64(&e, &[(Var::X, 3.0), (Var::Y, 4.0)]).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn macros_inline() {
        let g = Grammar::new(&[Var::H], true).with_macro("m", parse_expr("sqrt(h)", &[Var::H], true).unwrap());
        let e = g.parse("m^2 + 1").unwrap();
        let v: QuadExt = eval(&e, &|_| Some(QuadExt::rational(qi(2)))).unwrap();
        assert_eq!(v, QuadExt::rational(qi(3)));
    }

    #[test]
    fn decimal_literal_is_exact() {
        let e = parse_expr("0.25*x", XY, false).unwrap();
        let f = expr_to_rationalfn(&e).unwrap();
        assert_eq!(f.num().coeff(1, 0), q(1, 4));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            prop::sample::select(vec![Var::X, Var::Y, Var::Eps]).prop_map(Expr::Var),
            (-20i64..20, 1i64..6).prop_map(|(n, d)| Expr::Num(q(n, d))),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), 0u32..4).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
                inner.prop_map(|a| Expr::Sqrt(Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(e in arb_expr()) {
            let e = e.normalize();
            let text = e.to_string();
            let back = parse_expr(&text, &[Var::X, Var::Y, Var::Eps], true).unwrap();
            prop_assert_eq!(back, e, "printed as {}", text);
        }
    }
}
