//! Scalar fields used by the exact layer: the rationals and single
//! square-root extensions `Q(√r)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(v: &Q) -> f64 {
    ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

/// Exact rational value of a finite double (every double is dyadic).
pub fn q_from_f64(v: f64) -> Result<Q> {
    Q::from_float(v).ok_or_else(|| Error::Domain(format!("non-finite value {v}")))
}

/// Parse `p`, `p/q` or a decimal literal like `-2.49999` into an exact rational.
pub fn parse_rational(src: &str) -> Result<Q> {
    let s = src.trim();
    let bad = || Error::Domain(format!("not a rational literal: {src:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero(format!("literal {src:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() + frac.len() == 0 {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = Q::new(n, d);
    Ok(if neg { -v } else { v })
}

/// True when the literal is written as a decimal (floating input).
pub fn is_decimal_literal(src: &str) -> bool {
    src.contains('.') || src.contains('e') || src.contains('E')
}

/// Rational square root when `v` is a perfect square.
pub fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().to_biguint()?;
    let d = v.denom().to_biguint()?;
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &rn * &rn == n && &rd * &rd == d {
        Some(Q::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

/// Largest bit length among numerator and denominator.
pub fn q_bits(v: &Q) -> u64 {
    v.numer().bits().max(v.denom().bits())
}

pub fn q_gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// Arithmetic needed by the generic polynomial containers.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    fn from_q(v: &Q) -> Self;
    fn to_f64(&self) -> f64;

    /// Sign flag and magnitude text used when printing a polynomial term.
    fn term_coeff(&self) -> (bool, String) {
        (false, format!("({self})"))
    }

    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_q(v: &Q) -> Self {
        v.clone()
    }
    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }
    fn term_coeff(&self) -> (bool, String) {
        let neg = self.is_negative();
        let abs = self.abs();
        let text = if abs.is_integer() { abs.to_string() } else { format!("({abs})") };
        (neg, text)
    }
}

/// Element `a + b·√r` of `Q(√r)`.
///
/// Pure rationals carry `b = 0` and may have any radicand; two elements with
/// nonzero `b` must share the radicand up to a rational square factor.
#[derive(Clone, Debug)]
pub struct QuadExt {
    pub a: Q,
    pub b: Q,
    pub r: Q,
}

impl QuadExt {
    pub fn rational(a: Q) -> Self {
        QuadExt { a, b: <Q as Zero>::zero(), r: <Q as Zero>::zero() }
    }

    /// `√v`, rational when `v` is a perfect square.
    pub fn sqrt_of(v: &Q) -> Result<Self> {
        if v.is_negative() {
            return Err(Error::Domain(format!("square root of negative value {v}")));
        }
        if let Some(s) = rational_sqrt(v) {
            return Ok(Self::rational(s));
        }
        Ok(QuadExt { a: <Q as Zero>::zero(), b: <Q as One>::one(), r: v.clone() })
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }

    pub fn radicand(&self) -> Option<&Q> {
        if Zero::is_zero(&self.b) {
            None
        } else {
            Some(&self.r)
        }
    }

    /// Rewrite `o` over the radicand of `self` when both are irrational.
    fn align(&self, o: &Self) -> std::result::Result<(Q, Q, Q), String> {
        if Zero::is_zero(&self.b) {
            return Ok((o.a.clone(), o.b.clone(), o.r.clone()));
        }
        if Zero::is_zero(&o.b) || self.r == o.r {
            return Ok((o.a.clone(), o.b.clone(), self.r.clone()));
        }
        match rational_sqrt(&(&o.r / &self.r)) {
            Some(s) => Ok((o.a.clone(), &o.b * s, self.r.clone())),
            None => Err(format!("incompatible radicands {} and {}", self.r, o.r)),
        }
    }

    pub fn try_add(&self, o: &Self) -> std::result::Result<Self, String> {
        let (oa, ob, r) = self.align(o)?;
        Ok(QuadExt { a: &self.a + oa, b: &self.b + ob, r }.tidy())
    }

    pub fn try_sub(&self, o: &Self) -> std::result::Result<Self, String> {
        let (oa, ob, r) = self.align(o)?;
        Ok(QuadExt { a: &self.a - oa, b: &self.b - ob, r }.tidy())
    }

    pub fn try_mul(&self, o: &Self) -> std::result::Result<Self, String> {
        let (oa, ob, r) = self.align(o)?;
        let a = &self.a * &oa + &self.b * &ob * &r;
        let b = &self.a * &ob + &self.b * &oa;
        Ok(QuadExt { a, b, r }.tidy())
    }

    pub fn try_div(&self, o: &Self) -> std::result::Result<Self, String> {
        if o.is_zero() {
            return Err("division by zero".into());
        }
        self.try_mul(&o.inv())
    }

    /// `√self` for rational `self`.
    pub fn try_sqrt(&self) -> std::result::Result<Self, String> {
        if !Zero::is_zero(&self.b) {
            return Err("nested square roots are not supported".into());
        }
        Self::sqrt_of(&self.a).map_err(|e| e.to_string())
    }

    fn tidy(mut self) -> Self {
        if Zero::is_zero(&self.b) {
            self.r = <Q as Zero>::zero();
        }
        self
    }

    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -&self.b, r: self.r.clone() }
    }

    /// Field norm `a² − b²r`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * &self.r
    }

    /// Exact sign of the real number `a + b√r` (requires `r ≥ 0`).
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2r = &self.b * &self.b * &self.r;
        match a2.cmp(&b2r) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn as_rational(&self) -> Option<&Q> {
        if Zero::is_zero(&self.b) {
            Some(&self.a)
        } else {
            None
        }
    }
}

fn sign(v: &Q) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, o: &Self) -> bool {
        match self.try_sub(o) {
            Ok(d) => Zero::is_zero(&d.a) && Zero::is_zero(&d.b),
            Err(_) => false,
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.b) {
            return write!(f, "{}", self.a);
        }
        if Zero::is_zero(&self.a) {
            write!(f, "({})*sqrt({})", self.b, self.r)
        } else {
            write!(f, "({} + ({})*sqrt({}))", self.a, self.b, self.r)
        }
    }
}

impl Field for QuadExt {
    fn zero() -> Self {
        Self::rational(<Q as Zero>::zero())
    }
    fn one() -> Self {
        Self::rational(<Q as One>::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("mixed radicands")
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("mixed radicands")
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("mixed radicands")
    }
    fn neg(&self) -> Self {
        QuadExt { a: -&self.a, b: -&self.b, r: self.r.clone() }
    }
    fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!Zero::is_zero(&n), "inverse of zero in Q(sqrt r)");
        let c = self.conj();
        QuadExt { a: &c.a / &n, b: &c.b / &n, r: c.r }.tidy()
    }
    fn from_q(v: &Q) -> Self {
        Self::rational(v.clone())
    }
    fn to_f64(&self) -> f64 {
        if Zero::is_zero(&self.b) {
            return q_to_f64(&self.a);
        }
        q_to_f64(&self.a) + q_to_f64(&self.b) * q_to_f64(&self.r).sqrt()
    }
}
