//! Reduced bivariate rational functions over `Q`.

use std::fmt;

use num_traits::Zero;

use super::poly::Poly2;
use crate::error::{Error, Result};
use crate::field::{Field, Q};

/// `num/den` with `gcd(num, den) = 1` and `den` a primitive integer polynomial
/// with positive leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn2 {
    num: Poly2,
    den: Poly2,
}

impl RationalFn2 {
    pub fn new(num: Poly2, den: Poly2) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("denominator is the zero polynomial".into()));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly2, den: Poly2) -> Self {
        if num.is_zero() {
            return RationalFn2 { num, den: Poly2::one() };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        let (f, den) = den.primitive_integer();
        RationalFn2 { num: num.scale(&f), den }
    }

    pub fn from_poly(p: Poly2) -> Self {
        RationalFn2 { num: p, den: Poly2::one() }
    }

    pub fn constant(c: Q) -> Self {
        Self::from_poly(Poly2::constant(c))
    }

    pub fn zero() -> Self {
        Self::constant(<Q as Zero>::zero())
    }

    pub fn x() -> Self {
        Self::from_poly(Poly2::x())
    }

    pub fn y() -> Self {
        Self::from_poly(Poly2::y())
    }

    pub fn num(&self) -> &Poly2 {
        &self.num
    }

    pub fn den(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFn2 { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalFn2 { num: self.num.scale(c), den: if Zero::is_zero(c) { Poly2::one() } else { self.den.clone() } }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero("rational function divided by zero".into()));
        }
        Ok(Self::reduce(self.num.mul(&o.den), self.den.mul(&o.num)))
    }

    pub fn pow(&self, n: u32) -> Self {
        RationalFn2 { num: self.num.pow(n), den: self.den.pow(n) }
    }

    /// Exact value; errors at a pole.
    pub fn eval(&self, x: &Q, y: &Q) -> Result<Q> {
        let d = self.den.eval(x, y);
        if Zero::is_zero(&d) {
            return Err(Error::Pole { component: 0, x: x.to_string(), y: y.to_string() });
        }
        Ok(self.num.eval(x, y) / d)
    }

    /// Value in any field containing `Q`; `None` at a pole.
    pub fn eval_in<K: Field>(&self, x: &K, y: &K) -> Option<K> {
        let d = self.den.map_coeffs(K::from_q).eval(x, y);
        if d.is_zero() {
            return None;
        }
        Some(self.num.map_coeffs(K::from_q).eval(x, y).div(&d))
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.num.eval_f64(x, y) / self.den.eval_f64(x, y)
    }

    pub fn diff_x(&self) -> Self {
        let n = self.num.diff_x().mul(&self.den).sub(&self.num.mul(&self.den.diff_x()));
        Self::reduce(n, self.den.mul(&self.den))
    }

    pub fn diff_y(&self) -> Self {
        let n = self.num.diff_y().mul(&self.den).sub(&self.num.mul(&self.den.diff_y()));
        Self::reduce(n, self.den.mul(&self.den))
    }

    /// Symbolic substitution `self(fx, fy)`, reduced.
    pub fn compose(&self, fx: &Self, fy: &Self) -> Self {
        let n = compose_poly(&self.num, fx, fy);
        let d = compose_poly(&self.den, fx, fy);
        n.div(&d).expect("composition with vanishing denominator")
    }

    /// Total degree of numerator and denominator, whichever is larger.
    pub fn degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }
}

/// `p(fx, fy)` as a rational function; numerators and denominators are
/// accumulated separately and reduced once.
pub fn compose_poly(p: &Poly2, fx: &RationalFn2, fy: &RationalFn2) -> RationalFn2 {
    let a = p.deg_x();
    let b = p.deg_y();
    let nx = pows(&fx.num, a);
    let dx = pows(&fx.den, a);
    let ny = pows(&fy.num, b);
    let dy = pows(&fy.den, b);
    let mut acc = Poly2::zero();
    for (&(i, j), c) in p.terms() {
        let t = nx[i as usize].mul(&dx[(a - i) as usize]).mul(&ny[j as usize]).mul(&dy[(b - j) as usize]);
        acc = acc.add(&t.scale(c));
    }
    RationalFn2::reduce(acc, dx[a as usize].mul(&dy[b as usize]))
}

fn pows(p: &Poly2, n: u32) -> Vec<Poly2> {
    let mut out = vec![Poly2::one()];
    for k in 0..n as usize {
        out.push(out[k].mul(p));
    }
    out
}

impl fmt::Display for RationalFn2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly2::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qi;

    fn p(ts: &[(u32, u32, i64)]) -> Poly2 {
        Poly2::from_int_terms(ts)
    }

    #[test]
    fn cancels_common_factor() {
        let f = RationalFn2::new(p(&[(2, 0, 1), (0, 2, -1)]), p(&[(1, 0, 1), (0, 1, -1)])).unwrap();
        assert_eq!(f.num(), &p(&[(1, 0, 1), (0, 1, 1)]));
        assert_eq!(f.den(), &Poly2::one());
        let g = RationalFn2::new(Poly2::x(), Poly2::x()).unwrap();
        assert_eq!(g, RationalFn2::constant(qi(1)));
    }

    #[test]
    fn normalizes_sign_and_scale() {
        let f = RationalFn2::new(Poly2::x(), p(&[(0, 1, -2), (0, 0, -4)])).unwrap();
        assert_eq!(f.den(), &p(&[(0, 1, 1), (0, 0, 2)]));
        assert_eq!(f.num(), &Poly2::x().scale(&crate::field::q(-1, 2)));
    }

    #[test]
    fn quotient_rule() {
        // d/dx (x/(1+y)) = 1/(1+y)
        let f = RationalFn2::new(Poly2::x(), p(&[(0, 1, 1), (0, 0, 1)])).unwrap();
        let g = RationalFn2::new(Poly2::one(), p(&[(0, 1, 1), (0, 0, 1)])).unwrap();
        assert_eq!(f.diff_x(), g);
    }

    #[test]
    fn pole_is_reported() {
        let f = RationalFn2::new(Poly2::one(), Poly2::x()).unwrap();
        assert!(matches!(f.eval(&qi(0), &qi(1)), Err(Error::Pole { .. })));
    }
}
