//! Dense univariate polynomials and rational functions over a [`Field`].

use std::fmt;

use crate::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<K: Field> {
    /// Coefficients in ascending degree, no trailing zeros.
    c: Vec<K>,
}

impl<K: Field> UPoly<K> {
    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(v: K) -> Self {
        Self::from_coeffs(vec![v])
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::from_coeffs(vec![K::zero(), K::one()])
    }

    pub fn from_coeffs(mut c: Vec<K>) -> Self {
        while c.last().is_some_and(|v| v.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn coeffs(&self) -> &[K] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> K {
        self.c.get(k).cloned().unwrap_or_else(K::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lc(&self) -> K {
        self.c.last().cloned().unwrap_or_else(K::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k).sub(&o.coeff(k))).collect())
    }

    pub fn neg(&self) -> Self {
        UPoly { c: self.c.iter().map(K::neg).collect() }
    }

    pub fn scale(&self, s: &K) -> Self {
        Self::from_coeffs(self.c.iter().map(|v| v.mul(s)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![K::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(K::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, t: &K) -> K {
        let mut acc = K::zero();
        for v in self.c.iter().rev() {
            acc = acc.mul(t).add(v);
        }
        acc
    }

    pub fn deriv(&self) -> Self {
        Self::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, v)| v.mul(&K::from_q(&crate::field::qi(k as i64))))
                .collect(),
        )
    }

    /// Euclidean division; panics when `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lc().inv();
        let mut r = self.c.clone();
        let mut qv = vec![K::zero(); self.c.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let f = r[k].mul(&inv);
            if !f.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    let idx = k - dd + j;
                    r[idx] = r[idx].sub(&f.mul(dj));
                }
                qv[k - dd] = f;
            }
            r.pop();
            while r.last().is_some_and(|v| v.is_zero()) {
                r.pop();
            }
        }
        (Self::from_coeffs(qv), Self::from_coeffs(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv())
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Substitute a rational function for the variable.
    pub fn compose_rat(&self, g: &URat<K>) -> URat<K> {
        let mut acc = URat::zero();
        for v in self.c.iter().rev() {
            acc = acc.mul(g).add(&URat::constant(v.clone()));
        }
        acc
    }
}

impl<K: Field> fmt::Display for UPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in self.c.iter().enumerate().rev() {
            if v.is_zero() {
                continue;
            }
            let (neg, mag) = v.term_coeff();
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = match k {
                0 => mag,
                _ => {
                    let mono = if k == 1 { "t".to_string() } else { format!("t^{k}") };
                    if mag == "1" { mono } else { format!("{mag}*{mono}") }
                }
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        Ok(())
    }
}

/// Reduced univariate rational function with monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct URat<K: Field> {
    num: UPoly<K>,
    den: UPoly<K>,
}

impl<K: Field> URat<K> {
    pub fn new(num: UPoly<K>, den: UPoly<K>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g);
        let (d, _) = den.div_rem(&g);
        let s = d.lc().inv();
        Some(URat { num: n.scale(&s), den: d.scale(&s) })
    }

    pub fn zero() -> Self {
        URat { num: UPoly::zero(), den: UPoly::constant(K::one()) }
    }

    pub fn constant(v: K) -> Self {
        URat { num: UPoly::constant(v), den: UPoly::constant(K::one()) }
    }

    pub fn var() -> Self {
        URat { num: UPoly::var(), den: UPoly::constant(K::one()) }
    }

    pub fn from_poly(p: UPoly<K>) -> Self {
        URat { num: p, den: UPoly::constant(K::one()) }
    }

    pub fn num(&self) -> &UPoly<K> {
        &self.num
    }

    pub fn den(&self) -> &UPoly<K> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn constant_value(&self) -> Option<K> {
        if self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0) {
            Some(self.num.coeff(0).div(&self.den.coeff(0)))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).unwrap();
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den)).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        URat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn pow(&self, n: u32) -> Self {
        URat { num: self.num.pow(n), den: self.den.pow(n) }
    }

    /// Value at `t`, `None` at a pole.
    pub fn eval(&self, t: &K) -> Option<K> {
        let d = self.den.eval(t);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(t).div(&d))
        }
    }

    pub fn deriv(&self) -> Self {
        let n = self.num.deriv().mul(&self.den).sub(&self.num.mul(&self.den.deriv()));
        Self::new(n, self.den.mul(&self.den)).unwrap()
    }
}

impl<K: Field> fmt::Display for URat<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
