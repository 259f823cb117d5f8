//! Sparse bivariate polynomials in `x, y`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::upoly::UPoly;
use crate::field::{Field, Q};

/// Bivariate polynomial with coefficients in `K`, keyed by `(deg_x, deg_y)`.
///
/// Map order is lexicographic with `x > y`, so the last entry is the leading term.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<K: Field> {
    terms: BTreeMap<(u32, u32), K>,
}

/// Rational-coefficient bivariate polynomial.
pub type Poly2 = Poly<Q>;

/// Per-variable and total degree bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Degrees {
    pub dx: u32,
    pub dy: u32,
    pub tot: u32,
}

impl Degrees {
    pub fn max(self, o: Degrees) -> Degrees {
        Degrees { dx: self.dx.max(o.dx), dy: self.dy.max(o.dy), tot: self.tot.max(o.tot) }
    }

    pub fn plus(self, o: Degrees) -> Degrees {
        Degrees { dx: self.dx + o.dx, dy: self.dy + o.dy, tot: self.tot + o.tot }
    }

    pub fn times(self, k: u32) -> Degrees {
        Degrees { dx: self.dx * k, dy: self.dy * k, tot: self.tot * k }
    }
}

impl<K: Field> Poly<K> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: K) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, K::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, K::one())
    }

    pub fn monomial(i: u32, j: u32, c: K) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), K)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in it {
            p.add_term(k, &c);
        }
        p
    }

    fn add_term(&mut self, k: (u32, u32), c: &K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = v.add(c);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&(u32, u32), &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> K {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(K::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn constant_value(&self) -> Option<K> {
        if self.is_constant() {
            Some(self.coeff(0, 0))
        } else {
            None
        }
    }

    /// Total degree; zero for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Degrees {
        Degrees { dx: self.deg_x(), dy: self.deg_y(), tot: self.total_degree() }
    }

    /// Leading term in lexicographic order with `x > y`.
    pub fn leading(&self) -> Option<((u32, u32), &K)> {
        self.terms.iter().next_back().map(|(k, c)| (*k, c))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, &c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn scale(&self, s: &K) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, c)| (*k, c.mul(s))).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                out.add_term((i + k, j + l), &a.mul(b));
            }
        }
        out
    }

    /// Multiply by the monomial `c·x^i·y^j`.
    pub fn mul_monomial(&self, i: u32, j: u32, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(&(a, b), v)| ((a + i, b + j), v.mul(c))).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn diff_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c.mul(&K::from_q(&crate::field::qi(i as i64))))),
        )
    }

    pub fn diff_y(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, j), _)| j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c.mul(&K::from_q(&crate::field::qi(j as i64))))),
        )
    }

    pub fn map_coeffs<T: Field>(&self, f: impl Fn(&K) -> T) -> Poly<T> {
        Poly::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    /// Evaluate at `(x, y)` with cached powers.
    pub fn eval(&self, x: &K, y: &K) -> K {
        if self.terms.is_empty() {
            return K::zero();
        }
        let xp = powers(x, self.deg_x());
        let yp = powers(y, self.deg_y());
        let mut acc = K::zero();
        for (&(i, j), c) in &self.terms {
            acc = acc.add(&c.mul(&xp[i as usize]).mul(&yp[j as usize]));
        }
        acc
    }

    /// Evaluate the degree-`k` homogenization at `(X, Y, Z)`:
    /// `Σ c_ij X^i Y^j Z^(k−i−j)`. Requires `k ≥ total_degree`.
    pub fn eval_homogeneous(&self, k: u32, xyz: &[K; 3]) -> K {
        if self.terms.is_empty() {
            return K::zero();
        }
        let xp = powers(&xyz[0], self.deg_x());
        let yp = powers(&xyz[1], self.deg_y());
        let zp = powers(&xyz[2], k);
        let mut acc = K::zero();
        for (&(i, j), c) in &self.terms {
            debug_assert!(i + j <= k);
            let t = c.mul(&xp[i as usize]).mul(&yp[j as usize]).mul(&zp[(k - i - j) as usize]);
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitute polynomials for `x` and `y`.
    pub fn compose(&self, px: &Self, py: &Self) -> Self {
        let xp = poly_powers(px, self.deg_x());
        let yp = poly_powers(py, self.deg_y());
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out = out.add(&xp[i as usize].mul(&yp[j as usize]).scale(c));
        }
        out
    }

    /// `p(x + x0, y + y0)`.
    pub fn shift(&self, x0: &K, y0: &K) -> Self {
        let px = Self::x().add(&Self::constant(x0.clone()));
        let py = Self::y().add(&Self::constant(y0.clone()));
        self.compose(&px, &py)
    }

    /// Homogeneous component of total degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        Poly {
            terms: self.terms.iter().filter(|(&(i, j), _)| i + j == k).map(|(a, b)| (*a, b.clone())).collect(),
        }
    }

    /// Coefficients of `x^i` as polynomials in `y` (stored with `deg_x = 0`).
    pub fn coeffs_in_x(&self) -> Vec<Self> {
        let mut out = vec![Self::zero(); self.deg_x() as usize + 1];
        for (&(i, j), c) in &self.terms {
            out[i as usize].terms.insert((0, j), c.clone());
        }
        out
    }

    pub fn from_coeffs_in_x(cs: &[Self]) -> Self {
        let mut out = Self::zero();
        for (i, c) in cs.iter().enumerate() {
            for (&(_, j), v) in &c.terms {
                out.add_term((i as u32, j), v);
            }
        }
        out
    }

    /// Exact division in lexicographic order; `None` when `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let ((dx, dy), dc) = d.leading()?;
        let dinv = dc.inv();
        let mut r = self.clone();
        let mut q = Self::zero();
        while let Some(((rx, ry), rc)) = r.leading() {
            if rx < dx || ry < dy {
                return None;
            }
            let c = rc.mul(&dinv);
            let (i, j) = (rx - dx, ry - dy);
            r = r.sub(&d.mul_monomial(i, j, &c));
            q.add_term((i, j), &c);
        }
        Some(q)
    }

    fn as_upoly_y(&self) -> UPoly<K> {
        let n = self.deg_y() as usize + 1;
        let mut c = vec![K::zero(); n];
        for (&(i, j), v) in &self.terms {
            debug_assert_eq!(i, 0);
            c[j as usize] = v.clone();
        }
        UPoly::from_coeffs(c)
    }

    fn from_upoly_y(p: &UPoly<K>) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(j, c)| ((0, j as u32), c.clone())))
    }
}

fn powers<K: Field>(v: &K, n: u32) -> Vec<K> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(K::one());
    for k in 0..n as usize {
        out.push(out[k].mul(v));
    }
    out
}

fn poly_powers<K: Field>(p: &Poly<K>, n: u32) -> Vec<Poly<K>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Poly::one());
    for k in 0..n as usize {
        out.push(out[k].mul(p));
    }
    out
}

impl Poly<Q> {
    pub fn from_int_terms(ts: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(ts.iter().map(|&(i, j, c)| ((i, j), crate::field::qi(c))))
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| crate::field::q_to_f64(c) * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }

    /// Scale so that coefficients are coprime integers with positive leading
    /// coefficient; returns the factor applied.
    pub fn primitive_integer(&self) -> (Q, Self) {
        if self.is_zero() {
            return (<Q as One>::one(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let mut f = Q::new(den_lcm, num_gcd);
        if self.leading().unwrap().1.is_negative() {
            f = -f;
        }
        (f.clone(), self.scale(&f))
    }

    /// Content with respect to `x`: gcd of the `x`-coefficients in `Q[y]`.
    fn content_x(&self) -> Self {
        let mut g = UPoly::zero();
        for c in self.coeffs_in_x() {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c.as_upoly_y());
            if g.degree() == Some(0) {
                break;
            }
        }
        Self::from_upoly_y(&g)
    }

    /// Pseudo-remainder of `a` by `b` with respect to `x` (up to a nonzero
    /// factor in `Q[y]`).
    fn prem_x(a: &Self, b: &Self) -> Self {
        let n = b.deg_x();
        let bc = b.coeffs_in_x();
        let lb = &bc[n as usize];
        let mut r = a.clone();
        while !r.is_zero() && r.deg_x() >= n {
            let m = r.deg_x();
            let la = r.coeffs_in_x().swap_remove(m as usize);
            r = r.mul(lb).sub(&la.mul(b).mul_monomial(m - n, 0, &<Q as One>::one()));
        }
        r
    }

    /// Greatest common divisor, normalized by [`Poly::primitive_integer`].
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.primitive_integer().1;
        }
        if o.is_zero() {
            return self.primitive_integer().1;
        }
        let ca = self.content_x();
        let cb = o.content_x();
        let c = Self::from_upoly_y(&ca.as_upoly_y().gcd(&cb.as_upoly_y()));
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = o.div_exact(&cb).expect("content divides");
        if a.deg_x() < b.deg_x() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() && b.deg_x() > 0 {
            let r = Self::prem_x(&a, &b);
            a = b;
            b = if r.is_zero() {
                r
            } else {
                let cr = r.content_x();
                let rp = r.div_exact(&cr).expect("content divides");
                rp.primitive_integer().1
            };
        }
        // `b` nonzero with deg_x 0 means the primitive parts are coprime.
        let g = if b.is_zero() { a } else { Self::one() };
        let g = if g.deg_x() == 0 { Self::one() } else { g };
        c.mul(&g).primitive_integer().1
    }
}

impl<K: Field> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let (neg, mag) = c.term_coeff();
            let sep = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let mut mono = Vec::new();
            match i {
                0 => {}
                1 => mono.push("x".to_string()),
                _ => mono.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => mono.push("y".to_string()),
                _ => mono.push(format!("y^{j}")),
            }
            let body = if mono.is_empty() {
                mag
            } else if mag == "1" {
                mono.join("*")
            } else {
                format!("{mag}*{}", mono.join("*"))
            };
            write!(f, "{sep}{body}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi};

    fn p(ts: &[(u32, u32, i64)]) -> Poly2 {
        Poly2::from_int_terms(ts)
    }

    #[test]
    fn gcd_difference_of_squares() {
        let a = p(&[(2, 0, 1), (0, 2, -1)]);
        let b = p(&[(1, 0, 1), (0, 1, -1)]);
        assert_eq!(a.gcd(&b), b);
        assert_eq!(a.gcd(&Poly2::one()), Poly2::one());
    }

    #[test]
    fn gcd_with_y_content() {
        // (y+1)(x−y) and (y+1)(x+2)
        let f = p(&[(0, 1, 1), (0, 0, 1)]);
        let a = f.mul(&p(&[(1, 0, 1), (0, 1, -1)]));
        let b = f.mul(&p(&[(1, 0, 1), (0, 0, 2)]));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn exact_division() {
        let a = p(&[(2, 0, 1), (0, 2, -1)]);
        let b = p(&[(1, 0, 1), (0, 1, -1)]);
        assert_eq!(a.div_exact(&b).unwrap(), p(&[(1, 0, 1), (0, 1, 1)]));
        assert!(b.div_exact(&p(&[(1, 0, 1), (0, 0, 1)])).is_none());
    }

    #[test]
    fn homogeneous_eval_matches_affine() {
        let a = p(&[(2, 0, 3), (1, 1, -1), (0, 0, 5)]);
        let z = q(2, 3);
        let xyz = [q(1, 3), q(5, 3), z.clone()];
        let h = a.eval_homogeneous(3, &xyz);
        let affine = a.eval(&q(1, 2), &q(5, 2));
        assert_eq!(h, affine * &z * &z * &z);
    }

    #[test]
    fn printing() {
        let a = Poly2::from_terms([((2, 0), qi(1)), ((0, 1), q(-1, 2)), ((0, 0), qi(5))]);
        assert_eq!(a.to_string(), "x^2 - (1/2)*y + 5");
    }
}
