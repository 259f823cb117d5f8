//! Deterministic polynomial identity testing for deep compositions.
//!
//! Rational functions and maps are represented lazily by evaluators that
//! return numerator and denominator values of fixed polynomial
//! representatives, together with per-variable degree bounds. Two fractions
//! agree iff `n1·d2 − n2·d1` vanishes on the integer grid
//! `{0..=dx} × {0..=dy}` of its degree bounds.

use std::sync::Arc;

use num_traits::Zero;

use super::map::RationalMap2;
use super::poly::{Degrees, Poly2};
use super::rfn::RationalFn2;
use crate::error::{Error, Result};
use crate::field::{q, qi, Q};

type FracFn = dyn Fn(&Q, &Q) -> (Q, Q) + Send + Sync;
type MapFn = dyn Fn(&Q, &Q) -> [Q; 3] + Send + Sync;

/// Lazily evaluated bivariate fraction.
#[derive(Clone)]
pub struct LazyFrac {
    pub num_deg: Degrees,
    pub den_deg: Degrees,
    f: Arc<FracFn>,
}

/// Lazily evaluated planar map in projective form `[X : Y : Z]`.
#[derive(Clone)]
pub struct LazyMap {
    pub deg: Degrees,
    f: Arc<MapFn>,
}

/// A rational point where two functions differ, and the difference there.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: (Q, Q),
    pub residual: Q,
}

impl LazyFrac {
    pub fn new(num_deg: Degrees, den_deg: Degrees, f: impl Fn(&Q, &Q) -> (Q, Q) + Send + Sync + 'static) -> Self {
        LazyFrac { num_deg, den_deg, f: Arc::new(f) }
    }

    pub fn from_polys(num: Poly2, den: Poly2) -> Self {
        let (nd, dd) = (num.degrees(), den.degrees());
        LazyFrac::new(nd, dd, move |x, y| (num.eval(x, y), den.eval(x, y)))
    }

    pub fn from_rfn(r: &RationalFn2) -> Self {
        Self::from_polys(r.num().clone(), r.den().clone())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_polys(Poly2::constant(c), Poly2::one())
    }

    /// `r ∘ m` by homogeneous substitution of the projective coordinates.
    pub fn compose(r: &RationalFn2, m: &LazyMap) -> Self {
        let k = r.num().total_degree().max(r.den().total_degree());
        let (num, den) = (r.num().clone(), r.den().clone());
        let inner = m.f.clone();
        let d = m.deg.times(k);
        LazyFrac::new(d, d, move |x, y| {
            let p = inner(x, y);
            (num.eval_homogeneous(k, &p), den.eval_homogeneous(k, &p))
        })
    }

    pub fn eval_parts(&self, x: &Q, y: &Q) -> (Q, Q) {
        (self.f)(x, y)
    }

    /// Value at a point, `None` where the representative denominator vanishes.
    pub fn value(&self, x: &Q, y: &Q) -> Option<Q> {
        let (n, d) = self.eval_parts(x, y);
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = (self.f.clone(), o.f.clone());
        let nd = self.num_deg.plus(o.den_deg).max(o.num_deg.plus(self.den_deg));
        LazyFrac::new(nd, self.den_deg.plus(o.den_deg), move |x, y| {
            let (n1, d1) = a(x, y);
            let (n2, d2) = b(x, y);
            (n1 * &d2 + n2 * &d1, d1 * d2)
        })
    }

    pub fn neg(&self) -> Self {
        let a = self.f.clone();
        LazyFrac::new(self.num_deg, self.den_deg, move |x, y| {
            let (n, d) = a(x, y);
            (-n, d)
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.f.clone(), o.f.clone());
        LazyFrac::new(self.num_deg.plus(o.num_deg), self.den_deg.plus(o.den_deg), move |x, y| {
            let (n1, d1) = a(x, y);
            let (n2, d2) = b(x, y);
            (n1 * n2, d1 * d2)
        })
    }

    /// Swap numerator and denominator.
    pub fn recip(&self) -> Self {
        let a = self.f.clone();
        LazyFrac::new(self.den_deg, self.num_deg, move |x, y| {
            let (n, d) = a(x, y);
            (d, n)
        })
    }
}

impl LazyMap {
    pub fn new(deg: Degrees, f: impl Fn(&Q, &Q) -> [Q; 3] + Send + Sync + 'static) -> Self {
        LazyMap { deg, f: Arc::new(f) }
    }

    pub fn identity() -> Self {
        LazyMap::new(Degrees { dx: 1, dy: 1, tot: 1 }, |x, y| [x.clone(), y.clone(), qi(1)])
    }

    pub fn from_map(m: &RationalMap2) -> Self {
        let [a, b, c] = m.projective();
        let deg = a.degrees().max(b.degrees()).max(c.degrees());
        LazyMap::new(deg, move |x, y| [a.eval(x, y), b.eval(x, y), c.eval(x, y)])
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &RationalMap2) -> Self {
        let [a, b, c] = outer.projective();
        let k = a.total_degree().max(b.total_degree()).max(c.total_degree());
        let inner = self.f.clone();
        LazyMap::new(self.deg.times(k), move |x, y| {
            let p = inner(x, y);
            [a.eval_homogeneous(k, &p), b.eval_homogeneous(k, &p), c.eval_homogeneous(k, &p)]
        })
    }

    /// `m^n` with `m^0` the identity.
    pub fn iterate(m: &RationalMap2, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc.then(m))
    }

    pub fn eval_projective(&self, x: &Q, y: &Q) -> [Q; 3] {
        (self.f)(x, y)
    }

    /// Component `i` (0 or 1) as a fraction over the shared `Z`.
    pub fn component(&self, i: usize) -> LazyFrac {
        let f = self.f.clone();
        LazyFrac::new(self.deg, self.deg, move |x, y| {
            let [a, b, c] = f(x, y);
            (if i == 0 { a } else { b }, c)
        })
    }
}

/// Bound on the per-variable degrees of `n1·d2 − n2·d1`.
fn cross_degree(a: &LazyFrac, b: &LazyFrac) -> Degrees {
    a.num_deg.plus(b.den_deg).max(b.num_deg.plus(a.den_deg))
}

fn grid(d: Degrees) -> impl Iterator<Item = (Q, Q)> {
    let dx = d.dx.min(d.tot) as i64;
    let dy = d.dy.min(d.tot) as i64;
    (0..=dx).flat_map(move |i| (0..=dy).map(move |j| (qi(i), qi(j))))
}

/// True when the representative denominator vanishes on its whole grid.
pub fn denominator_vanishes(a: &LazyFrac) -> bool {
    grid(a.den_deg).all(|(x, y)| a.eval_parts(&x, &y).1.is_zero())
}

/// Decide `a ≡ b`. Errors when either denominator is identically zero.
pub fn identical(a: &LazyFrac, b: &LazyFrac) -> Result<bool> {
    if denominator_vanishes(a) || denominator_vanishes(b) {
        return Err(Error::DivisionByZero("denominator vanishes identically".into()));
    }
    for (x, y) in grid(cross_degree(a, b)) {
        let (n1, d1) = a.eval_parts(&x, &y);
        let (n2, d2) = b.eval_parts(&x, &y);
        if n1 * d2 != n2 * d1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `a ≡ 0`.
pub fn is_zero_fn(a: &LazyFrac) -> Result<bool> {
    identical(a, &LazyFrac::constant(Q::zero()))
}

/// Small rational points ordered by height, starting at `(1, 1)`.
pub fn witness_candidates() -> Vec<(Q, Q)> {
    let mut vals: Vec<Q> = Vec::new();
    for d in 1..=5i64 {
        for n in -7..=7i64 {
            let v = q(n, d);
            if !vals.contains(&v) {
                vals.push(v);
            }
        }
    }
    let h = |v: &Q| v.numer().magnitude().clone() + v.denom().magnitude().clone();
    let mut pts: Vec<(Q, Q)> = vals.iter().flat_map(|a| vals.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let one = qi(1);
    pts.sort_by(|p, r| {
        let key = |p: &(Q, Q)| (p.0 != one || p.1 != one, h(&p.0).max(h(&p.1)), h(&p.0) + h(&p.1));
        key(p).cmp(&key(r))
    });
    pts
}

/// First candidate point where both sides are defined and differ.
pub fn find_witness(a: &LazyFrac, b: &LazyFrac) -> Option<Witness> {
    witness_candidates().into_iter().find_map(|(x, y)| {
        let va = a.value(&x, &y)?;
        let vb = b.value(&x, &y)?;
        (va != vb).then(|| Witness { residual: va - vb, point: (x, y) })
    })
}

/// Grid decision for two reduced rational functions.
pub fn rfn_identical(f: &RationalFn2, g: &RationalFn2) -> bool {
    identical(&LazyFrac::from_rfn(f), &LazyFrac::from_rfn(g)).expect("reduced denominators are nonzero")
}

/// Componentwise identity of two lazy maps.
pub fn maps_identical(a: &LazyMap, b: &LazyMap) -> Result<bool> {
    Ok(identical(&a.component(0), &b.component(0))? && identical(&a.component(1), &b.component(1))?)
}

/// Witness for two maps that differ: first differing component wins.
pub fn find_map_witness(a: &LazyMap, b: &LazyMap) -> Option<Witness> {
    witness_candidates().into_iter().find_map(|(x, y)| {
        let pa = a.eval_projective(&x, &y);
        let pb = b.eval_projective(&x, &y);
        if pa[2].is_zero() || pb[2].is_zero() {
            return None;
        }
        for i in 0..2 {
            let d = &pa[i] / &pa[2] - &pb[i] / &pb[2];
            if !d.is_zero() {
                return Some(Witness { point: (x, y), residual: d });
            }
        }
        None
    })
}

/// `Σ` of a slice of fractions; the empty sum is zero.
pub fn sum(parts: &[LazyFrac]) -> LazyFrac {
    parts.iter().skip(1).fold(parts.first().cloned().unwrap_or_else(|| LazyFrac::constant(Q::zero())), |acc, p| acc.add(p))
}

/// Field helper: `Q` value of a small integer.
pub fn k_int<K: crate::field::Field>(n: i64) -> K {
    K::from_q(&qi(n))
}
