//! Planar rational maps.

use std::fmt;

use num_traits::Zero;

use super::poly::Poly2;
use super::rfn::RationalFn2;
use crate::error::{Error, Result};
use crate::field::{q_to_f64, Q};


#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap2 {
    pub fx: RationalFn2,
    pub fy: RationalFn2,
}

impl RationalMap2 {
    pub fn new(fx: RationalFn2, fy: RationalFn2) -> Self {
        RationalMap2 { fx, fy }
    }

    pub fn identity() -> Self {
        RationalMap2 { fx: RationalFn2::x(), fy: RationalFn2::y() }
    }

    pub fn component(&self, i: usize) -> &RationalFn2 {
        if i == 0 {
            &self.fx
        } else {
            &self.fy
        }
    }

    /// Exact image; a vanishing denominator reports the offending component.
    pub fn eval(&self, p: &(Q, Q)) -> Result<(Q, Q)> {
        let pole = |component| Error::Pole { component, x: p.0.to_string(), y: p.1.to_string() };
        let dx = self.fx.den().eval(&p.0, &p.1);
        if dx.is_zero() {
            return Err(pole(0));
        }
        let dy = self.fy.den().eval(&p.0, &p.1);
        if dy.is_zero() {
            return Err(pole(1));
        }
        Ok((self.fx.num().eval(&p.0, &p.1) / dx, self.fy.num().eval(&p.0, &p.1) / dy))
    }

    /// Image in an extension field; `None` at a pole.
    pub fn eval_in<K: crate::field::Field>(&self, p: &(K, K)) -> Option<(K, K)> {
        Some((self.fx.eval_in(&p.0, &p.1)?, self.fy.eval_in(&p.0, &p.1)?))
    }

    /// Common-denominator form `(X, Y, Z)` with `map = (X/Z, Y/Z)`.
    pub fn projective(&self) -> [Poly2; 3] {
        let (dx, dy) = (self.fx.den(), self.fy.den());
        if dx == dy {
            return [self.fx.num().clone(), self.fy.num().clone(), dx.clone()];
        }
        let g = dx.gcd(dy);
        let ax = dy.div_exact(&g).expect("gcd divides");
        let ay = dx.div_exact(&g).expect("gcd divides");
        [self.fx.num().mul(&ax), self.fy.num().mul(&ay), dx.mul(&ax)]
    }

    /// Jacobian matrix `[[∂fx/∂x, ∂fx/∂y], [∂fy/∂x, ∂fy/∂y]]`.
    pub fn jacobian(&self) -> [[RationalFn2; 2]; 2] {
        [[self.fx.diff_x(), self.fx.diff_y()], [self.fy.diff_x(), self.fy.diff_y()]]
    }

    /// Symbolic composition `self ∘ inner`, reduced.
    pub fn compose(&self, inner: &RationalMap2) -> RationalMap2 {
        RationalMap2 { fx: self.fx.compose(&inner.fx, &inner.fy), fy: self.fy.compose(&inner.fx, &inner.fy) }
    }

    /// Floating-point evaluator with coefficients converted once.
    pub fn to_f64(&self) -> F64Map {
        F64Map {
            parts: [
                F64Poly::from(self.fx.num()),
                F64Poly::from(self.fx.den()),
                F64Poly::from(self.fy.num()),
                F64Poly::from(self.fy.den()),
            ],
        }
    }
}

impl fmt::Display for RationalMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.fx, self.fy)
    }
}

/// Bivariate polynomial with `f64` coefficients.
#[derive(Clone, Debug)]
pub struct F64Poly {
    terms: Vec<(u32, u32, f64)>,
    dx: u32,
    dy: u32,
}

impl From<&Poly2> for F64Poly {
    fn from(p: &Poly2) -> Self {
        F64Poly {
            terms: p.terms().map(|(&(i, j), c)| (i, j, q_to_f64(c))).collect(),
            dx: p.deg_x(),
            dy: p.deg_y(),
        }
    }
}

impl F64Poly {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut xp = [1.0f64; 24];
        let mut yp = [1.0f64; 24];
        if self.dx < 24 && self.dy < 24 {
            for k in 1..=self.dx as usize {
                xp[k] = xp[k - 1] * x;
            }
            for k in 1..=self.dy as usize {
                yp[k] = yp[k - 1] * y;
            }
            return self.terms.iter().map(|&(i, j, c)| c * xp[i as usize] * yp[j as usize]).sum();
        }
        self.terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }
}

/// Floating evaluator of a [`RationalMap2`].
#[derive(Clone, Debug)]
pub struct F64Map {
    parts: [F64Poly; 4],
}

impl F64Map {
    /// Image, or the index of the vanishing denominator.
    pub fn eval(&self, x: f64, y: f64) -> std::result::Result<(f64, f64), usize> {
        let dx = self.parts[1].eval(x, y);
        if dx == 0.0 {
            return Err(0);
        }
        let dy = self.parts[3].eval(x, y);
        if dy == 0.0 {
            return Err(1);
        }
        Ok((self.parts[0].eval(x, y) / dx, self.parts[2].eval(x, y) / dy))
    }
}
