//! Polynomial vector fields and their KHK maps
//! `Φ_ε(x) = x + 2ε (I − ε DX(x))⁻¹ X(x)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::map::F64Poly;
use crate::expr::parse::{to_rfn_with, Expr, Var};
use crate::expr::pit::{maps_identical, LazyMap};
use crate::expr::{Poly2, RationalFn2, RationalMap2};
use crate::field::{q_to_f64, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub px: Poly2,
    pub py: Poly2,
}

impl PolyVectorField {
    pub fn new(px: Poly2, py: Poly2) -> Self {
        PolyVectorField { px, py }
    }

    pub fn zero() -> Self {
        PolyVectorField { px: Poly2::zero(), py: Poly2::zero() }
    }

    /// Field from two polynomial expressions in `x, y` (other variables fixed by `consts`).
    pub fn from_exprs(ex: &Expr, ey: &Expr, consts: &[(Var, Q)]) -> Result<Self> {
        let poly = |e: &Expr| -> Result<Poly2> {
            let r = to_rfn_with(e, consts)?;
            if !r.is_polynomial() {
                return Err(Error::Catalog(format!("field component {e} is not a polynomial")));
            }
            let c = r.den().constant_value().expect("constant denominator");
            Ok(r.num().scale(&(Q::from_integer(1.into()) / c)))
        };
        Ok(PolyVectorField { px: poly(ex)?, py: poly(ey)? })
    }

    /// Linear center `−ω y ∂x + ω x ∂y`.
    pub fn linear_center(omega: &Q) -> Self {
        PolyVectorField { px: Poly2::y().scale(&-omega.clone()), py: Poly2::x().scale(omega) }
    }

    pub fn degree(&self) -> u32 {
        self.px.total_degree().max(self.py.total_degree())
    }

    /// Orthogonal field `(py, −px)`.
    pub fn perp(&self) -> Self {
        PolyVectorField { px: self.py.clone(), py: self.px.neg() }
    }

    pub fn jacobian(&self) -> [[Poly2; 2]; 2] {
        jacobian(self)
    }

    pub fn eval(&self, x: &Q, y: &Q) -> (Q, Q) {
        (self.px.eval(x, y), self.py.eval(x, y))
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> (f64, f64) {
        (self.px.eval_f64(x, y), self.py.eval_f64(x, y))
    }

    /// `∇H · X` as a reduced rational function.
    pub fn lie_derivative(&self, h: &RationalFn2) -> RationalFn2 {
        h.diff_x()
            .mul(&RationalFn2::from_poly(self.px.clone()))
            .add(&h.diff_y().mul(&RationalFn2::from_poly(self.py.clone())))
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.px, self.py)
    }
}

/// Exact partial derivatives `[[∂px/∂x, ∂px/∂y], [∂py/∂x, ∂py/∂y]]`.
pub fn jacobian(field: &PolyVectorField) -> [[Poly2; 2]; 2] {
    [[field.px.diff_x(), field.px.diff_y()], [field.py.diff_x(), field.py.diff_y()]]
}

#[derive(Clone, Debug)]
pub struct KhkInstance {
    pub eps: Q,
    pub map: RationalMap2,
    pub inverse: RationalMap2,
    /// Degree above two: birationality rests on [`KhkInstance::inverse_checks`].
    pub beyond_quadratic: bool,
}

impl KhkInstance {
    /// `map ∘ inverse` and `inverse ∘ map` are the identity (grid identity test).
    pub fn inverse_checks(&self) -> Result<bool> {
        let id = LazyMap::identity();
        let a = LazyMap::from_map(&self.inverse).then(&self.map);
        let b = LazyMap::from_map(&self.map).then(&self.inverse);
        Ok(maps_identical(&a, &id)? && maps_identical(&b, &id)?)
    }
}

/// `Φ_ε` via the adjugate of `I − ε DX` over a single denominator.
pub fn khk_map(field: &PolyVectorField, eps: &Q) -> Result<RationalMap2> {
    let [[a, b], [c, d]] = jacobian(field);
    let one = Poly2::one();
    let m11 = one.sub(&a.scale(eps));
    let m12 = b.scale(&-eps.clone());
    let m21 = c.scale(&-eps.clone());
    let m22 = one.sub(&d.scale(eps));
    let det = m11.mul(&m22).sub(&m12.mul(&m21));
    if det.is_zero() {
        return Err(Error::SingularKhk(det.to_string()));
    }
    let two_eps = eps * Q::from_integer(2.into());
    // adj(M) = [[m22, −m12], [−m21, m11]]
    let zx = m22.mul(&field.px).sub(&m12.mul(&field.py));
    let zy = m11.mul(&field.py).sub(&m21.mul(&field.px));
    let nx = Poly2::x().mul(&det).add(&zx.scale(&two_eps));
    let ny = Poly2::y().mul(&det).add(&zy.scale(&two_eps));
    Ok(RationalMap2::new(RationalFn2::new(nx, det.clone())?, RationalFn2::new(ny, det)?))
}

pub fn build_khk(field: &PolyVectorField, eps: &Q) -> Result<KhkInstance> {
    let map = khk_map(field, eps)?;
    let inverse = khk_map(field, &-eps.clone())?;
    Ok(KhkInstance { eps: eps.clone(), map, inverse, beyond_quadratic: field.degree() > 2 })
}

/// Floating KHK step for arbitrary real `ε`, solving the 2×2 system directly.
#[derive(Clone, Debug)]
pub struct FloatKhk {
    eps: f64,
    p: [F64Poly; 2],
    jac: [F64Poly; 4],
}

impl FloatKhk {
    pub fn new(field: &PolyVectorField, eps: f64) -> Self {
        let [[a, b], [c, d]] = jacobian(field);
        FloatKhk {
            eps,
            p: [F64Poly::from(&field.px), F64Poly::from(&field.py)],
            jac: [F64Poly::from(&a), F64Poly::from(&b), F64Poly::from(&c), F64Poly::from(&d)],
        }
    }

    pub fn from_exact(field: &PolyVectorField, eps: &Q) -> Self {
        Self::new(field, q_to_f64(eps))
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// One step; `None` where `I − ε DX` is singular.
    pub fn apply(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let e = self.eps;
        let (px, py) = (self.p[0].eval(x, y), self.p[1].eval(x, y));
        let m11 = 1.0 - e * self.jac[0].eval(x, y);
        let m12 = -e * self.jac[1].eval(x, y);
        let m21 = -e * self.jac[2].eval(x, y);
        let m22 = 1.0 - e * self.jac[3].eval(x, y);
        let det = m11 * m22 - m12 * m21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let zx = (m22 * px - m12 * py) / det;
        let zy = (m11 * py - m21 * px) / det;
        Some((x + 2.0 * e * zx, y + 2.0 * e * zy))
    }
}
