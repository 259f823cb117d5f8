//! Pseudo-KHK maps `L⁻¹ ∘ Φ_L ∘ L` built from a linearization `L` of an
//! isochronous center.

use crate::catalog::{PrintedForm, SystemEntry};
use crate::error::{Error, Result};
use crate::expr::parse::{eval_f64, to_rfn_with, Expr, Var};
use crate::expr::pit::{maps_identical, LazyMap};
use crate::expr::{RationalFn2, RationalMap2};
use crate::field::{q_to_f64, qi, Q};
use crate::khk::PolyVectorField;
use crate::numeric::{central_jacobian, rel_err};

/// `L = (u, v)` in `x, y` and its inverse in `u, v`, conjugating the field to
/// the linear center `−ω v ∂u + ω u ∂v`.
#[derive(Clone, Debug)]
pub struct LinearizationPair {
    pub forward: [Expr; 2],
    pub inverse: [Expr; 2],
    pub omega: Q,
    pub radical: bool,
    /// Expressions in `x, y` that must be positive.
    pub guards: Vec<Expr>,
}

fn finite(p: (f64, f64)) -> Option<(f64, f64)> {
    (p.0.is_finite() && p.1.is_finite()).then_some(p)
}

impl LinearizationPair {
    pub fn in_domain(&self, x: f64, y: f64) -> bool {
        self.forward_f64(x, y).is_some()
    }

    /// `L(x, y)`, `None` outside the guards or where a radicand is negative.
    pub fn forward_f64(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let env = [(Var::X, x), (Var::Y, y)];
        for g in &self.guards {
            if !(eval_f64(g, &env).ok()? > 0.0) {
                return None;
            }
        }
        finite((eval_f64(&self.forward[0], &env).ok()?, eval_f64(&self.forward[1], &env).ok()?))
    }

    pub fn inverse_f64(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        let env = [(Var::U, u), (Var::V, v)];
        finite((eval_f64(&self.inverse[0], &env).ok()?, eval_f64(&self.inverse[1], &env).ok()?))
    }

    /// `L` as a rational map; radical linearizations have none.
    pub fn forward_map(&self) -> Result<RationalMap2> {
        if self.radical {
            return Err(Error::SqrtNotAllowed);
        }
        Ok(RationalMap2::new(to_rfn_with(&self.forward[0], &[])?, to_rfn_with(&self.forward[1], &[])?))
    }

    /// `L⁻¹` as a rational map, with `u, v` renamed to `x, y`.
    pub fn inverse_map(&self) -> Result<RationalMap2> {
        if self.radical {
            return Err(Error::SqrtNotAllowed);
        }
        let rename = |v: Var| match v {
            Var::U => Some(Expr::var(Var::X)),
            Var::V => Some(Expr::var(Var::Y)),
            _ => None,
        };
        let a = self.inverse[0].subst(&rename);
        let b = self.inverse[1].subst(&rename);
        Ok(RationalMap2::new(to_rfn_with(&a, &[])?, to_rfn_with(&b, &[])?))
    }

    /// `L⁻¹ ∘ L = id` as an exact identity of rational maps.
    pub fn roundtrip_exact(&self) -> Result<bool> {
        let lazy = LazyMap::from_map(&self.forward_map()?).then(&self.inverse_map()?);
        maps_identical(&lazy, &LazyMap::identity())
    }

    /// Largest relative round-trip error over `samples` inside the domain.
    pub fn roundtrip_residual(&self, samples: &[(f64, f64)]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &(x, y) in samples {
            let (u, v) = self.forward_f64(x, y).ok_or_else(|| outside(x, y))?;
            let (bx, by) = self.inverse_f64(u, v).ok_or_else(|| outside(x, y))?;
            worst = worst.max(rel_err(bx, x)).max(rel_err(by, y));
        }
        Ok(worst)
    }

    /// `DL·X − X_L∘L ≡ 0` as an exact rational-function identity.
    pub fn conjugates_exact(&self, field: &PolyVectorField) -> Result<bool> {
        let l = self.forward_map()?;
        let px = RationalFn2::from_poly(field.px.clone());
        let py = RationalFn2::from_poly(field.py.clone());
        let w = &self.omega;
        let du = l.fx.diff_x().mul(&px).add(&l.fx.diff_y().mul(&py));
        let dv = l.fy.diff_x().mul(&px).add(&l.fy.diff_y().mul(&py));
        Ok(du.add(&l.fy.scale(w)).is_zero() && dv.sub(&l.fx.scale(w)).is_zero())
    }

    /// Largest relative error of `DL·X = X_L∘L` over `samples`, with `DL`
    /// from Richardson-extrapolated central differences.
    pub fn conjugation_residual(&self, field: &PolyVectorField, samples: &[(f64, f64)]) -> Result<f64> {
        let w = q_to_f64(&self.omega);
        let mut worst = 0.0f64;
        for &(x, y) in samples {
            let (u, v) = self.forward_f64(x, y).ok_or_else(|| outside(x, y))?;
            let j = central_jacobian(&|a, b| self.forward_f64(a, b), x, y).ok_or_else(|| outside(x, y))?;
            let (fx, fy) = field.eval_f64(x, y);
            let lhs = (j[0][0] * fx + j[0][1] * fy, j[1][0] * fx + j[1][1] * fy);
            worst = worst.max(rel_err(lhs.0, -w * v)).max(rel_err(lhs.1, w * u));
        }
        Ok(worst)
    }
}

fn outside(x: f64, y: f64) -> Error {
    Error::Domain(format!("({x}, {y}) is outside the linearization domain"))
}

/// KHK map of the linear center: `((1−ε²ω²)u − 2εωv, 2εωu + (1−ε²ω²)v)/(1+ε²ω²)`.
pub fn linear_center_khk(omega: &Q, eps: &Q) -> RationalMap2 {
    let t = eps * omega;
    let d = qi(1) + &t * &t;
    let c = (qi(1) - &t * &t) / &d;
    let s = qi(2) * &t / &d;
    let x = RationalFn2::x();
    let y = RationalFn2::y();
    RationalMap2::new(x.scale(&c).sub(&y.scale(&s)), x.scale(&s).add(&y.scale(&c)))
}

pub fn linear_center_khk_f64(omega: f64, eps: f64, u: f64, v: f64) -> (f64, f64) {
    let t = eps * omega;
    let d = 1.0 + t * t;
    let (c, s) = ((1.0 - t * t) / d, 2.0 * t / d);
    (c * u - s * v, s * u + c * v)
}

#[derive(Clone, Debug)]
pub struct PseudoKhkInstance {
    pub system: String,
    pub eps: f64,
    pub eps_exact: Option<Q>,
    /// Reduced symbolic form, when the linearization is radical-free.
    pub exact: Option<RationalMap2>,
    pub printed: Option<PrintedForm>,
    lin: LinearizationPair,
}

impl PseudoKhkInstance {
    /// `L⁻¹(Φ_L(L(p)))`; errors outside the linearization domain.
    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (u, v) = self.lin.forward_f64(x, y).ok_or_else(|| outside(x, y))?;
        let (u1, v1) = linear_center_khk_f64(q_to_f64(&self.lin.omega), self.eps, u, v);
        self.lin.inverse_f64(u1, v1).ok_or_else(|| Error::Domain(format!("image of ({x}, {y}) leaves the inverse domain")))
    }

    pub fn apply_printed(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        self.printed.as_ref()?.eval_f64(self.eps, x, y)
    }

    pub fn linearization(&self) -> &LinearizationPair {
        &self.lin
    }
}

/// Pseudo-KHK map of `system` at step `eps`; symbolic when `L` is rational.
pub fn build_pseudo(system: &SystemEntry, eps: &Q) -> Result<PseudoKhkInstance> {
    let lin = system
        .linearization
        .clone()
        .ok_or_else(|| Error::Precondition(format!("{} has no linearization", system.name)))?;
    let exact = if lin.radical {
        None
    } else {
        let l = lin.forward_map()?;
        let phi = linear_center_khk(&lin.omega, eps);
        Some(lin.inverse_map()?.compose(&phi.compose(&l)))
    };
    Ok(PseudoKhkInstance {
        system: system.name.clone(),
        eps: q_to_f64(eps),
        eps_exact: Some(eps.clone()),
        exact,
        printed: system.printed_pseudo.clone(),
        lin,
    })
}

/// Floating-step variant; never symbolic.
pub fn build_pseudo_f64(system: &SystemEntry, eps: f64) -> Result<PseudoKhkInstance> {
    let lin = system
        .linearization
        .clone()
        .ok_or_else(|| Error::Precondition(format!("{} has no linearization", system.name)))?;
    Ok(PseudoKhkInstance { system: system.name.clone(), eps, eps_exact: None, exact: None, printed: system.printed_pseudo.clone(), lin })
}

/// `arg((1−ε²+2iε)/(1+ε²))/(2π)` in `[0, 1)`.
pub fn pseudo_rotation_number(eps: f64) -> f64 {
    crate::analysis::rho_plus(eps)
}
