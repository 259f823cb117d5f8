//! Pencils of invariant curves, exact conic classification and proper
//! rational parametrizations.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::catalog::SystemEntry;
use crate::error::{Error, Result};
use crate::expr::parse::{to_rfn_with, Expr, Var};
use crate::expr::{Poly, Poly2, UPoly, URat};
use crate::field::{qi, QuadExt, Q};

type K = QuadExt;

/// `V1 − h·V2 = 0` with `V1, V2` expressions in `x, y, eps`.
#[derive(Clone, Debug)]
pub struct CurvePencil {
    pub v1: Expr,
    pub v2: Expr,
    pub description: String,
}

impl CurvePencil {
    /// Level sets of an integral written as a quotient `V1/V2`.
    pub fn from_integral(e: &Expr, description: &str) -> Self {
        let (v1, v2) = match e {
            Expr::Div(a, b) => ((**a).clone(), (**b).clone()),
            Expr::Neg(inner) => match &**inner {
                Expr::Div(a, b) => (Expr::Neg(a.clone()), (**b).clone()),
                _ => (e.clone(), Expr::num(qi(1))),
            },
            _ => (e.clone(), Expr::num(qi(1))),
        };
        CurvePencil { v1, v2, description: description.to_string() }
    }

    /// Defining polynomial of `C_h` at the given step.
    pub fn instantiate(&self, h: &Q, eps: &Q) -> Result<Poly2> {
        let c = [(Var::Eps, eps.clone())];
        let a = to_rfn_with(&self.v1, &c)?;
        let b = to_rfn_with(&self.v2, &c)?;
        let f = a.sub(&b.scale(h));
        if !f.is_polynomial() {
            return Err(Error::Precondition(format!("pencil {} is not polynomial", self.description)));
        }
        let d = f.den().constant_value().expect("constant denominator");
        Ok(f.num().scale(&(qi(1) / d)))
    }
}

/// Level-set pencil of `system`: the map integral `V` when present, else the
/// first integral of the field.
pub fn pencil_for(system: &SystemEntry) -> Result<CurvePencil> {
    if let Some(v) = system.map_integrals.iter().find(|m| m.valid_eps.is_none()) {
        return Ok(CurvePencil::from_integral(&v.expr, &format!("{} = h", v.name)));
    }
    let i = system
        .first_integrals
        .first()
        .ok_or_else(|| Error::Catalog(format!("{} has no integral to define a pencil", system.name)))?;
    Ok(CurvePencil::from_integral(&i.expr, &format!("{} = h", i.name)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicClass {
    Point,
    Ellipse,
    Parabola,
    Hyperbola,
    TwoLines,
    Line,
    Empty,
    DegenerateOther,
}

impl ConicClass {
    pub fn name(self) -> &'static str {
        match self {
            ConicClass::Point => "point",
            ConicClass::Ellipse => "ellipse",
            ConicClass::Parabola => "parabola",
            ConicClass::Hyperbola => "hyperbola",
            ConicClass::TwoLines => "two_lines",
            ConicClass::Line => "line",
            ConicClass::Empty => "empty",
            ConicClass::DegenerateOther => "degenerate_other",
        }
    }
}

impl fmt::Display for ConicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn sgn(v: &Q) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Real affine type of `Ax² + Bxy + Cy² + Dx + Ey + F = 0`.
pub fn classify_poly(p: &Poly2) -> Result<ConicClass> {
    if p.total_degree() > 2 {
        return Err(Error::Precondition(format!("degree {} curve is not a conic", p.total_degree())));
    }
    let c = |i, j| p.coeff(i, j);
    let (a, b, cc) = (c(2, 0), c(1, 1), c(0, 2));
    let (d, e, f) = (c(1, 0), c(0, 1), c(0, 0));
    let two = qi(2);
    if a.is_zero() && b.is_zero() && cc.is_zero() {
        return Ok(if !d.is_zero() || !e.is_zero() {
            ConicClass::Line
        } else if f.is_zero() {
            ConicClass::DegenerateOther
        } else {
            ConicClass::Empty
        });
    }
    let (hb, hd, he) = (&b / &two, &d / &two, &e / &two);
    let delta = &a * &cc - &hb * &hb;
    let det3 = &a * (&cc * &f - &he * &he) - &hb * (&hb * &f - &he * &hd) + &hd * (&hb * &he - &cc * &hd);
    let trace = &a + &cc;
    Ok(match (sgn(&det3), sgn(&delta)) {
        (0, 1) => ConicClass::Point,
        (0, -1) => ConicClass::TwoLines,
        (0, _) => {
            // parallel pair: sign of the sum of the 2×2 cofactors decides
            let k = (&a * &f - &hd * &hd) + (&cc * &f - &he * &he);
            match sgn(&k) {
                -1 => ConicClass::TwoLines,
                0 => ConicClass::Line,
                _ => ConicClass::Empty,
            }
        }
        (s, 1) => {
            if s * sgn(&trace) < 0 {
                ConicClass::Ellipse
            } else {
                ConicClass::Empty
            }
        }
        (_, -1) => ConicClass::Hyperbola,
        _ => ConicClass::Parabola,
    })
}

pub fn classify_conic(pencil: &CurvePencil, h: &Q, eps: &Q) -> Result<ConicClass> {
    classify_poly(&pencil.instantiate(h, eps)?)
}

/// Parameter on the extended line: `num/den`, with `den = 0` meaning `∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub num: K,
    pub den: K,
}

impl Param {
    pub fn finite(t: K) -> Self {
        Param { num: t, den: K::rational(qi(1)) }
    }

    pub fn infinity() -> Self {
        Param { num: K::rational(qi(1)), den: K::rational(qi(0)) }
    }

    pub fn is_infinite(&self) -> bool {
        crate::field::Field::is_zero(&self.den)
    }

    pub fn value(&self) -> Option<K> {
        (!self.is_infinite()).then(|| crate::field::Field::div(&self.num, &self.den))
    }

    pub fn to_f64(&self) -> f64 {
        match self.value() {
            Some(v) => crate::field::Field::to_f64(&v),
            None => f64::INFINITY,
        }
    }
}

/// `(p1(t), p2(t))` with rational inverse `t = inv_num/inv_den` on the curve.
#[derive(Clone, Debug)]
pub struct CurveParametrization {
    pub p1: URat<K>,
    pub p2: URat<K>,
    pub inv_num: Poly<K>,
    pub inv_den: Poly<K>,
    pub base: (K, K),
    pub radical_defs: Vec<(String, String)>,
    pub curve: Poly<K>,
}

impl CurveParametrization {
    pub fn point(&self, t: &K) -> Option<(K, K)> {
        Some((self.p1.eval(t)?, self.p2.eval(t)?))
    }

    pub fn point_f64(&self, t: f64) -> Option<(f64, f64)> {
        let ev = |r: &URat<K>| {
            let d = eval_upoly_f64(r.den(), t);
            (d != 0.0).then(|| eval_upoly_f64(r.num(), t) / d)
        };
        Some((ev(&self.p1)?, ev(&self.p2)?))
    }

    /// Parameter of an on-curve point.
    pub fn invert(&self, p: &(K, K)) -> Param {
        Param { num: self.inv_num.eval(&p.0, &p.1), den: self.inv_den.eval(&p.0, &p.1) }
    }

    pub fn invert_f64(&self, x: f64, y: f64) -> f64 {
        eval_poly_f64(&self.inv_num, x, y) / eval_poly_f64(&self.inv_den, x, y)
    }

    pub fn on_curve(&self, p: &(K, K)) -> bool {
        crate::field::Field::is_zero(&self.curve.eval(&p.0, &p.1))
    }

    /// `curve(p1(t), p2(t)) ≡ 0` as a univariate identity.
    pub fn on_curve_identity(&self) -> bool {
        poly_at_urat(&self.curve, &self.p1, &self.p2).is_zero()
    }

    /// Largest `|curve(P(t))| / (1 + Σ|terms|)` over the given parameters.
    pub fn on_curve_residual_f64(&self, ts: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for &t in ts {
            if let Some((x, y)) = self.point_f64(t) {
                let mut scale = 1.0;
                let mut val = 0.0;
                for (&(i, j), c) in self.curve.terms() {
                    let term = crate::field::Field::to_f64(c) * x.powi(i as i32) * y.powi(j as i32);
                    val += term;
                    scale += term.abs();
                }
                worst = worst.max(val.abs() / scale);
            }
        }
        worst
    }
}

fn eval_upoly_f64(p: &UPoly<K>, t: f64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * t + crate::field::Field::to_f64(c))
}

fn eval_poly_f64(p: &Poly<K>, x: f64, y: f64) -> f64 {
    p.terms().map(|(&(i, j), c)| crate::field::Field::to_f64(c) * x.powi(i as i32) * y.powi(j as i32)).sum()
}

/// `p(r1, r2)` for univariate rational `r1, r2`.
pub fn poly_at_urat(p: &Poly<K>, r1: &URat<K>, r2: &URat<K>) -> URat<K> {
    let mut xs = vec![URat::constant(K::rational(qi(1)))];
    for k in 0..p.deg_x() as usize {
        xs.push(xs[k].mul(r1));
    }
    let mut ys = vec![URat::constant(K::rational(qi(1)))];
    for k in 0..p.deg_y() as usize {
        ys.push(ys[k].mul(r2));
    }
    let mut acc = URat::zero();
    for (&(i, j), c) in p.terms() {
        acc = acc.add(&xs[i as usize].mul(&ys[j as usize]).mul(&URat::constant(c.clone())));
    }
    acc
}

fn lift(p: &Poly2) -> Poly<K> {
    p.map_coeffs(|c| K::rational(c.clone()))
}

/// Lines through `base`: `v = t·u` after moving `base` to the origin.
pub fn parametrize_by_lines(curve: &Poly<K>, base: (K, K)) -> Result<CurveParametrization> {
    use crate::field::Field;
    if curve.total_degree() != 2 {
        return Err(Error::Precondition(format!("expected a conic, got degree {}", curve.total_degree())));
    }
    let shifted = curve.shift(&base.0, &base.1);
    if !shifted.coeff(0, 0).is_zero() {
        return Err(Error::NotOnCurve(format!("base ({}, {})", base.0, base.1)));
    }
    let (a, b) = (shifted.coeff(1, 0), shifted.coeff(0, 1));
    if a.is_zero() && b.is_zero() {
        return Err(Error::Degenerate("base point is a singular point of the conic".into()));
    }
    let f2 = UPoly::from_coeffs(vec![shifted.coeff(2, 0), shifted.coeff(1, 1), shifted.coeff(0, 2)]);
    if f2.is_zero() {
        return Err(Error::Degenerate("quadratic part vanishes on every line".into()));
    }
    let f1 = UPoly::from_coeffs(vec![a, b]);
    let u = URat::new(f1.neg(), f2).expect("nonzero denominator");
    let p1 = URat::constant(base.0.clone()).add(&u);
    let p2 = URat::constant(base.1.clone()).add(&URat::var().mul(&u));
    let inv_num = Poly::y().sub(&Poly::constant(base.1.clone()));
    let inv_den = Poly::x().sub(&Poly::constant(base.0.clone()));
    let param = CurveParametrization { p1, p2, inv_num, inv_den, base, radical_defs: Vec::new(), curve: curve.clone() };
    if !param.on_curve_identity() {
        return Err(Error::Degenerate("conic is reducible: the sweep leaves the curve".into()));
    }
    Ok(param)
}

/// Polynomial in `t` with coefficients in `K[x, y]`, index = power of `t`.
type TPoly = Vec<Poly<K>>;

fn reduce_on_curve(mut p: TPoly, param: &CurveParametrization) -> TPoly {
    for c in p.iter_mut() {
        if !c.is_zero() && poly_at_urat(c, &param.p1, &param.p2).is_zero() {
            *c = Poly::zero();
        }
    }
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// `x·den(t) − num(t)` for a coordinate `num/den`.
fn implicit(r: &URat<K>, coord: Poly<K>) -> TPoly {
    let n = r.num().coeffs().len().max(r.den().coeffs().len());
    (0..n)
        .map(|k| coord.scale(&r.den().coeff(k)).sub(&Poly::constant(r.num().coeff(k))))
        .collect()
}

fn prem(a: &TPoly, b: &TPoly) -> TPoly {
    let mut r = a.clone();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        let mut next: TPoly = r.iter().map(|c| c.mul(&lb)).collect();
        for (k, c) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&c.mul(&lr));
        }
        next.pop();
        while next.last().is_some_and(|c| c.is_zero()) {
            next.pop();
        }
        r = next;
    }
    r
}

/// Inverse `t = D0/D1` from `gcd(x·q1 − p1, y·q2 − p2)` over the function
/// field of the curve; errors when the gcd is not linear in `t`.
pub fn inverse_by_gcd(param: &CurveParametrization) -> Result<(Poly<K>, Poly<K>)> {
    let mut a = reduce_on_curve(implicit(&param.p1, Poly::x()), param);
    let mut b = reduce_on_curve(implicit(&param.p2, Poly::y()), param);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = reduce_on_curve(prem(&a, &b), param);
        a = b;
        b = r;
    }
    if a.len() != 2 {
        return Err(Error::Degenerate(format!("gcd has degree {} in t; parametrization is not proper", a.len().saturating_sub(1))));
    }
    Ok((a[0].neg(), a[1].clone()))
}

/// `D0/D1` and the stored inverse agree at `P(t)` for `n` small rational `t`.
pub fn inverses_agree(param: &CurveParametrization, inv: &(Poly<K>, Poly<K>), n: usize) -> bool {
    use crate::field::Field;
    let mut checked = 0;
    for t in (1..=4 * n as i64).map(|k| K::rational(Q::new(k.into(), 3.into()) - qi(n as i64 / 2))) {
        if checked == n {
            break;
        }
        let Some(p) = param.point(&t) else { continue };
        let ours = param.invert(&p);
        let d = inv.1.eval(&p.0, &p.1);
        if d.is_zero() || ours.is_infinite() {
            continue;
        }
        if inv.0.eval(&p.0, &p.1).div(&d) != ours.value().unwrap() || ours.value().unwrap() != t {
            return false;
        }
        checked += 1;
    }
    checked == n
}

fn sqrt_k(v: &Q, what: &str) -> Result<K> {
    K::sqrt_of(v).map_err(|_| Error::Domain(format!("{what} = sqrt({v}) is not real")))
}

/// Level set `V = h` of the quadratic example through `(1, 1 + m)`,
/// `m² = (ε²+1)(2h+5)`.
pub fn ps_parametrization(system: &SystemEntry, eps: &Q, h: &Q) -> Result<CurveParametrization> {
    let curve = pencil_for(system)?.instantiate(h, eps)?;
    let m2 = (eps * eps + qi(1)) * (qi(2) * h + qi(5));
    let m = sqrt_k(&m2, "m")?;
    let base = (K::rational(qi(1)), crate::field::Field::add(&K::rational(qi(1)), &m));
    let mut p = parametrize_by_lines(&lift(&curve), base)?;
    p.radical_defs.push(("m".into(), format!("m^2 = {m2}")));
    Ok(p)
}

/// Which family of closed curves of `S1` a level belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basin {
    O1,
    O2,
    LineAtInfinity,
}

impl Basin {
    pub fn parse(s: &str) -> Result<Basin> {
        match s {
            "O1" | "o1" => Ok(Basin::O1),
            "O2" | "o2" => Ok(Basin::O2),
            "line_at_infinity" | "inf" => Ok(Basin::LineAtInfinity),
            _ => Err(Error::Precondition(format!("unknown basin {s}; expected O1, O2 or line_at_infinity"))),
        }
    }
}

/// Level `H1 = h` of `S1`: base `(√h, 0)` for `h > 0`, `(√(−h−1), −1)` for `h < −1`.
pub fn s1_parametrization(system: &SystemEntry, h: &Q) -> Result<CurveParametrization> {
    let curve = lift(&pencil_for(system)?.instantiate(h, &qi(0))?);
    if h.is_positive() {
        let s = sqrt_k(h, "sqrt(h)")?;
        let mut p = parametrize_by_lines(&curve, (s, K::rational(qi(0))))?;
        p.radical_defs.push(("s".into(), format!("s^2 = {h}")));
        Ok(p)
    } else if *h < qi(-1) {
        let r2 = -h - qi(1);
        let r = sqrt_k(&r2, "r")?;
        let mut p = parametrize_by_lines(&curve, (r, K::rational(qi(-1))))?;
        p.radical_defs.push(("r".into(), format!("r^2 = {r2}")));
        Ok(p)
    } else {
        Err(Error::Domain(format!("H1 = {h} is not a level of closed curves (need h > 0 or h < -1)")))
    }
}

/// Level `H2 = h` with base `(√h, 0)`.
pub fn s2_parametrization(system: &SystemEntry, h: &Q) -> Result<CurveParametrization> {
    let curve = lift(&pencil_for(system)?.instantiate(h, &qi(0))?);
    let s = sqrt_k(h, "sqrt(h)")?;
    let mut p = parametrize_by_lines(&curve, (s, K::rational(qi(0))))?;
    p.radical_defs.push(("s".into(), format!("s^2 = {h}")));
    Ok(p)
}

/// Quartic `9(x²+y²) − 24x²y + 16x⁴ = h(16y − 3)` via `w = 4x² − 3y`, which
/// turns it into a conic in `(x, w)`.
pub fn parametrize_s3(h: &Q) -> Result<CurveParametrization> {
    use crate::field::Field;
    let b = qi(64) * h - qi(27);
    if Zero::is_zero(&b) {
        return Err(Error::DivisionByZero("64h - 27 = 0".into()));
    }
    let a2 = h * &b;
    let a = K::sqrt_of(&a2).map_err(|_| Error::Domain(format!("A = sqrt({a2}) is imaginary")))?;
    let x0 = a.mul(&K::rational(qi(3) / &b));
    // (9 − 64h/3) x² + w² + (16h/3) w + 3h, with w in the `y` slot
    let conic = Poly2::from_terms([
        ((2, 0), qi(9) - qi(64) * h / qi(3)),
        ((0, 2), qi(1)),
        ((0, 1), qi(16) * h / qi(3)),
        ((0, 0), qi(3) * h),
    ]);
    let pc = parametrize_by_lines(&lift(&conic), (x0.clone(), K::rational(qi(0))))?;
    let third = URat::constant(K::rational(Q::new(1.into(), 3.into())));
    let p2 = pc.p1.pow(2).mul(&URat::constant(K::rational(qi(4)))).sub(&pc.p2).mul(&third);
    let quartic = Poly2::from_terms([
        ((2, 0), qi(9)),
        ((0, 2), qi(9)),
        ((2, 1), qi(-24)),
        ((4, 0), qi(16)),
        ((0, 1), qi(-16) * h),
        ((0, 0), qi(3) * h),
    ]);
    // t = w/(x − x0) with w = 4x² − 3y
    let inv_num = Poly::from_terms([((2, 0), K::rational(qi(4))), ((0, 1), K::rational(qi(-3)))]);
    let inv_den = Poly::x().sub(&Poly::constant(x0.clone()));
    Ok(CurveParametrization {
        p1: pc.p1,
        p2,
        inv_num,
        inv_den,
        base: (x0, K::rational(qi(12) * h / &b)),
        radical_defs: vec![("A".into(), format!("A^2 = {a2}"))],
        curve: lift(&quartic),
    })
}

/// Default parametrization of the level `h` of `system` at step `eps`.
pub fn parametrization_for(system: &SystemEntry, eps: &Q, h: &Q) -> Result<CurveParametrization> {
    match system.name.as_str() {
        "petrera_suris" => ps_parametrization(system, eps, h),
        "S1" => s1_parametrization(system, h),
        "S2" => s2_parametrization(system, h),
        "S3" => parametrize_s3(h),
        other => Err(Error::Precondition(format!("no rational parametrization shipped for {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;
    use crate::field::{q, Field};

    fn kq(n: i64, d: i64) -> K {
        K::rational(q(n, d))
    }

    #[test]
    fn classifies_basic_conics() {
        let p = |ts: &[(u32, u32, i64)]| classify_poly(&Poly2::from_int_terms(ts)).unwrap();
        assert_eq!(p(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]), ConicClass::Ellipse);
        assert_eq!(p(&[(2, 0, 1), (0, 2, 1), (0, 0, 1)]), ConicClass::Empty);
        assert_eq!(p(&[(2, 0, 1), (0, 2, 1)]), ConicClass::Point);
        assert_eq!(p(&[(2, 0, 1), (0, 2, -1), (0, 0, -1)]), ConicClass::Hyperbola);
        assert_eq!(p(&[(2, 0, 1), (0, 2, -1)]), ConicClass::TwoLines);
        assert_eq!(p(&[(2, 0, 1), (0, 1, -1)]), ConicClass::Parabola);
        assert_eq!(p(&[(2, 0, 1), (0, 0, -1)]), ConicClass::TwoLines);
        assert_eq!(p(&[(2, 0, 1)]), ConicClass::Line);
        assert_eq!(p(&[(2, 0, 1), (0, 0, 1)]), ConicClass::Empty);
        assert_eq!(p(&[(1, 0, 1), (0, 1, 1)]), ConicClass::Line);
        assert!(classify_poly(&Poly2::from_int_terms(&[(3, 0, 1)])).is_err());
    }

    #[test]
    fn petrera_suris_level_types_at_eps_one() {
        let pen = pencil_for(system("petrera_suris").unwrap()).unwrap();
        let e = qi(1);
        assert_eq!(classify_conic(&pen, &q(-9, 4), &e).unwrap(), ConicClass::Ellipse);
        assert_eq!(classify_conic(&pen, &qi(-2), &e).unwrap(), ConicClass::Parabola);
        assert_eq!(classify_conic(&pen, &q(-3, 2), &e).unwrap(), ConicClass::TwoLines);
        assert_eq!(classify_conic(&pen, &q(-5, 2), &e).unwrap(), ConicClass::Point);
    }

    #[test]
    fn circle_by_lines() {
        let circle = lift(&Poly2::from_int_terms(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]));
        let p = parametrize_by_lines(&circle, (kq(1, 1), kq(0, 1))).unwrap();
        let t = kq(3, 1);
        assert_eq!(p.point(&t).unwrap(), (kq(8, 10), kq(-6, 10)));
        assert_eq!(p.invert(&p.point(&t).unwrap()).value().unwrap(), t);
        let inv = inverse_by_gcd(&p).unwrap();
        assert!(inverses_agree(&p, &inv, 20));
    }

    #[test]
    fn base_off_curve_is_rejected() {
        let circle = lift(&Poly2::from_int_terms(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]));
        assert!(matches!(parametrize_by_lines(&circle, (kq(1, 1), kq(1, 1))), Err(Error::NotOnCurve(_))));
    }

    #[test]
    fn double_cover_is_not_proper() {
        let circle = lift(&Poly2::from_int_terms(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]));
        let mut p = parametrize_by_lines(&circle, (kq(1, 1), kq(0, 1))).unwrap();
        let sq = URat::from_poly(UPoly::var().pow(2));
        p.p1 = p.p1.num().compose_rat(&sq).div(&p.p1.den().compose_rat(&sq)).unwrap();
        p.p2 = p.p2.num().compose_rat(&sq).div(&p.p2.den().compose_rat(&sq)).unwrap();
        assert!(p.on_curve_identity());
        assert!(matches!(inverse_by_gcd(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn radical_base_points() {
        let s1 = system("S1").unwrap();
        for h in [q(1, 2), qi(1), qi(2), q(-3, 2), qi(-5)] {
            let p = s1_parametrization(s1, &h).unwrap();
            assert!(p.on_curve_identity(), "{h}");
            let inv = inverse_by_gcd(&p).unwrap();
            assert!(inverses_agree(&p, &inv, 20), "{h}");
        }
        assert!(matches!(s1_parametrization(s1, &q(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn s3_quartic() {
        let p = parametrize_s3(&qi(1)).unwrap();
        assert!(p.on_curve_identity());
        let ts: Vec<f64> = (0..50).map(|k| -3.0 + 0.13 * k as f64).collect();
        assert!(p.on_curve_residual_f64(&ts) < 1e-10);
        for k in 1..=20 {
            let t = kq(k, 7);
            let pt = p.point(&t).unwrap();
            assert!(p.on_curve(&pt));
            assert_eq!(p.invert(&pt).value().unwrap(), t);
        }
        assert!(matches!(parametrize_s3(&q(27, 64)), Err(Error::DivisionByZero(_))));
        assert!(matches!(parametrize_s3(&q(1, 4)), Err(Error::Domain(_))));
    }

    #[test]
    fn ps_base_and_inverse() {
        let s = system("petrera_suris").unwrap();
        let p = ps_parametrization(s, &q(1, 2), &q(-9, 4)).unwrap();
        assert!(p.on_curve_identity());
        let inv = inverse_by_gcd(&p).unwrap();
        assert!(inverses_agree(&p, &inv, 20));
        let t = kq(2, 3);
        assert!(p.on_curve(&p.point(&t).unwrap()));
        assert!(p.base.1.sub(&kq(1, 1)).signum() > 0);
    }
}
