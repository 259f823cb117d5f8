//! Rotation numbers, periods and parameter searches.

use std::f64::consts::{PI, TAU};

use num_integer::Integer;
use serde::Serialize;

use crate::catalog::{system, SystemEntry};
use crate::error::{Error, Result};
use crate::fibration::{parametrization_for, ps_parametrization, s1_parametrization, Basin, CurveParametrization};
use crate::field::{q_from_f64, q_to_f64, qi, Q};
use crate::khk::{khk_map, FloatKhk};
use crate::moebius::{classify, extract_conjugate, MoebiusKind, MoebiusTransform};
use crate::numeric::{angle01, dist, frac01};
use crate::pseudo::build_pseudo;
use crate::sample::{box_points, SEED};

/// Validation samples used for every Möbius extraction.
pub const VALIDATION: usize = 20;

/// `arg((1−ε²+2iε)/(1+ε²))/(2π)` in `[0, 1)`.
pub fn rho_plus(eps: f64) -> f64 {
    frac01((2.0 * eps).atan2(1.0 - eps * eps) / TAU)
}

pub fn rho_minus(eps: f64) -> f64 {
    frac01(1.0 - rho_plus(eps))
}

/// Distance between two rotation numbers on the circle `R/Z`.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = frac01(a - b);
    d.min(1.0 - d)
}

/// `arctan(−2ε√(−4−2h) / (1+(4+2h)ε²))` with values in `[−π/2, π/2]`.
pub fn theta(eps: f64, h: f64) -> f64 {
    let s = (-4.0 - 2.0 * h).sqrt();
    (-2.0 * eps * s / (1.0 + (4.0 + 2.0 * h) * eps * eps)).atan()
}

/// `−(1+4ε²)/(2ε²)`, where `arg ξ` crosses `3π/2` (or `π/2`) for `|ε| > 1`.
pub fn breakpoint(eps: f64) -> f64 {
    -(1.0 + 4.0 * eps * eps) / (2.0 * eps * eps)
}

fn check_example(eps: f64, h: f64) -> Result<()> {
    if eps == 0.0 {
        return Err(Error::Precondition("eps must be nonzero".into()));
    }
    if !(h > -2.5 && h < -2.0) {
        return Err(Error::Domain(format!("h = {h} is outside (-5/2, -2)")));
    }
    Ok(())
}

/// Piecewise closed form of the rotation number of the quadratic example on
/// the level `V = h`, `−5/2 < h < −2`.
pub fn rho_example(eps: f64, h: f64) -> Result<f64> {
    check_example(eps, h)?;
    let th = theta(eps, h) / TAU;
    let f = breakpoint(eps);
    let r = if eps > 0.0 && eps <= 1.0 {
        1.0 + th
    } else if eps > 1.0 {
        if h < f {
            0.5 + th
        } else if h == f {
            0.75
        } else {
            1.0 + th
        }
    } else if eps >= -1.0 {
        th
    } else if h < f {
        0.5 + th
    } else if h == f {
        0.25
    } else {
        th
    };
    Ok(frac01(r))
}

/// `arg ξ / (2π)` with `ξ = (1+(4+2h)ε² − 2iε√(−4−2h))/(1−(4+2h)ε²)`.
pub fn rho_example_arg(eps: f64, h: f64) -> Result<f64> {
    check_example(eps, h)?;
    let k = 4.0 + 2.0 * h;
    let den = 1.0 - k * eps * eps;
    let re = (1.0 + k * eps * eps) / den;
    let im = -2.0 * eps * (-k).sqrt() / den;
    Ok(frac01(im.atan2(re) / TAU))
}

/// Exact Möbius conjugate of the example map on `V = h`.
pub fn example_moebius(eps: &Q, h: &Q) -> Result<MoebiusTransform> {
    let sys = system("petrera_suris")?;
    let map = khk_map(&sys.field, eps)?;
    let param = ps_parametrization(sys, eps, h)?;
    extract_conjugate(&map, &param, VALIDATION)
}

/// `ρ` of an extracted conjugate; the identity counts as rotation number 0.
pub fn rotation_of(m: &MoebiusTransform) -> Result<f64> {
    let c = classify(m)?;
    match c.kind {
        MoebiusKind::Identity => Ok(0.0),
        _ => c.rotation_number.ok_or_else(|| Error::Precondition(format!("Delta = {} is not negative", c.delta))),
    }
}

pub fn rho_example_extracted(eps: &Q, h: &Q) -> Result<f64> {
    rotation_of(&example_moebius(eps, h)?)
}

/// `|rho_example − ρ(extracted M_h)|` on the circle.
pub fn rho_example_match(eps: &Q, h: &Q) -> Result<f64> {
    let closed = rho_example(q_to_f64(eps), q_to_f64(h))?;
    Ok(circle_dist(closed, rho_example_extracted(eps, h)?))
}

/// `lim_{h→−5/2} ρ_ε(h) = arg((1−ε²−2iε)/(1+ε²))/(2π)`.
pub fn rho_c(eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Err(Error::Precondition("eps must be nonzero".into()));
    }
    Ok(frac01((-2.0 * eps).atan2(1.0 - eps * eps) / TAU))
}

/// `⌊1/(1−ρ_c)⌋ + 1`.
pub fn period_bound_from_rho_c(rho_c: f64) -> u64 {
    (1.0 / (1.0 - rho_c)).floor() as u64 + 1
}

/// Smallest period filled on some level; negative steps use `|ε|`, whose
/// rotation interval is the mirror image `(0, 1 − ρ_c(|ε|))`.
pub fn min_period_bound(eps: f64) -> Result<u64> {
    Ok(period_bound_from_rho_c(rho_c(eps.abs())?))
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub period: u64,
    pub numerator: u64,
    pub witnesses: Vec<f64>,
    pub method: String,
    pub residual: f64,
}

/// A level `h ∈ (−5/2, −2)` with rotation number `q/p`, `q` the smallest
/// numerator coprime to `p` inside the rotation interval.
pub fn find_h_for_period(eps: &Q, p: u64) -> Result<PeriodReport> {
    let e = q_to_f64(eps);
    let bound = min_period_bound(e)?;
    if p < bound {
        return Err(Error::Precondition(format!("period {p} is below the bound {bound}")));
    }
    let rc = rho_c(e)?;
    let (lo_r, hi_r) = if e > 0.0 { (rc, 1.0) } else { (0.0, rc) };
    let qn = (1..p)
        .find(|&qn| qn.gcd(&p) == 1 && {
            let r = qn as f64 / p as f64;
            r > lo_r && r < hi_r
        })
        .ok_or_else(|| Error::Degenerate(format!("no q/{p} inside ({lo_r}, {hi_r})")))?;
    let target = qn as f64 / p as f64;
    let (mut lo, mut hi) = (-2.5f64, -2.0f64);
    let sign = e.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = rho_example(e, mid)?;
        if (r - target).abs() < 1e-12 {
            lo = mid;
            hi = mid;
            break;
        }
        if sign * (r - target) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    let m = example_moebius(eps, &q_from_f64(h)?)?;
    let residual = m.power_residual(p);
    if !(residual < 1e-8) {
        return Err(Error::MoebiusValidation(format!("M^{p} is not scalar at h = {h}: residual {residual:e}")));
    }
    Ok(PeriodReport {
        period: p,
        numerator: qn,
        witnesses: vec![h],
        method: "bisection on the closed form, confirmed by the Moebius matrix power".into(),
        residual,
    })
}

/// Shape of `h ↦ ρ_ε(h)` on `(−5/2, −2)`.
#[derive(Clone, Debug, Serialize)]
pub struct RotationProfile {
    pub system: String,
    pub eps: f64,
    pub domain: (f64, f64),
    pub increasing: bool,
    pub limits: (f64, f64),
}

impl RotationProfile {
    pub fn example(eps: f64) -> Result<Self> {
        let rc = rho_c(eps)?;
        let limits = if eps > 0.0 { (rc, 1.0) } else { (rc, 0.0) };
        Ok(RotationProfile { system: "petrera_suris".into(), eps, domain: (-2.5, -2.0), increasing: eps > 0.0, limits })
    }

    pub fn evaluate(&self, h: f64) -> Result<f64> {
        rho_example(self.eps, h)
    }
}

/// `ρ₊` on `O1` and on the invariant line at infinity, `ρ₋ = 1 − ρ₊` on `O2`.
pub fn s1_rotation(eps: f64, basin: Basin) -> f64 {
    match basin {
        Basin::O1 | Basin::LineAtInfinity => rho_plus(eps),
        Basin::O2 => rho_minus(eps),
    }
}

/// Rotation number of the `S1` KHK map on `H1 = h` by Möbius extraction.
pub fn s1_rotation_extracted(eps: &Q, h: &Q) -> Result<f64> {
    let sys = system("S1")?;
    let map = khk_map(&sys.field, eps)?;
    rotation_of(&extract_conjugate(&map, &s1_parametrization(sys, h)?, VALIDATION)?)
}

/// Möbius conjugate of the rational pseudo-KHK map of `system` on level `h`.
pub fn pseudo_moebius(sys: &SystemEntry, eps: &Q, h: &Q) -> Result<MoebiusTransform> {
    let p = build_pseudo(sys, eps)?;
    let map = p.exact.ok_or_else(|| Error::Precondition(format!("{} has a radical linearization", sys.name)))?;
    extract_conjugate(&map, &parametrization_for(sys, eps, h)?, VALIDATION)
}

/// Rotation number of the pseudo-KHK map on level `h`, measured in the
/// direction of the flow of the field.
pub fn pseudo_rotation_extracted(sys: &SystemEntry, eps: &Q, h: &Q) -> Result<f64> {
    let rho = rotation_of(&pseudo_moebius(sys, eps, h)?)?;
    let forward = runs_with_flow(sys, &parametrization_for(sys, eps, h)?)?;
    Ok(if forward || rho == 0.0 { rho } else { 1.0 - rho })
}

/// Whether increasing `t` moves along the flow: sign of `P'(t)·X(P(t))`.
fn runs_with_flow(sys: &SystemEntry, param: &CurveParametrization) -> Result<bool> {
    const DT: f64 = 1e-6;
    for t in [0.25, 0.5, 1.5, -0.75, 3.0, -2.5] {
        let (Some(a), Some(b)) = (param.point_f64(t - DT), param.point_f64(t + DT)) else { continue };
        let p = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let x = sys.field.eval_f64(p.0, p.1);
        let dot = (b.0 - a.0) * x.0 + (b.1 - a.1) * x.1;
        if dot.is_finite() && dot.abs() > 1e-14 {
            return Ok(dot > 0.0);
        }
    }
    Err(Error::Degenerate(format!("cannot orient the parametrization of a {} level against the flow", sys.name)))
}

/// Angle swept by `L` between `p` and the printed pseudo-KHK image of `p`,
/// in turns; the route for radical linearizations.
pub fn pseudo_rotation_printed(sys: &SystemEntry, eps: f64, p: (f64, f64)) -> Result<f64> {
    let lin = sys
        .linearization
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("{} has no linearization", sys.name)))?;
    let printed = sys
        .printed_pseudo
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("{} has no printed pseudo-KHK map", sys.name)))?;
    let outside = || Error::Domain(format!("({}, {}) is outside the linearization domain", p.0, p.1));
    let img = printed.eval_f64(eps, p.0, p.1).ok_or_else(outside)?;
    let a = lin.forward_f64(p.0, p.1).ok_or_else(outside)?;
    let b = lin.forward_f64(img.0, img.1).ok_or_else(outside)?;
    let turn = (angle01(b.1, b.0) - angle01(a.1, a.0)) / TAU;
    // L conjugates to the rotation field with angular speed ω
    let w = q_to_f64(&lin.omega);
    Ok(frac01(if w < 0.0 { -turn } else { turn }))
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsSolution {
    pub eps: f64,
    pub numerator: u64,
    pub method: String,
    /// Largest `|Φ^p(s) − s|` over the confirmation seeds.
    pub residual: f64,
}

fn s1_seeds(n: usize) -> Vec<(f64, f64)> {
    box_points((0.0, 0.0), 0.45, n, SEED, &|_, y| 1.0 + 2.0 * y > 0.2)
}

fn float_return(map: &FloatKhk, s: (f64, f64), n: u64) -> f64 {
    let mut p = s;
    for _ in 0..n {
        match map.apply(p.0, p.1) {
            Some(next) => p = next,
            None => return f64::INFINITY,
        }
    }
    dist(p, s)
}

/// All `ε` with `ρ₊(ε) = q/p`, `gcd(q, p) = 1`: `ε = tan(πq/p)`. Each value
/// is confirmed by orbit return at 5 seeds, exactly when `ε` is rational,
/// and checked minimal over the proper divisors of `p`.
pub fn s1_find_eps_for_period(p: u64) -> Result<Vec<EpsSolution>> {
    if p == 0 {
        return Err(Error::Precondition("period must be positive".into()));
    }
    if p == 2 {
        return Err(Error::Precondition("rotation number 1/2 is not attained by rho_+".into()));
    }
    let sys = system("S1")?;
    let seeds = s1_seeds(5);
    let mut out = Vec::new();
    for qn in 0..p {
        if qn.gcd(&p) != 1 || 2 * qn == p {
            continue;
        }
        let exact = exact_tangent(qn, p);
        let eps = match &exact {
            Some(e) => q_to_f64(e),
            None => (PI * qn as f64 / p as f64).tan(),
        };
        let (residual, method) = match &exact {
            Some(e) => (exact_return(sys, e, p, &seeds)?, "exact orbit return"),
            None => {
                let map = FloatKhk::new(&sys.field, eps);
                let r = seeds.iter().map(|&s| float_return(&map, s, p)).fold(0.0, f64::max);
                (r, "floating orbit return")
            }
        };
        if !(residual < 1e-9) {
            return Err(Error::Degenerate(format!("eps = {eps} fails the {p}-fold return: {residual:e}")));
        }
        let map = FloatKhk::new(&sys.field, eps);
        for d in (1..p).filter(|d| p % d == 0) {
            let r = seeds.iter().map(|&s| float_return(&map, s, d)).fold(0.0, f64::max);
            if r < 1e-6 {
                return Err(Error::Degenerate(format!("eps = {eps} already returns after {d} steps")));
            }
        }
        out.push(EpsSolution { eps, numerator: qn, method: method.into(), residual });
    }
    out.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    Ok(out)
}

/// `tan(πq/p)` when it is rational: `0` and `±1`.
fn exact_tangent(qn: u64, p: u64) -> Option<Q> {
    match (4 * qn).checked_rem(p)? {
        0 if 4 * qn / p == 0 => Some(qi(0)),
        0 if 4 * qn / p == 1 => Some(qi(1)),
        0 if 4 * qn / p == 3 => Some(qi(-1)),
        _ => None,
    }
}

fn exact_return(sys: &SystemEntry, eps: &Q, p: u64, seeds: &[(f64, f64)]) -> Result<f64> {
    let map = khk_map(&sys.field, eps)?;
    for &(x, y) in seeds {
        let s = (q_from_f64((x * 64.0).round() / 64.0)?, q_from_f64((y * 64.0).round() / 64.0)?);
        let mut pt = s.clone();
        for _ in 0..p {
            pt = map.eval(&pt)?;
        }
        if pt != s {
            return Ok(f64::INFINITY);
        }
    }
    Ok(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attractor,
    Repellor,
    GlobalAttractor,
    Neutral,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointInfo {
    pub point: (f64, f64),
    /// `|M'(t)|` at the parameter of the point.
    pub multiplier: f64,
    pub stability: Stability,
}

/// Fixed points `(0, 2 ± √(4+2h))` of the example map on `V = h`, `h ≥ −2`,
/// tagged by the derivative of the conjugate Möbius map.
pub fn example_fixed_points(eps: &Q, h: &Q) -> Result<Vec<FixedPointInfo>> {
    if *h < qi(-2) {
        return Err(Error::Domain(format!("h = {h} < -2 has no fixed points on the level")));
    }
    let sys = system("petrera_suris")?;
    let param = ps_parametrization(sys, eps, h)?;
    let m = extract_conjugate(&khk_map(&sys.field, eps)?, &param, VALIDATION)?;
    let r = (4.0 + 2.0 * q_to_f64(h)).sqrt();
    let pts: Vec<(f64, f64)> = if r == 0.0 { vec![(0.0, 2.0)] } else { vec![(0.0, 2.0 + r), (0.0, 2.0 - r)] };
    pts.into_iter()
        .map(|pt| {
            let t = param.invert_f64(pt.0, pt.1);
            let back = m.apply_f64(t);
            if (back - t).abs() > 1e-8 * t.abs().max(1.0) {
                return Err(Error::Degenerate(format!("({}, {}) is not fixed by the conjugate: t = {t}, M(t) = {back}", pt.0, pt.1)));
            }
            let multiplier = m.derivative_f64(t).abs();
            let stability = if r == 0.0 {
                Stability::GlobalAttractor
            } else if (multiplier - 1.0).abs() < 1e-12 {
                Stability::Neutral
            } else if multiplier < 1.0 {
                Stability::Attractor
            } else {
                Stability::Repellor
            };
            Ok(FixedPointInfo { point: pt, multiplier, stability })
        })
        .collect()
}
