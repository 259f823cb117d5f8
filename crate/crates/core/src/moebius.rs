//! Möbius maps `t ↦ (at + b)/(ct + d)` on the extended real line.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::RationalMap2;
use crate::fibration::{CurveParametrization, Param};
use crate::field::{q, qi, Field, QuadExt};
use crate::numeric::frac01;

type K = QuadExt;

fn kq(n: i64) -> K {
    K::rational(qi(n))
}

/// Normalized so that `c = 1`, or `a = 1` when `c = 0`.
#[derive(Clone, Debug)]
pub struct MoebiusTransform {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub exact: Option<[K; 4]>,
}

impl MoebiusTransform {
    pub fn from_f64(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if a * d - b * c == 0.0 {
            return Err(Error::Degenerate("singular Moebius matrix".into()));
        }
        let s = if c != 0.0 { c } else { a };
        Ok(MoebiusTransform { a: a / s, b: b / s, c: c / s, d: d / s, exact: None })
    }

    pub fn from_exact(m: [K; 4]) -> Result<Self> {
        let [a, b, c, d] = &m;
        if a.mul(d).sub(&b.mul(c)).is_zero() {
            return Err(Error::Degenerate("singular Moebius matrix".into()));
        }
        let s = if c.is_zero() { a.clone() } else { c.clone() };
        let n: [K; 4] = [a.div(&s), b.div(&s), c.div(&s), d.div(&s)];
        Ok(MoebiusTransform { a: n[0].to_f64(), b: n[1].to_f64(), c: n[2].to_f64(), d: n[3].to_f64(), exact: Some(n) })
    }

    pub fn identity() -> Self {
        Self::from_exact([kq(1), kq(0), kq(0), kq(1)]).expect("regular")
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `(d − a)² + 4bc`.
    pub fn delta(&self) -> f64 {
        match self.delta_exact() {
            Some(v) => v.to_f64(),
            None => (self.d - self.a).powi(2) + 4.0 * self.b * self.c,
        }
    }

    pub fn delta_exact(&self) -> Option<K> {
        let [a, b, c, d] = self.exact.as_ref()?;
        let da = d.sub(a);
        Some(da.mul(&da).add(&kq(4).mul(&b.mul(c))))
    }

    fn delta_sign(&self) -> i32 {
        match self.delta_exact() {
            Some(v) => v.signum(),
            None => {
                let v = self.delta();
                let scale = self.coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs())).powi(2);
                if v.abs() <= 1e-14 * scale {
                    0
                } else if v > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn apply(&self, t: &Param) -> Option<Param> {
        let [a, b, c, d] = self.exact.as_ref()?;
        Some(Param { num: a.mul(&t.num).add(&b.mul(&t.den)), den: c.mul(&t.num).add(&d.mul(&t.den)) })
    }

    pub fn apply_f64(&self, t: f64) -> f64 {
        if t.is_infinite() {
            return if self.c == 0.0 { f64::INFINITY } else { self.a / self.c };
        }
        let den = self.c * t + self.d;
        if den == 0.0 {
            f64::INFINITY
        } else {
            (self.a * t + self.b) / den
        }
    }

    pub fn derivative_f64(&self, t: f64) -> f64 {
        self.det() / (self.c * t + self.d).powi(2)
    }

    /// Exact `M^n` as a matrix (not normalized).
    pub fn pow_exact(&self, n: u64) -> Option<[K; 4]> {
        let m = self.exact.as_ref()?;
        let mut acc = [kq(1), kq(0), kq(0), kq(1)];
        let mut base = m.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mat_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mat_mul(&base, &base);
            }
        }
        Some(acc)
    }

    /// Distance of the normalized `M^n` from a scalar matrix:
    /// `max(|b|, |c|, |a − d|) / max(|a|, |d|)`, computed in floating point.
    pub fn power_residual(&self, n: u64) -> f64 {
        let mut acc = [1.0, 0.0, 0.0, 1.0];
        let mut base = self.coeffs();
        let mut e = n;
        let norm = |m: [f64; 4]| {
            let s = m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            m.map(|x| x / s)
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = norm(mat_mul_f(&acc, &base));
            }
            e >>= 1;
            if e > 0 {
                base = norm(mat_mul_f(&base, &base));
            }
        }
        let [a, b, c, d] = acc;
        b.abs().max(c.abs()).max((a - d).abs()) / a.abs().max(d.abs())
    }
}

fn mat_mul(x: &[K; 4], y: &[K; 4]) -> [K; 4] {
    [
        x[0].mul(&y[0]).add(&x[1].mul(&y[2])),
        x[0].mul(&y[1]).add(&x[1].mul(&y[3])),
        x[2].mul(&y[0]).add(&x[3].mul(&y[2])),
        x[2].mul(&y[1]).add(&x[3].mul(&y[3])),
    ]
}

fn mat_mul_f(x: &[f64; 4], y: &[f64; 4]) -> [f64; 4] {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

fn is_scalar(m: &[K; 4]) -> bool {
    m[1].is_zero() && m[2].is_zero() && m[0] == m[3]
}

impl fmt::Display for MoebiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some([a, b, c, d]) => write!(f, "({a}*t + {b})/({c}*t + {d})"),
            None => write!(f, "({}*t + {})/({}*t + {})", self.a, self.b, self.c, self.d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoebiusKind {
    Rotation,
    ParabolicAttractor,
    Hyperbolic,
    Involution,
    Identity,
}

impl MoebiusKind {
    pub fn name(self) -> &'static str {
        match self {
            MoebiusKind::Rotation => "rotation",
            MoebiusKind::ParabolicAttractor => "parabolic_attractor",
            MoebiusKind::Hyperbolic => "hyperbolic",
            MoebiusKind::Involution => "involution",
            MoebiusKind::Identity => "identity",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixedPoint {
    /// `f64::INFINITY` for the point at infinity.
    pub t: f64,
    pub multiplier: f64,
}

#[derive(Clone, Debug)]
pub struct MoebiusClass {
    pub delta: f64,
    pub xi: Complex64,
    pub kind: MoebiusKind,
    pub rotation_number: Option<f64>,
    /// `(p, q)` with `ρ = p/q` confirmed.
    pub rational: Option<(u64, u64)>,
    pub fixed_points: Vec<FixedPoint>,
}

/// `ξ = (T − i√−Δ)/(T + i√−Δ)` for `Δ < 0`, else `(T + √Δ)/(T − √Δ)`, with
/// `T = a + d` of the normalized matrix.
pub fn xi(m: &MoebiusTransform) -> Complex64 {
    let t = m.a + m.d;
    let dl = m.delta();
    if dl < 0.0 {
        let s = (-dl).sqrt();
        Complex64::new(t, -s) / Complex64::new(t, s)
    } else {
        let s = dl.sqrt();
        Complex64::new((t + s) / (t - s), 0.0)
    }
}

pub fn classify(m: &MoebiusTransform) -> Result<MoebiusClass> {
    if m.det() == 0.0 && m.exact.is_none() {
        return Err(Error::Degenerate("singular Moebius matrix".into()));
    }
    let identity = match &m.exact {
        Some(e) => is_scalar(e),
        None => m.b == 0.0 && m.c == 0.0 && m.a == m.d,
    };
    let delta = m.delta();
    let x = xi(m);
    let sign = m.delta_sign();
    let kind = if identity {
        MoebiusKind::Identity
    } else if sign < 0 {
        MoebiusKind::Rotation
    } else if sign == 0 {
        MoebiusKind::ParabolicAttractor
    } else {
        let trace_zero = match &m.exact {
            Some(e) => e[0].add(&e[3]).is_zero(),
            None => (m.a + m.d).abs() <= 1e-14 * m.a.abs().max(m.d.abs()).max(1.0),
        };
        if trace_zero {
            MoebiusKind::Involution
        } else {
            MoebiusKind::Hyperbolic
        }
    };
    let rotation_number = (kind == MoebiusKind::Rotation).then(|| frac01(x.arg() / TAU));
    let rational = match (kind, rotation_number) {
        (MoebiusKind::Rotation, Some(r)) => detect_rational(m, r),
        (MoebiusKind::Identity, _) => Some((0, 1)),
        _ => None,
    };
    Ok(MoebiusClass { delta, xi: x, kind, rotation_number, rational, fixed_points: fixed_points(m, sign) })
}

fn fixed_points(m: &MoebiusTransform, sign: i32) -> Vec<FixedPoint> {
    let mult = |t: f64| FixedPoint { t, multiplier: m.derivative_f64(t) };
    if sign < 0 {
        return Vec::new();
    }
    if m.c == 0.0 {
        let mut out = vec![FixedPoint { t: f64::INFINITY, multiplier: m.d / m.a }];
        if m.a != m.d {
            out.push(mult(m.b / (m.d - m.a)));
        }
        return out;
    }
    let s = if sign == 0 { 0.0 } else { m.delta().sqrt() };
    let t1 = (m.a - m.d + s) / (2.0 * m.c);
    if sign == 0 {
        return vec![mult(t1)];
    }
    vec![mult(t1), mult((m.a - m.d - s) / (2.0 * m.c))]
}

pub fn rotation_number(m: &MoebiusTransform) -> Result<f64> {
    let c = classify(m)?;
    c.rotation_number.ok_or_else(|| Error::Precondition(format!("Delta = {} is not negative", c.delta)))
}

/// `ρ = p/q` from continued-fraction convergents with `q ≤ 10⁶`, confirmed
/// by an exact matrix power for small `q` or by `|2πρq − 2πp| < 1e-9`.
pub fn detect_rational(m: &MoebiusTransform, rho: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut x = rho;
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e12 {
            break;
        }
        let ai = a as u64;
        let (h2, k2) = (ai.checked_mul(h1)?.checked_add(h0)?, ai.checked_mul(k1)?.checked_add(k0)?);
        if k2 > 1_000_000 {
            break;
        }
        if k2 > 0 && confirms(m, rho, h2, k2) {
            return Some((h2 % k2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = x - a;
        if f < 1e-15 {
            break;
        }
        x = 1.0 / f;
    }
    None
}

fn confirms(m: &MoebiusTransform, rho: f64, p: u64, qd: u64) -> bool {
    if m.exact.is_some() && qd <= 256 {
        return is_scalar(&m.pow_exact(qd).expect("exact"));
    }
    (TAU * rho * qd as f64 - TAU * p as f64).abs() < 1e-9
}

/// Null vector of a rank-3 `3×4` system, by elimination over `K`.
fn null_vector(mut rows: [[K; 4]; 3]) -> Option<[K; 4]> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..4 {
        if r == 3 {
            break;
        }
        let Some(p) = (r..3).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].inv();
        for k in 0..4 {
            rows[r][k] = rows[r][k].mul(&inv);
        }
        for i in 0..3 {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for k in 0..4 {
                    rows[i][k] = rows[i][k].sub(&f.mul(&rows[r][k]));
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() < 3 {
        return None;
    }
    let free = (0..4).find(|c| !pivots.contains(c))?;
    let mut v = [kq(0), kq(0), kq(0), kq(0)];
    v[free] = kq(1);
    for (i, &c) in pivots.iter().enumerate() {
        v[c] = rows[i][free].neg();
    }
    Some(v)
}

/// Unique Möbius map with `M(t_k) = s_k`, projectively on the extended line.
pub fn fit_from_triples(pairs: &[(Param, Param); 3]) -> Result<MoebiusTransform> {
    let row = |(t, s): &(Param, Param)| {
        [s.den.mul(&t.num), s.den.mul(&t.den), s.num.mul(&t.num).neg(), s.num.mul(&t.den).neg()]
    };
    let v = null_vector([row(&pairs[0]), row(&pairs[1]), row(&pairs[2])])
        .ok_or_else(|| Error::Degenerate("constraint matrix has rank below 3".into()))?;
    MoebiusTransform::from_exact(v)
}

/// Floating variant; `f64::INFINITY` stands for `∞`.
pub fn fit_from_triples_f64(pairs: &[(f64, f64); 3]) -> Result<MoebiusTransform> {
    let hom = |t: f64| if t.is_infinite() { (1.0, 0.0) } else { (t, 1.0) };
    let mut m = [[0.0f64; 4]; 3];
    for (i, &(t, s)) in pairs.iter().enumerate() {
        let (t1, t0) = hom(t);
        let (s1, s0) = hom(s);
        m[i] = [s0 * t1, s0 * t0, -s1 * t1, -s1 * t0];
    }
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..4 {
        if r == 3 {
            break;
        }
        let p = (r..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[p][col].abs() <= 1e-12 * scale {
            continue;
        }
        m.swap(r, p);
        let inv = 1.0 / m[r][col];
        for k in 0..4 {
            m[r][k] *= inv;
        }
        for i in 0..3 {
            if i != r {
                let f = m[i][col];
                for k in 0..4 {
                    m[i][k] -= f * m[r][k];
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() < 3 {
        return Err(Error::Degenerate("constraint matrix has rank below 3".into()));
    }
    let free = (0..4).find(|c| !pivots.contains(c)).unwrap();
    let mut v = [0.0; 4];
    v[free] = 1.0;
    for (i, &c) in pivots.iter().enumerate() {
        v[c] = -m[i][free];
    }
    MoebiusTransform::from_f64(v[0], v[1], v[2], v[3])
}

/// Sample parameters `0, 1, −1, 2, −2, 1/2, −1/2, 3, …` by height.
pub fn sample_params() -> impl Iterator<Item = K> {
    let mut v: Vec<(i64, i64)> = Vec::new();
    for n in -9i64..=9 {
        for d in 1i64..=6 {
            if num_integer::Integer::gcd(&n, &d) == 1 {
                v.push((n, d));
            }
        }
    }
    v.sort_by_key(|&(n, d)| (n.abs().max(d), d, n.abs(), n < 0));
    v.dedup();
    v.into_iter().map(|(n, d)| K::rational(q(n, d)))
}

fn same_param(a: &Param, b: &Param) -> bool {
    a.num.mul(&b.den) == b.num.mul(&a.den)
}

/// `P⁻¹ ∘ map ∘ P` on the curve of `param`, fitted from three samples and
/// validated exactly at `validation` further samples.
pub fn extract_conjugate(map: &RationalMap2, param: &CurveParametrization, validation: usize) -> Result<MoebiusTransform> {
    let mut pairs: Vec<(Param, Param)> = Vec::new();
    let mut fitted: Option<MoebiusTransform> = None;
    let mut validated = 0;
    let mut poles = 0;
    for t in sample_params() {
        if validated >= validation {
            break;
        }
        let Some(p) = param.point(&t) else {
            poles += 1;
            continue;
        };
        if !param.on_curve(&p) {
            return Err(Error::NotOnCurve(format!("P({t}) = ({}, {})", p.0, p.1)));
        }
        let Some(img) = map.eval_in(&p) else {
            poles += 1;
            continue;
        };
        if !param.on_curve(&img) {
            return Err(Error::CurveNotPreserved(format!("image of P({t}) is ({}, {})", img.0, img.1)));
        }
        let s = param.invert(&img);
        if s.num.is_zero() && s.den.is_zero() {
            poles += 1;
            continue;
        }
        let tp = Param::finite(t.clone());
        match &fitted {
            None => {
                if pairs.iter().any(|(_, s2)| same_param(s2, &s)) {
                    continue;
                }
                pairs.push((tp, s));
                if pairs.len() == 3 {
                    let arr = [pairs[0].clone(), pairs[1].clone(), pairs[2].clone()];
                    fitted = Some(fit_from_triples(&arr)?);
                }
            }
            Some(m) => {
                let pred = m.apply(&tp).expect("exact fit");
                if !same_param(&pred, &s) {
                    return Err(Error::MoebiusValidation(format!(
                        "at t = {t}: fitted {} but the map gives {}",
                        pred.to_f64(),
                        s.to_f64()
                    )));
                }
                validated += 1;
            }
        }
    }
    match fitted {
        Some(m) if validated >= validation => Ok(m),
        _ => Err(Error::Pole { component: 0, x: format!("{poles} samples hit poles"), y: String::new() }),
    }
}
