use std::fmt::Write as _;

use khk_core::analysis::{
    example_moebius, find_h_for_period, pseudo_moebius, pseudo_rotation_extracted, rho_example, rotation_of, s1_find_eps_for_period,
    s1_rotation, VALIDATION,
};
use khk_core::catalog::SystemEntry;
use khk_core::fibration::{classify_conic, parametrization_for, pencil_for, s1_parametrization, Basin};
use khk_core::field::{q_to_f64, qi, Q};
use khk_core::khk::{khk_map, FloatKhk};
use khk_core::moebius::{classify as classify_moebius, detect_rational, extract_conjugate, MoebiusKind, MoebiusTransform};
use khk_core::orbit::{energy_drift, energy_drift_f64, iterate_exact, iterate_float, portrait as run_portrait, OrbitConfig, SeedFan};
use khk_core::pseudo::{build_pseudo, build_pseudo_f64, pseudo_rotation_number};
use khk_core::verify::{verify_system, CheckKind, MapKind, Step};
use khk_core::{Error, Result};
use serde_json::{json, Value};

use crate::scalar::Scalar;
use crate::{
    CatalogArgs, Ctx, FindEpsArgs, FindHArgs, Format, LevelArgs, MapSel, MoebiusArgs, OrbitArgs, Outcome, PortraitArgs, RotationArgs,
    VerifyArgs,
};

type FloatMap = Box<dyn Fn(f64, f64) -> Option<(f64, f64)>>;

fn exact_map(sys: &SystemEntry, eps: &Q, map: MapSel) -> Result<khk_core::expr::RationalMap2> {
    match map {
        MapSel::Khk => khk_map(&sys.field, eps),
        MapSel::Pseudo => build_pseudo(sys, eps)?
            .exact
            .ok_or_else(|| Error::Precondition(format!("the pseudo-KHK map of {} is not rational", sys.name))),
    }
}

fn float_map(sys: &SystemEntry, eps: f64, map: MapSel) -> Result<FloatMap> {
    Ok(match map {
        MapSel::Khk => {
            let f = FloatKhk::new(&sys.field, eps);
            Box::new(move |x, y| f.apply(x, y))
        }
        MapSel::Pseudo => {
            let p = build_pseudo_f64(sys, eps)?;
            Box::new(move |x, y| p.apply(x, y).ok())
        }
    })
}

fn map_name(map: MapSel) -> &'static str {
    match map {
        MapSel::Khk => "khk",
        MapSel::Pseudo => "pseudo",
    }
}

fn fmt_rational(r: Option<(u64, u64)>) -> Value {
    r.map_or(Value::Null, |(p, q)| Value::String(format!("{p}/{q}")))
}

/// Confirmed `p/q` for an extracted conjugate with rotation number `rho`.
fn rational_of(m: &MoebiusTransform, rho: f64) -> Result<Option<(u64, u64)>> {
    Ok(if classify_moebius(m)?.kind == MoebiusKind::Identity { Some((0, 1)) } else { detect_rational(m, rho) })
}

pub fn classify(ctx: &Ctx, a: LevelArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    let (eps, h) = (a.eps.as_rational()?, a.h.as_rational()?);
    let class = classify_conic(&pencil_for(sys)?, &h, &eps)?;
    let json = json!({ "system": sys.name, "eps": a.eps.to_string(), "h": a.h.to_string(), "class": class.name() });
    Ok(Outcome::new(format!("{class}\n"), json))
}

struct RotationReport {
    rho: f64,
    rational: Option<(u64, u64)>,
    method: &'static str,
    closed_form: Option<f64>,
}

fn s1_basin_of(h: f64) -> Result<Basin> {
    if h > 0.0 {
        Ok(Basin::O1)
    } else if h < -1.0 {
        Ok(Basin::O2)
    } else {
        Err(Error::Domain(format!("h = {h} is not a closed level of S1; expected h > 0 or h < -1")))
    }
}

fn s1_extracted(sys: &SystemEntry, eps: &Q, h: &Q) -> Result<(f64, Option<(u64, u64)>)> {
    let m = extract_conjugate(&khk_map(&sys.field, eps)?, &s1_parametrization(sys, h)?, VALIDATION)?;
    let rho = rotation_of(&m)?;
    Ok((rho, rational_of(&m, rho)?))
}

fn rotation_report(sys: &SystemEntry, a: &RotationArgs) -> Result<RotationReport> {
    let e = a.eps.to_f64();
    let exact_level = match (a.eps.exact(), a.h.as_ref().and_then(Scalar::exact)) {
        (Some(eps), Some(h)) => Some((eps, h)),
        _ => None,
    };
    match (a.map, sys.name.as_str()) {
        (MapSel::Pseudo, _) => {
            let closed = pseudo_rotation_number(e);
            if let (Some((eps, h)), Some(false)) = (exact_level, sys.linearization.as_ref().map(|l| l.radical)) {
                let m = pseudo_moebius(sys, eps, h)?;
                let rho = pseudo_rotation_extracted(sys, eps, h)?;
                return Ok(RotationReport { rho, rational: rational_of(&m, rho)?, method: "extracted", closed_form: Some(closed) });
            }
            if sys.linearization.is_none() {
                return Err(Error::Precondition(format!("{} has no linearization", sys.name)));
            }
            Ok(RotationReport { rho: closed, rational: None, method: "closed_form", closed_form: Some(closed) })
        }
        (MapSel::Khk, "petrera_suris") => {
            let h = a.h.as_ref().ok_or_else(|| Error::Precondition("--h is required for petrera_suris".into()))?;
            let closed = rho_example(e, h.to_f64())?;
            match exact_level {
                Some((eps, h)) => {
                    let m = example_moebius(eps, h)?;
                    let rho = rotation_of(&m)?;
                    Ok(RotationReport { rho, rational: rational_of(&m, rho)?, method: "extracted", closed_form: Some(closed) })
                }
                None => Ok(RotationReport { rho: closed, rational: None, method: "closed_form", closed_form: Some(closed) }),
            }
        }
        (MapSel::Khk, "S1") => {
            let basin = match (&a.h, &a.basin) {
                (Some(h), _) => s1_basin_of(h.to_f64())?,
                (None, Some(b)) => Basin::parse(b)?,
                (None, None) => return Err(Error::Precondition("S1 needs --h or --basin".into())),
            };
            let closed = s1_rotation(e, basin);
            // a representative level stands in for the basin
            let level = match (&a.h, basin) {
                (Some(h), _) => h.exact().cloned(),
                (None, Basin::O1) => Some(qi(1)),
                (None, Basin::O2) => Some(qi(-2)),
                (None, Basin::LineAtInfinity) => None,
            };
            match (a.eps.exact(), level) {
                (Some(eps), Some(h)) => {
                    let (rho, rational) = s1_extracted(sys, eps, &h)?;
                    Ok(RotationReport { rho, rational, method: "extracted", closed_form: Some(closed) })
                }
                _ => Ok(RotationReport { rho: closed, rational: None, method: "closed_form", closed_form: Some(closed) }),
            }
        }
        (MapSel::Khk, other) => Err(Error::Precondition(format!(
            "the KHK map of {other} has no rotation number on record; try --map pseudo"
        ))),
    }
}

pub fn rotation(ctx: &Ctx, a: RotationArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    let r = rotation_report(sys, &a)?;
    let mut text = format!("rho = {}\n", r.rho);
    match r.rational {
        Some((p, q)) => writeln!(text, "rational {p}/{q}").unwrap(),
        None => writeln!(text, "no rational value confirmed").unwrap(),
    }
    writeln!(text, "method {}", r.method).unwrap();
    let json = json!({
        "system": sys.name,
        "map": map_name(a.map),
        "eps": a.eps.to_string(),
        "h": a.h.as_ref().map(|h| h.to_string()),
        "basin": a.basin,
        "rho": r.rho,
        "rational": fmt_rational(r.rational),
        "method": r.method,
        "closed_form": r.closed_form,
    });
    Ok(Outcome::new(text, json))
}

pub fn find_eps(ctx: &Ctx, a: FindEpsArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    if sys.name != "S1" {
        return Err(Error::Precondition(format!("find-eps is only available for S1, not {}", sys.name)));
    }
    let sols = s1_find_eps_for_period(a.period)?;
    let mut text = String::new();
    for s in &sols {
        writeln!(text, "eps = {:.10}  (rho = {}/{}, {}, residual {:e})", s.eps, s.numerator, a.period, s.method, s.residual).unwrap();
    }
    let json = json!({ "system": sys.name, "period": a.period, "solutions": sols });
    Ok(Outcome::new(text, json))
}

pub fn find_h(ctx: &Ctx, a: FindHArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    if sys.name != "petrera_suris" {
        return Err(Error::Precondition(format!("find-h is only available for petrera_suris, not {}", sys.name)));
    }
    let r = find_h_for_period(&a.eps.as_rational()?, a.period)?;
    let hs: Vec<String> = r.witnesses.iter().map(|h| format!("{h:.15}")).collect();
    let text = format!("h = {}  (rho = {}/{}, {}, residual {:e})\n", hs.join(", "), r.numerator, r.period, r.method, r.residual);
    let json = json!({ "system": sys.name, "eps": a.eps.to_string(), "report": r });
    Ok(Outcome::new(text, json))
}

pub fn verify(ctx: &Ctx, a: VerifyArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    let kinds = a.checks.split(',').filter(|s| !s.trim().is_empty()).map(CheckKind::parse).collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        return Err(Error::Precondition("no checks requested".into()));
    }
    let step = match &a.eps {
        Scalar::Exact(q) => Step::Exact(q.clone()),
        Scalar::Float { value, .. } => Step::Float(*value),
    };
    let kind = match a.map {
        MapSel::Khk => MapKind::Khk,
        MapSel::Pseudo => MapKind::Pseudo,
    };
    let results = verify_system(sys, &step, kind, &kinds, &a.delta.as_rational()?, ctx.seed)?;
    let text: String = results.iter().map(|r| format!("{r}\n")).collect();
    let mut out = Outcome::new(text, json!(results));
    out.ok = results.iter().all(|r| r.holds());
    Ok(out)
}

pub fn orbit(ctx: &Ctx, a: OrbitArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    let mut cfg = OrbitConfig::default();
    if let Some(t) = ctx.tol {
        cfg.tol = t;
    }
    let integral = sys.primary_integral().ok();
    let exact_inputs = match (a.eps.exact(), a.x.exact(), a.y.exact()) {
        (Some(e), Some(x), Some(y)) => Some((e, (x.clone(), y.clone()))),
        _ => None,
    };
    let exact = match exact_inputs {
        Some((e, start)) => match exact_map(sys, e, a.map) {
            Ok(m) => Some((m, start)),
            Err(_) if a.map == MapSel::Pseudo => None,
            Err(err) => return Err(err),
        },
        None => None,
    };
    let (rec, drift, mode) = match exact {
        Some((m, start)) => {
            let rec = iterate_exact(&m, start, a.steps, &cfg)?;
            let drift = integral.map(|h| energy_drift(h, &rec)).transpose()?;
            (rec, drift, "exact")
        }
        None => {
            let f = float_map(sys, a.eps.to_f64(), a.map)?;
            let rec = iterate_float(&*f, (a.x.to_f64(), a.y.to_f64()), a.steps, &cfg)?;
            let drift = integral.map(|h| energy_drift_f64(h, &rec.points)).transpose()?;
            (rec, drift, "float")
        }
    };
    let mut csv = String::from("iter,x,y\n");
    for (i, p) in rec.points.iter().enumerate() {
        writeln!(csv, "{i},{:.16e},{:.16e}", p.0, p.1).unwrap();
    }
    let mut text = format!("{mode} orbit of length {} ({:?})\n", rec.length, rec.stop);
    if let Some(p) = rec.detected_period {
        writeln!(text, "period {p}").unwrap();
    }
    if let Some(d) = drift {
        writeln!(text, "energy drift {d:e}").unwrap();
    }
    let json = json!({ "system": sys.name, "map": map_name(a.map), "mode": mode, "orbit": rec, "energy_drift": drift });
    let mut out = Outcome::new(text, json);
    out.csv = Some(csv);
    out.default = Some(Format::Csv);
    Ok(out)
}

fn parse_point(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Domain(format!("expected x,y but got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let v = |t: &str| t.trim().parse::<Scalar>().map(|s| s.to_f64()).map_err(|_| bad());
    Ok((v(x)?, v(y)?))
}

pub fn portrait(ctx: &Ctx, a: PortraitArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    let center = match &a.center {
        Some(c) => parse_point(c)?,
        None => (q_to_f64(&sys.center.0), q_to_f64(&sys.center.1)),
    };
    if a.seeds == 0 || !(a.r_max > 0.0) {
        return Err(Error::Precondition("the seed fan needs at least one seed and a positive radius".into()));
    }
    let fan = SeedFan::along_x(center, a.r_max, a.seeds);
    let f = float_map(sys, a.eps.to_f64(), a.map)?;
    let p = run_portrait(&*f, &fan.seeds(), a.iters, a.escape);
    let drift = match sys.primary_integral() {
        Ok(h) => p.orbits.iter().filter(|o| o.len() > 1).map(|o| energy_drift_f64(h, o)).collect::<Result<Vec<_>>>()?.into_iter().reduce(f64::max),
        Err(_) => None,
    };
    let text = format!("{} seeds, {} points, max energy drift {}\n", p.seeds.len(), p.point_count(), drift.map_or("n/a".into(), |d| format!("{d:e}")));
    let json = json!({
        "system": sys.name,
        "map": map_name(a.map),
        "eps": a.eps.to_string(),
        "fan": fan,
        "iters": a.iters,
        "points": p.point_count(),
        "has_nan": p.has_nan(),
        "energy_drift": drift,
    });
    let mut out = Outcome::new(text, json);
    out.csv = Some(p.to_csv());
    out.svg = Some(p.to_svg());
    out.default = Some(Format::Svg);
    Ok(out)
}

pub fn moebius(ctx: &Ctx, a: MoebiusArgs) -> Result<Outcome> {
    let sys = ctx.catalog.get(&a.system)?;
    let eps = a.eps.require_exact("eps")?;
    let h = a.h.require_exact("h")?;
    let map = exact_map(sys, eps, a.map)?;
    let m = extract_conjugate(&map, &parametrization_for(sys, eps, h)?, VALIDATION)?;
    let class = classify_moebius(&m)?;
    let rho = match class.kind {
        MoebiusKind::Identity => Some(0.0),
        _ => class.rotation_number,
    };
    let rational = match (class.kind, rho) {
        (MoebiusKind::Identity, _) => Some((0, 1)),
        (_, Some(r)) => detect_rational(&m, r),
        _ => None,
    };
    let [ca, cb, cc, cd] = m.coeffs();
    let mut text = format!("M(t) = {m}\n(a, b, c, d) = ({ca}, {cb}, {cc}, {cd})\nDelta = {}\nkind {}\n", class.delta, class.kind.name());
    if let Some(r) = rho {
        writeln!(text, "rho = {r}").unwrap();
    }
    if let Some((p, q)) = rational {
        writeln!(text, "rational {p}/{q}").unwrap();
    }
    for fp in &class.fixed_points {
        writeln!(text, "fixed point t = {} multiplier {}", fp.t, fp.multiplier).unwrap();
    }
    let exact = m.exact.as_ref().map(|e| e.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    let json = json!({
        "system": sys.name,
        "map": map_name(a.map),
        "eps": a.eps.to_string(),
        "h": a.h.to_string(),
        "coefficients": [ca, cb, cc, cd],
        "exact_coefficients": exact,
        "delta": class.delta,
        "xi": [class.xi.re, class.xi.im],
        "kind": class.kind.name(),
        "rho": rho,
        "rational": fmt_rational(rational),
        "fixed_points": class.fixed_points.iter().map(|f| json!({ "t": f.t, "multiplier": f.multiplier })).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(text, json))
}

fn entry_json(s: &SystemEntry) -> Value {
    json!({
        "name": s.name,
        "components": [s.components[0].to_string(), s.components[1].to_string()],
        "first_integrals": s.first_integrals.iter().map(|i| json!({ "name": i.name, "expr": i.expr.to_string() })).collect::<Vec<_>>(),
        "map_integrals": s.map_integrals.iter().map(|i| i.name.clone()).collect::<Vec<_>>(),
        "linearization": s.linearization.as_ref().map(|l| json!({ "radical": l.radical, "omega": l.omega.to_string() })),
        "commuting_field": s.commuting_field.as_ref().map(|f| f.to_string()),
        "center": [s.center.0.to_string(), s.center.1.to_string()],
        "notes": s.notes,
    })
}

pub fn catalog(ctx: &Ctx, a: CatalogArgs) -> Result<Outcome> {
    match &a.system {
        Some(name) => {
            let s = ctx.catalog.get(name)?;
            let mut text = format!("{}\n  x' = {}\n  y' = {}\n", s.name, s.components[0], s.components[1]);
            for i in &s.first_integrals {
                writeln!(text, "  {} = {}", i.name, i.expr).unwrap();
            }
            if let Some(l) = &s.linearization {
                writeln!(text, "  linearization with omega = {}{}", l.omega, if l.radical { " (radical inverse)" } else { "" }).unwrap();
            }
            if !s.notes.is_empty() {
                writeln!(text, "  {}", s.notes).unwrap();
            }
            Ok(Outcome::new(text, entry_json(s)))
        }
        None => {
            let entries = ctx.catalog.entries();
            let text = entries.iter().map(|s| format!("{}: ({}, {})\n", s.name, s.components[0], s.components[1])).collect();
            Ok(Outcome::new(text, Value::Array(entries.iter().map(entry_json).collect())))
        }
    }
}
