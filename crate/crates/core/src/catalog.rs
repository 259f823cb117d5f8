//! Catalog of planar systems: fields, integrals, printed map templates and
//! linearizations, loaded from JSON and validated on load.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::parse::{eval_f64, to_rfn_with, Expr, Grammar, Var};
use crate::expr::pit::rfn_identical;
use crate::expr::{RationalFn2, RationalMap2};
use crate::field::{parse_rational, q, Q};
use crate::khk::{khk_map, PolyVectorField};
use crate::pseudo::LinearizationPair;

const BUILTIN: &str = include_str!("../data/catalog.json");

#[derive(Clone, Debug)]
pub struct NamedIntegral {
    pub name: String,
    pub expr: Expr,
    pub rfn: RationalFn2,
}

/// Integral of the discrete map, possibly depending on `eps` and possibly
/// valid only for listed step sizes.
#[derive(Clone, Debug)]
pub struct MapIntegral {
    pub name: String,
    pub expr: Expr,
    pub valid_eps: Option<Vec<Q>>,
}

impl NamedIntegral {
    /// Float value from the catalog expression; the expanded form loses
    /// precision near its poles.
    pub fn eval_f64(&self, x: f64, y: f64) -> Option<f64> {
        crate::expr::parse::eval_f64(&self.expr, &[(Var::X, x), (Var::Y, y)]).ok().filter(|v| v.is_finite())
    }
}

impl MapIntegral {
    pub fn instantiate(&self, eps: &Q) -> Result<RationalFn2> {
        if let Some(v) = &self.valid_eps {
            if !v.contains(eps) {
                return Err(Error::Precondition(format!("{} is only an integral for eps in {:?}", self.name, fmt_list(v))));
            }
        }
        to_rfn_with(&self.expr, &[(Var::Eps, eps.clone())])
    }
}

fn fmt_list(v: &[Q]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Pair of expressions in `x, y, eps`.
#[derive(Clone, Debug)]
pub struct PrintedForm {
    pub components: [Expr; 2],
    pub radical: bool,
}

impl PrintedForm {
    pub fn instantiate(&self, eps: &Q) -> Result<RationalMap2> {
        let c = [(Var::Eps, eps.clone())];
        Ok(RationalMap2::new(to_rfn_with(&self.components[0], &c)?, to_rfn_with(&self.components[1], &c)?))
    }

    pub fn eval_f64(&self, eps: f64, x: f64, y: f64) -> Option<(f64, f64)> {
        let env = [(Var::X, x), (Var::Y, y), (Var::Eps, eps)];
        let a = eval_f64(&self.components[0], &env).ok()?;
        let b = eval_f64(&self.components[1], &env).ok()?;
        (a.is_finite() && b.is_finite()).then_some((a, b))
    }
}

#[derive(Clone, Debug)]
pub struct SystemEntry {
    pub name: String,
    pub field: PolyVectorField,
    pub components: [Expr; 2],
    pub first_integrals: Vec<NamedIntegral>,
    pub map_integrals: Vec<MapIntegral>,
    pub printed_khk: Option<PrintedForm>,
    pub printed_pseudo: Option<PrintedForm>,
    pub linearization: Option<LinearizationPair>,
    pub commuting_field: Option<PolyVectorField>,
    pub measure_density: Option<Expr>,
    /// Field components in `x, y, eps`, possibly with square roots.
    pub lie_symmetry: Option<[Expr; 2]>,
    pub integral_range: Option<String>,
    pub center: (Q, Q),
    pub notes: String,
}

impl SystemEntry {
    pub fn integral(&self, name: &str) -> Result<&NamedIntegral> {
        self.first_integrals
            .iter()
            .find(|i| i.name == name)
            .ok_or_else(|| Error::Catalog(format!("{} has no first integral {name}", self.name)))
    }

    /// First listed integral of the field.
    pub fn primary_integral(&self) -> Result<&RationalFn2> {
        self.first_integrals
            .first()
            .map(|i| &i.rfn)
            .ok_or_else(|| Error::Catalog(format!("{} has no first integral", self.name)))
    }

    pub fn map_integral(&self, name: &str) -> Result<&MapIntegral> {
        self.map_integrals
            .iter()
            .find(|i| i.name == name)
            .ok_or_else(|| Error::Catalog(format!("{} has no map integral {name}", self.name)))
    }

    pub fn measure_density_at(&self, eps: &Q) -> Result<Option<RationalFn2>> {
        self.measure_density.as_ref().map(|e| to_rfn_with(e, &[(Var::Eps, eps.clone())])).transpose()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegral {
    name: String,
    expr: String,
    #[serde(default)]
    valid_eps: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMacro {
    name: String,
    expr: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrinted {
    components: [String; 2],
    radical: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinearization {
    u: String,
    v: String,
    inv_x: String,
    inv_y: String,
    omega: String,
    radical: bool,
    #[serde(default)]
    guards: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    components: [String; 2],
    first_integrals: Vec<RawIntegral>,
    #[serde(default)]
    map_integrals: Vec<RawIntegral>,
    #[serde(default)]
    macros: Vec<RawMacro>,
    #[serde(default)]
    printed_khk: Option<[String; 2]>,
    #[serde(default)]
    printed_pseudo: Option<RawPrinted>,
    #[serde(default)]
    linearization: Option<RawLinearization>,
    #[serde(default)]
    commuting_field: Option<[String; 2]>,
    #[serde(default)]
    measure_density: Option<String>,
    #[serde(default)]
    lie_symmetry: Option<[String; 2]>,
    #[serde(default)]
    integral_range: Option<String>,
    #[serde(default)]
    center: Option<[String; 2]>,
    notes: String,
}

struct EntryParser<'a> {
    name: &'a str,
    grammar: Grammar,
}

impl EntryParser<'_> {
    fn parse(&self, what: &str, src: &str, vars: &[Var], sqrt: bool) -> Result<Expr> {
        let e = self.grammar.parse(src).map_err(|e| Error::Catalog(format!("{}: {what}: {e}", self.name)))?;
        if !sqrt && e.has_sqrt() {
            return Err(Error::Catalog(format!("{}: {what} must be sqrt-free", self.name)));
        }
        for v in Var::ALL {
            if e.uses(v) && !vars.contains(&v) {
                return Err(Error::Catalog(format!("{}: {what} uses variable {}", self.name, v.name())));
            }
        }
        Ok(e)
    }

    fn field(&self, what: &str, c: &[String; 2]) -> Result<(PolyVectorField, [Expr; 2])> {
        let xy = [Var::X, Var::Y];
        let ex = self.parse(what, &c[0], &xy, false)?;
        let ey = self.parse(what, &c[1], &xy, false)?;
        let f = PolyVectorField::from_exprs(&ex, &ey, &[]).map_err(|e| Error::Catalog(format!("{}: {what}: {e}", self.name)))?;
        Ok((f, [ex, ey]))
    }
}

fn rational(name: &str, what: &str, s: &str) -> Result<Q> {
    parse_rational(s).map_err(|e| Error::Catalog(format!("{name}: {what}: {e}")))
}

fn build_entry(raw: RawEntry) -> Result<SystemEntry> {
    let name = raw.name.as_str();
    let all = [Var::X, Var::Y, Var::Eps];
    let mut grammar = Grammar::new(&[Var::X, Var::Y, Var::U, Var::V, Var::Eps], true);
    for m in &raw.macros {
        let e = grammar.parse(&m.expr).map_err(|e| Error::Catalog(format!("{name}: macro {}: {e}", m.name)))?;
        grammar = grammar.with_macro(&m.name, e);
    }
    let p = EntryParser { name, grammar };
    let (field, components) = p.field("components", &raw.components)?;

    let mut first_integrals = Vec::new();
    for i in &raw.first_integrals {
        let expr = p.parse(&i.name, &i.expr, &[Var::X, Var::Y], false)?;
        let rfn = to_rfn_with(&expr, &[])?;
        if !field.lie_derivative(&rfn).is_zero() {
            return Err(Error::Catalog(format!("{name}: {} is not a first integral of the field", i.name)));
        }
        first_integrals.push(NamedIntegral { name: i.name.clone(), expr, rfn });
    }

    let mut map_integrals = Vec::new();
    for i in &raw.map_integrals {
        let expr = p.parse(&i.name, &i.expr, &all, false)?;
        let valid_eps = match &i.valid_eps {
            Some(v) => Some(v.iter().map(|s| rational(name, &i.name, s)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        map_integrals.push(MapIntegral { name: i.name.clone(), expr, valid_eps });
    }

    let printed_khk = match &raw.printed_khk {
        Some([a, b]) => {
            let pf = PrintedForm {
                components: [p.parse("printed_khk", a, &all, false)?, p.parse("printed_khk", b, &all, false)?],
                radical: false,
            };
            // the constructor and the stored template must agree
            for eps in [q(1, 3), q(-2, 5)] {
                let built = khk_map(&field, &eps)?;
                let printed = pf.instantiate(&eps)?;
                if !(rfn_identical(&built.fx, &printed.fx) && rfn_identical(&built.fy, &printed.fy)) {
                    return Err(Error::Catalog(format!("{name}: printed KHK map disagrees with the constructor at eps={eps}")));
                }
            }
            Some(pf)
        }
        None => None,
    };

    let printed_pseudo = match &raw.printed_pseudo {
        Some(r) => Some(PrintedForm {
            components: [
                p.parse("printed_pseudo", &r.components[0], &all, r.radical)?,
                p.parse("printed_pseudo", &r.components[1], &all, r.radical)?,
            ],
            radical: r.radical,
        }),
        None => None,
    };

    let linearization = match &raw.linearization {
        Some(l) => {
            let xy = [Var::X, Var::Y];
            let uv = [Var::U, Var::V];
            let omega = rational(name, "omega", &l.omega)?;
            if num_traits::Zero::is_zero(&omega) {
                return Err(Error::Catalog(format!("{name}: omega must be nonzero")));
            }
            Some(LinearizationPair {
                forward: [p.parse("u", &l.u, &xy, l.radical)?, p.parse("v", &l.v, &xy, l.radical)?],
                inverse: [p.parse("inv_x", &l.inv_x, &uv, l.radical)?, p.parse("inv_y", &l.inv_y, &uv, l.radical)?],
                omega,
                radical: l.radical,
                guards: l.guards.iter().map(|g| p.parse("guard", g, &xy, true)).collect::<Result<Vec<_>>>()?,
            })
        }
        None => None,
    };

    let commuting_field = match &raw.commuting_field {
        Some(c) => Some(p.field("commuting_field", c)?.0),
        None => None,
    };
    let measure_density = raw.measure_density.as_ref().map(|s| p.parse("measure_density", s, &all, false)).transpose()?;
    let lie_symmetry = match &raw.lie_symmetry {
        Some([a, b]) => Some([p.parse("lie_symmetry", a, &all, true)?, p.parse("lie_symmetry", b, &all, true)?]),
        None => None,
    };
    let center = match &raw.center {
        Some([a, b]) => (rational(name, "center", a)?, rational(name, "center", b)?),
        None => (q(0, 1), q(0, 1)),
    };

    Ok(SystemEntry {
        name: raw.name.clone(),
        field,
        components,
        first_integrals,
        map_integrals,
        printed_khk,
        printed_pseudo,
        linearization,
        commuting_field,
        measure_density,
        lie_symmetry,
        integral_range: raw.integral_range.clone(),
        center,
        notes: raw.notes.clone(),
    })
}

/// Parse and validate a catalog document; an empty document is an empty catalog.
pub fn catalog_load(src: &str) -> Result<Vec<SystemEntry>> {
    if src.trim().is_empty() {
        return Ok(Vec::new());
    }
    let raw: Vec<RawEntry> = serde_json::from_str(src).map_err(|e| Error::Catalog(format!("schema: {e}")))?;
    let mut seen = HashMap::new();
    let mut out = Vec::with_capacity(raw.len());
    for r in raw {
        if seen.insert(r.name.clone(), ()).is_some() {
            return Err(Error::Catalog(format!("duplicate entry {}", r.name)));
        }
        out.push(build_entry(r)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<SystemEntry>,
}

impl Catalog {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(Catalog { entries: catalog_load(src)? })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Shipped catalog, parsed and validated once.
    pub fn builtin() -> &'static Catalog {
        static CELL: OnceLock<Catalog> = OnceLock::new();
        CELL.get_or_init(|| Catalog::from_json(BUILTIN).expect("built-in catalog is valid"))
    }

    pub fn entries(&self) -> &[SystemEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&SystemEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Catalog(format!("unknown system {name}; known: {}", self.names().join(", "))))
    }
}

/// Shorthand for a built-in entry.
pub fn system(name: &str) -> Result<&'static SystemEntry> {
    Catalog::builtin().get(name)
}

/// Linear center `−ω y ∂x + ω x ∂y` with the identity linearization.
pub fn linear_center(omega: &Q) -> SystemEntry {
    let mut e = Catalog::builtin().get("linear_center").expect("built-in entry").clone();
    e.field = PolyVectorField::linear_center(omega);
    let term = |c: Q, v: Var| Expr::Mul(Box::new(Expr::num(c)), Box::new(Expr::var(v)));
    e.components = [term(-omega.clone(), Var::Y), term(omega.clone(), Var::X)];
    if let Some(l) = e.linearization.as_mut() {
        l.omega = omega.clone();
    }
    e.name = format!("linear_center({omega})");
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qi;

    #[test]
    fn builtin_loads_all_systems() {
        let c = Catalog::builtin();
        for n in ["petrera_suris", "S1", "S2", "S3", "S4", "S2star", "Y1", "linear_center"] {
            assert!(c.get(n).is_ok(), "{n}");
        }
        assert!(matches!(c.get("nope"), Err(Error::Catalog(_))));
    }

    #[test]
    fn s2_entry() {
        let s2 = system("S2").unwrap();
        assert_eq!(s2.field.px.to_string(), to_rfn_with(&s2.components[0], &[]).unwrap().to_string());
        let l = s2.linearization.as_ref().unwrap();
        assert_eq!(l.forward[0].to_string(), "x/(1 + y)");
        assert_eq!(s2.first_integrals[0].name, "H2");
    }

    #[test]
    fn empty_document_is_empty_catalog() {
        assert!(catalog_load("").unwrap().is_empty());
        assert!(catalog_load("  \n").unwrap().is_empty());
        assert!(catalog_load("[]").unwrap().is_empty());
    }

    #[test]
    fn rejects_false_integral() {
        let src = r#"[{"name":"bad","components":["-y","x"],"first_integrals":[{"name":"H","expr":"x^2+2*y^2"}],"notes":""}]"#;
        let err = catalog_load(src).unwrap_err();
        assert!(err.to_string().contains("not a first integral"), "{err}");
    }

    #[test]
    fn rejects_unknown_field_and_bad_template() {
        let src = r#"[{"name":"bad","components":["-y","x"],"first_integrals":[],"colour":"red","notes":""}]"#;
        assert!(matches!(catalog_load(src), Err(Error::Catalog(_))));
        let src = r#"[{"name":"bad","components":["-y","x"],"first_integrals":[],"printed_khk":["x","y"],"notes":""}]"#;
        assert!(catalog_load(src).unwrap_err().to_string().contains("disagrees"));
    }

    #[test]
    fn map_integral_eps_restriction() {
        let v = system("S1").unwrap().map_integral("V").unwrap();
        assert!(v.instantiate(&qi(1)).is_ok());
        assert!(matches!(v.instantiate(&q(1, 2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn linear_center_frequency() {
        let e = linear_center(&qi(2));
        assert_eq!(e.field, PolyVectorField::linear_center(&qi(2)));
        assert_eq!(e.linearization.unwrap().omega, qi(2));
    }
}
