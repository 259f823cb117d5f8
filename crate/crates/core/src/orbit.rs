//! Orbits of planar maps: exact and floating iteration, period detection,
//! conservation diagnostics and portrait output.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{RationalFn2, RationalMap2};
use crate::field::{q_bits, q_to_f64, qi, Q};
use crate::numeric::dist;

#[derive(Clone, Debug)]
pub struct OrbitConfig {
    /// Exact iteration stops once a coordinate needs more bits than this.
    pub bit_cap: u64,
    /// Floating iteration stops outside `|x|, |y| ≤ escape`.
    pub escape: f64,
    /// Floating return tolerance of period detection.
    pub tol: f64,
    pub detect_period: bool,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { bit_cap: 4096, escape: 1e6, tol: 1e-9, detect_period: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    Period,
    Escaped,
    Pole,
    BitCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub initial: (f64, f64),
    pub length: usize,
    /// `points[0]` is the start.
    pub points: Vec<(f64, f64)>,
    #[serde(skip)]
    pub exact_points: Option<Vec<(Q, Q)>>,
    pub detected_period: Option<usize>,
    pub escaped: bool,
    pub stop: StopReason,
}

fn bits(p: &(Q, Q)) -> u64 {
    q_bits(&p.0).max(q_bits(&p.1))
}

/// Exact orbit of `start` under `map`, up to `n` steps.
pub fn iterate_exact(map: &RationalMap2, start: (Q, Q), n: usize, cfg: &OrbitConfig) -> Result<OrbitRecord> {
    let first = map.eval(&start)?;
    let mut pts = vec![start.clone()];
    let mut stop = StopReason::Completed;
    let mut period = None;
    let mut next = Some(first);
    for k in 1..=n {
        let p = match next.take() {
            Some(p) => p,
            None => match map.eval(pts.last().expect("nonempty")) {
                Ok(p) => p,
                Err(_) => {
                    stop = StopReason::Pole;
                    break;
                }
            },
        };
        if bits(&p) > cfg.bit_cap {
            stop = StopReason::BitCap;
            break;
        }
        let back = p == start;
        pts.push(p);
        if cfg.detect_period && back {
            period = Some(k);
            stop = StopReason::Period;
            break;
        }
    }
    let fl: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (q_to_f64(x), q_to_f64(y))).collect();
    Ok(OrbitRecord {
        initial: fl[0],
        length: fl.len() - 1,
        points: fl,
        exact_points: Some(pts),
        detected_period: period,
        escaped: stop == StopReason::Pole,
        stop,
    })
}

/// Floating orbit; stops at a pole, a non-finite value, escape from the box,
/// or (optionally) the first return within `cfg.tol`.
pub fn iterate_float(map: &dyn Fn(f64, f64) -> Option<(f64, f64)>, start: (f64, f64), n: usize, cfg: &OrbitConfig) -> Result<OrbitRecord> {
    if map(start.0, start.1).is_none() {
        return Err(Error::Pole { component: 0, x: start.0.to_string(), y: start.1.to_string() });
    }
    let mut pts = vec![start];
    let mut stop = StopReason::Completed;
    let mut period = None;
    for k in 1..=n {
        let (x, y) = *pts.last().expect("nonempty");
        let Some(p) = map(x, y).filter(|p| p.0.is_finite() && p.1.is_finite()) else {
            stop = StopReason::Pole;
            break;
        };
        if p.0.abs() > cfg.escape || p.1.abs() > cfg.escape {
            stop = StopReason::Escaped;
            break;
        }
        pts.push(p);
        if cfg.detect_period && dist(p, start) < cfg.tol {
            period = Some(k);
            stop = StopReason::Period;
            break;
        }
    }
    Ok(OrbitRecord {
        initial: start,
        length: pts.len() - 1,
        points: pts,
        exact_points: None,
        detected_period: period,
        escaped: matches!(stop, StopReason::Escaped | StopReason::Pole),
        stop,
    })
}

/// `max_k |H(p_k) − H(p_0)| / (1 + |H(p_0)|)`, exact along exact orbits.
pub fn energy_drift(h: &RationalFn2, orbit: &OrbitRecord) -> Result<f64> {
    if let Some(pts) = &orbit.exact_points {
        let h0 = h.eval(&pts[0].0, &pts[0].1)?;
        let scale = qi(1) + num_traits::Signed::abs(&h0);
        let mut worst = qi(0);
        for (x, y) in &pts[1..] {
            let d = num_traits::Signed::abs(&(h.eval(x, y)? - &h0)) / &scale;
            if d > worst {
                worst = d;
            }
        }
        return Ok(q_to_f64(&worst));
    }
    energy_drift_f64(h, &orbit.points)
}

pub fn energy_drift_f64(h: &RationalFn2, pts: &[(f64, f64)]) -> Result<f64> {
    let Some(&(x0, y0)) = pts.first() else { return Ok(0.0) };
    let h0 = h.eval_f64(x0, y0);
    let mut worst = 0.0f64;
    for &(x, y) in pts {
        let v = h.eval_f64(x, y);
        if !v.is_finite() {
            return Err(Error::Pole { component: 0, x: x.to_string(), y: y.to_string() });
        }
        worst = worst.max((v - h0).abs() / (1.0 + h0.abs()));
    }
    Ok(worst)
}

/// Seeds `center + r_max·(k+1)/count · direction`, `k = 0..count`.
#[derive(Clone, Debug, Serialize)]
pub struct SeedFan {
    pub center: (f64, f64),
    pub direction: (f64, f64),
    pub r_max: f64,
    pub count: usize,
}

impl SeedFan {
    pub fn along_x(center: (f64, f64), r_max: f64, count: usize) -> Self {
        SeedFan { center, direction: (1.0, 0.0), r_max, count }
    }

    pub fn seeds(&self) -> Vec<(f64, f64)> {
        let n = self.direction.0.hypot(self.direction.1);
        let d = (self.direction.0 / n, self.direction.1 / n);
        (0..self.count)
            .map(|k| {
                let r = self.r_max * (k + 1) as f64 / self.count as f64;
                (self.center.0 + r * d.0, self.center.1 + r * d.1)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Portrait {
    pub seeds: Vec<(f64, f64)>,
    /// One floating orbit per seed, starting at the seed.
    pub orbits: Vec<Vec<(f64, f64)>>,
}

/// Orbit clouds of `iters` steps per seed, without period detection.
pub fn portrait(map: &dyn Fn(f64, f64) -> Option<(f64, f64)>, seeds: &[(f64, f64)], iters: usize, escape: f64) -> Portrait {
    let cfg = OrbitConfig { escape, detect_period: false, ..OrbitConfig::default() };
    let orbits = seeds
        .iter()
        .map(|&s| iterate_float(map, s, iters, &cfg).map(|o| o.points).unwrap_or_default())
        .collect();
    Portrait { seeds: seeds.to_vec(), orbits }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

impl Portrait {
    pub fn point_count(&self) -> usize {
        self.orbits.iter().map(Vec::len).sum()
    }

    pub fn has_nan(&self) -> bool {
        self.orbits.iter().flatten().any(|p| !p.0.is_finite() || !p.1.is_finite())
    }

    /// Header `seed,iter,x,y`, coordinates with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,iter,x,y\n");
        for (i, o) in self.orbits.iter().enumerate() {
            for (k, p) in o.iter().enumerate() {
                writeln!(s, "{i},{k},{:.16e},{:.16e}", p.0, p.1).expect("string write");
            }
        }
        s
    }

    /// 800×800 SVG scaled to the data extent, one dot per point.
    pub fn to_svg(&self) -> String {
        let size = 800.0;
        let margin = 20.0;
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.orbits.iter().flatten() {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        let mut s = String::new();
        writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="800" viewBox="0 0 800 800">"#).unwrap();
        writeln!(s, r#"<rect width="800" height="800" fill="white"/>"#).unwrap();
        if lo.0.is_finite() {
            let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-12);
            let k = (size - 2.0 * margin) / span;
            for (i, o) in self.orbits.iter().enumerate() {
                writeln!(s, r#"<g fill="{}">"#, PALETTE[i % PALETTE.len()]).unwrap();
                for p in o {
                    let px = margin + (p.0 - lo.0) * k;
                    let py = size - margin - (p.1 - lo.1) * k;
                    writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="0.8"/>"#).unwrap();
                }
                writeln!(s, "</g>").unwrap();
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::system;
    use crate::field::q;
    use crate::khk::khk_map;

    #[test]
    fn s1_quarter_step_is_four_periodic() {
        let m = khk_map(&system("S1").unwrap().field, &qi(1)).unwrap();
        let o = iterate_exact(&m, (q(1, 3), q(1, 5)), 10, &OrbitConfig::default()).unwrap();
        assert_eq!(o.detected_period, Some(4));
        assert_eq!(o.stop, StopReason::Period);
    }

    #[test]
    fn fixed_line_of_the_example() {
        let m = khk_map(&system("petrera_suris").unwrap().field, &q(1, 2)).unwrap();
        let o = iterate_exact(&m, (qi(0), qi(5)), 10, &OrbitConfig::default()).unwrap();
        assert_eq!(o.detected_period, Some(1));
    }

    #[test]
    fn identity_and_pole() {
        let id = RationalMap2::identity();
        let o = iterate_float(&|x, y| Some((x, y)), (0.3, 0.1), 5, &OrbitConfig::default()).unwrap();
        assert_eq!(o.detected_period, Some(1));
        assert_eq!(iterate_exact(&id, (q(2, 7), qi(1)), 5, &OrbitConfig::default()).unwrap().detected_period, Some(1));
        assert!(iterate_float(&|_, _| None, (0.0, 0.0), 5, &OrbitConfig::default()).is_err());
    }

    #[test]
    fn escape_and_bit_cap() {
        let o = iterate_float(&|x, y| Some((2.0 * x, y)), (1.0, 0.0), 100, &OrbitConfig::default()).unwrap();
        assert!(o.escaped && o.stop == StopReason::Escaped);
        let sq = RationalMap2::new(RationalFn2::x().pow(2).add(&RationalFn2::constant(q(1, 3))), RationalFn2::y());
        let cfg = OrbitConfig { bit_cap: 64, ..OrbitConfig::default() };
        assert_eq!(iterate_exact(&sq, (q(1, 2), qi(0)), 50, &cfg).unwrap().stop, StopReason::BitCap);
    }

    #[test]
    fn drift_zero_for_invariant() {
        let s = system("S1").unwrap();
        let m = khk_map(&s.field, &q(1, 3)).unwrap();
        let cfg = OrbitConfig { detect_period: false, ..OrbitConfig::default() };
        let o = iterate_exact(&m, (q(1, 4), q(1, 7)), 20, &cfg).unwrap();
        assert_eq!(energy_drift(s.primary_integral().unwrap(), &o).unwrap(), 0.0);
        assert_eq!(energy_drift(&RationalFn2::constant(qi(3)), &o).unwrap(), 0.0);
    }

    #[test]
    fn empty_portrait_has_header() {
        let p = portrait(&|x, y| Some((x, y)), &[], 10, 1e6);
        assert_eq!(p.to_csv(), "seed,iter,x,y\n");
        assert!(p.to_svg().ends_with("</svg>\n"));
    }

    #[test]
    fn fan_seeds() {
        let s = SeedFan::along_x((1.0, 1.0), 0.5, 5).seeds();
        assert_eq!(s.len(), 5);
        assert_eq!(s[4], (1.5, 1.0));
        assert!((s[0].0 - 1.1).abs() < 1e-15);
    }
}
