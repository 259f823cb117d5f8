//! Small floating-point helpers shared by the numeric checks.

/// Central-difference step used for Jacobians of non-rational maps.
pub const FD_STEP: f64 = 1e-6;

/// `|a − b| / max(1, |b|)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d.is_nan() {
        return f64::INFINITY;
    }
    d / b.abs().max(1.0)
}

pub fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn central(f: &dyn Fn(f64, f64) -> Option<(f64, f64)>, x: f64, y: f64, h: f64) -> Option<[[f64; 2]; 2]> {
    let (xp, xm) = (f(x + h, y)?, f(x - h, y)?);
    let (yp, ym) = (f(x, y + h)?, f(x, y - h)?);
    let s = 0.5 / h;
    Some([[(xp.0 - xm.0) * s, (yp.0 - ym.0) * s], [(xp.1 - xm.1) * s, (yp.1 - ym.1) * s]])
}

/// Jacobian by central differences with one Richardson step (`h`, `h/2`).
pub fn central_jacobian(f: &dyn Fn(f64, f64) -> Option<(f64, f64)>, x: f64, y: f64) -> Option<[[f64; 2]; 2]> {
    let a = central(f, x, y, FD_STEP)?;
    let b = central(f, x, y, FD_STEP / 2.0)?;
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (4.0 * b[i][j] - a[i][j]) / 3.0;
        }
    }
    Some(out)
}

/// Angle in `[0, 2π)`.
pub fn angle01(y: f64, x: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// `t mod 1` in `[0, 1)`, folding values within `1e-15` of one to zero.
pub fn frac01(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    if r >= 1.0 - 1e-15 {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_of_polynomial_map() {
        let f = |x: f64, y: f64| Some((x * x * y, x.sin() + y * y * y));
        let j = central_jacobian(&f, 0.7, -0.3).unwrap();
        let exact = [[2.0 * 0.7 * -0.3, 0.49], [0.7f64.cos(), 3.0 * 0.09]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[i][k] - exact[i][k]).abs() < 1e-9, "{i}{k}");
            }
        }
    }

    #[test]
    fn angles_and_fractions() {
        assert!((angle01(-1.0, 0.0) - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(frac01(-0.25), 0.75);
        assert_eq!(frac01(1.0), 0.0);
        assert_eq!(rel_err(f64::NAN, 1.0), f64::INFINITY);
    }
}
