//! Seeded sampling of points for numeric checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{q, Q};

pub const SEED: u64 = 0x4B484B;

/// Default half-width of the sampling box around a center.
pub const HALF_WIDTH: f64 = 0.9;

/// Up to `n` points uniform in the box `center ± half` accepted by `accept`;
/// gives up after `50 n` draws.
pub fn box_points(center: (f64, f64), half: f64, n: usize, seed: u64, accept: &dyn Fn(f64, f64) -> bool) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 50 * n.max(1) {
        tries += 1;
        let x = center.0 + rng.gen_range(-half..half);
        let y = center.1 + rng.gen_range(-half..half);
        if accept(x, y) {
            out.push((x, y));
        }
    }
    out
}

/// Small-height rationals `a/b` with `|a| ≤ 40`, `b ≤ 17`, drawn reproducibly.
pub fn rational_values(n: usize, seed: u64, nonzero: bool) -> Vec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Q> = Vec::with_capacity(n);
    while out.len() < n {
        let v = q(rng.gen_range(-40..=40), rng.gen_range(1..=17));
        if (nonzero && num_traits::Zero::is_zero(&v)) || out.contains(&v) {
            continue;
        }
        out.push(v);
    }
    out
}
