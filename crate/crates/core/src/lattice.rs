//! The zero set of sin(2 k^2 tau): k^2 = n * omega / 4 with omega = 2 pi / tau,
//! i.e. {+-sqrt(n omega)/2, +-i sqrt(n omega)/2 : n >= 0}.

use num_complex::Complex64;
use std::f64::consts::PI;

/// The point with k^2 = m * omega / 4 in the closed right/upper half:
/// real and nonnegative for m >= 0, positive imaginary for m < 0.
pub fn point(m: i64, omega: f64) -> Complex64 {
    if m >= 0 {
        Complex64::new((m as f64 * omega).sqrt() / 2.0, 0.0)
    } else {
        Complex64::new(0.0, ((-m) as f64 * omega).sqrt() / 2.0)
    }
}

/// Upper imaginary lattice point i sqrt(n omega) / 2.
pub fn upper(n: u32, omega: f64) -> Complex64 {
    point(-(n as i64), omega)
}

/// Nearest lattice point to `k` and its distance.
pub fn nearest(k: Complex64, tau: f64) -> (Complex64, f64) {
    let omega = 2.0 * PI / tau;
    let m0 = (4.0 * (k * k).re / omega).round() as i64;
    let mut best = (Complex64::new(0.0, 0.0), f64::INFINITY);
    for m in (m0 - 2)..=(m0 + 2) {
        let p = point(m, omega);
        for q in [p, -p] {
            let d = (k - q).norm();
            if d < best.1 {
                best = (q, d);
            }
        }
    }
    best
}

pub fn distance(k: Complex64, tau: f64) -> f64 {
    nearest(k, tau).1
}

/// Distance from lattice point `p` to its nearest other lattice point.
pub fn gap_at(p: Complex64, tau: f64) -> f64 {
    let omega = 2.0 * PI / tau;
    let m0 = (4.0 * (p * p).re / omega).round() as i64;
    let mut best = f64::INFINITY;
    for m in (m0 - 2)..=(m0 + 2) {
        let q = point(m, omega);
        for r in [q, -q] {
            let d = (p - r).norm();
            if d > 1e-12 * (1.0 + p.norm()) && d < best {
                best = d;
            }
        }
    }
    best
}
