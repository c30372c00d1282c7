//! G, sqrt(G), Q^b, P^b and (A^b)^2 from the monodromy matrix.
//!
//! All quotients are homogeneous of degree zero in Z, so they are evaluated
//! on the scaled matrix. sqrt(G) uses the entire form 2i sin(2 k^2 tau),
//! scaled by the same factor.

use crate::boundary::PeriodicPair;
use crate::error::{Error, Result};
use crate::lattice;
use crate::monodromy::{self, Monodromy, C};
use rayon::prelude::*;
use serde::Serialize;

const I: C = C::new(0.0, 1.0);

/// Relative size below which a denominator is treated as zero.
const DEGENERATE: f64 = 1e-13;

/// G(k) = (tr Z)^2 - 4, unscaled.
pub fn g_of_k(m: &Monodromy) -> C {
    let t = m.trace_scaled() * m.log_scale.exp();
    t * t - 4.0
}

/// G(k) e^{-2 log_scale}; finite for all k.
pub fn g_scaled(m: &Monodromy) -> C {
    let t = m.trace_scaled();
    t * t - 4.0 * (-2.0 * m.log_scale).exp()
}

/// 2i sin(2 k^2 tau).
pub fn sqrt_g_admissible(k: C, tau: f64) -> C {
    2.0 * I * (2.0 * k * k * tau).sin()
}

/// 2i sin(2 k^2 tau) e^{-log_scale}.
pub fn sqrt_g_scaled(k: C, tau: f64, log_scale: f64) -> C {
    let w = 2.0 * I * k * k * tau;
    (w - log_scale).exp() - (-w - log_scale).exp()
}

fn zs(m: &Monodromy) -> (C, C, C, C) {
    let z = &m.z_scaled;
    (z[(0, 0)], z[(0, 1)], z[(1, 0)], z[(1, 1)])
}

fn check(den: C, scale: f64, k: C) -> Result<()> {
    if den.norm() <= DEGENERATE * scale || !den.is_finite() {
        Err(Error::DegenerateDenominator { k })
    } else {
        Ok(())
    }
}

/// Q^b = -2 Z12 / (Z11 - Z22 - sqrt G). `sqrt_g` must carry the same scaling as `m.z_scaled`.
pub fn qb(m: &Monodromy, sqrt_g: C) -> Result<C> {
    let (z11, z12, _, z22) = zs(m);
    let den = z11 - z22 - sqrt_g;
    check(den, z11.norm() + z22.norm(), m.k)?;
    Ok(-2.0 * z12 / den)
}

/// P^b = -Z21 / sqrt G.
pub fn pb(m: &Monodromy, sqrt_g: C) -> Result<C> {
    let (z11, _, z21, z22) = zs(m);
    check(sqrt_g, z11.norm() + z22.norm(), m.k)?;
    Ok(-z21 / sqrt_g)
}

/// (A^b)^2 = -(Z11 - Z22 - sqrt G) / (2 sqrt G).
pub fn ab_squared(m: &Monodromy, sqrt_g: C) -> Result<C> {
    let (z11, _, _, z22) = zs(m);
    check(sqrt_g, z11.norm() + z22.norm(), m.k)?;
    Ok(-(z11 - z22 - sqrt_g) / (2.0 * sqrt_g))
}

/// Default guard radius around the zeros of sin(2 k^2 tau).
pub fn default_guard(tau: f64) -> f64 {
    1e-3 * (2.0 * std::f64::consts::PI / tau).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSample {
    pub k: C,
    pub g: C,
    pub sqrt_g: C,
    pub qb: C,
    pub pb: C,
    pub ab2: C,
    /// k lies inside a lattice guard; the quotients there are 0/0 and
    /// the stored values are NaN.
    pub near_singular: bool,
}

/// All spectral functions at one k. Inside a lattice guard the quotients are
/// flagged and set to NaN instead of being extrapolated.
pub fn sample(pair: &PeriodicPair, k: C, tol: f64) -> Result<SpectralSample> {
    let m = monodromy::monodromy(pair, k, tol)?;
    Ok(sample_from(&m, default_guard(pair.tau())))
}

pub fn sample_from(m: &Monodromy, guard: f64) -> SpectralSample {
    let k = m.k;
    let sg = sqrt_g_scaled(k, m.tau, m.log_scale);
    let near = lattice::distance(k, m.tau) < guard;
    let nan = C::new(f64::NAN, f64::NAN);
    let pick = |r: Result<C>| if near { nan } else { r.unwrap_or(nan) };
    SpectralSample {
        k,
        g: g_of_k(m),
        sqrt_g: sqrt_g_admissible(k, m.tau),
        qb: pick(qb(m, sg)),
        pb: pick(pb(m, sg)),
        ab2: pick(ab_squared(m, sg)),
        near_singular: near,
    }
}

pub fn sample_grid(pair: &PeriodicPair, ks: &[C], tol: f64) -> Result<Vec<SpectralSample>> {
    ks.par_iter().map(|&k| sample(pair, k, tol)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Qb,
    Pb,
    Ab2,
}

/// Value of Q^b, P^b or (A^b)^2 at k for an admissible pair. Inside a
/// lattice guard (where the quotient is 0/0) the value is the mean over a
/// small circle, which equals the function value when it is analytic
/// there. Used by quadratures whose nodes may land near the lattice.
pub fn value(pair: &PeriodicPair, f: Function, k: C, tol: f64) -> Result<C> {
    let eval = |z: C| -> Result<C> {
        let m = monodromy::monodromy(pair, z, tol)?;
        let sg = sqrt_g_scaled(z, m.tau, m.log_scale);
        match f {
            Function::Qb => qb(&m, sg),
            Function::Pb => pb(&m, sg),
            Function::Ab2 => ab_squared(&m, sg),
        }
    };
    let guard = default_guard(pair.tau());
    let (p, d) = lattice::nearest(k, pair.tau());
    if d >= guard {
        return eval(k);
    }
    // the zero of G at k = 0 is of fourth order; a wider circle keeps the
    // cancellation in the quotient under control
    let (r, nodes) = if p.norm() < guard { (20.0 * guard, 16) } else { (4.0 * guard, 8) };
    let mut acc = C::new(0.0, 0.0);
    for j in 0..nodes {
        let z = k + C::from_polar(r, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / nodes as f64);
        acc += eval(z)?;
    }
    Ok(acc / nodes as f64)
}

pub fn qb_value(pair: &PeriodicPair, k: C, tol: f64) -> Result<C> {
    value(pair, Function::Qb, k, tol)
}

/// Square root of G (scaled) whose sign follows -(Z11 - Z22), the branch
/// on which (A^b)^2 tends to 1 at large k. Agrees with the entire form for
/// admissible pairs away from the lattice, and remains meaningful for
/// pairs that are not admissible.
pub fn sqrt_g_asymptotic(m: &Monodromy) -> C {
    let (z11, _, _, z22) = zs(m);
    let r = g_scaled(m).sqrt();
    let target = z22 - z11;
    if (r - target).norm() <= (r + target).norm() {
        r
    } else {
        -r
    }
}

/// Sign-continued square root of G along a path of monodromies; a
/// diagnostic for pairs where the entire form of sqrt(G) may not apply.
/// Returns scaled values sqrt(G) e^{-log_scale}.
pub fn sqrt_g_tracked(path: &[Monodromy]) -> Vec<C> {
    let mut out: Vec<C> = Vec::with_capacity(path.len());
    for m in path {
        let mut r = g_scaled(m).sqrt();
        if let Some(prev) = out.last() {
            if (r - prev).norm() > (r + prev).norm() {
                r = -r;
            }
        }
        out.push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::{monodromy, DEFAULT_TOL};
    use std::f64::consts::PI;

    fn d11() -> PeriodicPair {
        PeriodicPair::family_d(1.0, 1.0).unwrap()
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn zero_pair_values() {
        let p = PeriodicPair::zero(2.0 * PI).unwrap();
        let m = monodromy(&p, C::from(0.5), DEFAULT_TOL).unwrap();
        assert!(g_of_k(&m).norm() < 1e-12);
        let k = C::new(0.37, 0.21);
        let s = sample(&p, k, DEFAULT_TOL).unwrap();
        assert!((s.qb).norm() < 1e-14 && s.pb.norm() < 1e-14);
        assert!((s.ab2 - 1.0).norm() < 1e-12);
        let want = -4.0 * (2.0 * k * k * p.tau()).sin().powi(2);
        assert!(rel(s.g, want) < 1e-12);
    }

    #[test]
    fn sqrt_g_entire_form() {
        assert_eq!(sqrt_g_admissible(C::from(0.0), 1.0), C::from(0.0));
        let tau = 2.0;
        let k = C::from((PI / 4.0 / tau).sqrt());
        assert!((sqrt_g_admissible(k, tau) - 2.0 * I).norm() < 1e-15);
    }

    #[test]
    fn family_d_g_matches_admissible_identity() {
        let p = d11();
        let k = C::new(0.3, 0.2);
        let m = monodromy(&p, k, DEFAULT_TOL).unwrap();
        let want = -4.0 * (2.0 * k * k * p.tau()).sin().powi(2);
        assert!(rel(g_of_k(&m), want) < 1e-9);
        let m = monodromy(&p, C::from(1.0), DEFAULT_TOL).unwrap();
        assert!(g_of_k(&m).norm() < 1e-9);
    }

    #[test]
    fn family_d_closed_forms() {
        let p = d11();
        let s2 = 2f64.sqrt();
        let (k1, k2) = (I * 0.5, I * s2 / 2.0);
        let s = sample(&p, C::from(1.3), DEFAULT_TOL).unwrap();
        assert!(rel(s.qb, -I / (2.0 * 1.3 + I * s2)) < 1e-10);
        for k in [C::new(0.3, 1.9), C::new(-1.1, 0.7)] {
            let s = sample(&p, k, DEFAULT_TOL).unwrap();
            assert!(rel(s.qb, -I / (2.0 * k + I * s2)) < 1e-10);
            assert!(rel(s.pb, (I / 2.0) * (k + k2) / ((k + k1) * (k - k1))) < 1e-10);
            assert!(rel(s.ab2, (k * k - k2 * k2) / (k * k - k1 * k1)) < 1e-10);
        }
        // k = 2i is a zero of sin(2 k^2 tau) but not a pole of P^b
        let k = 2.0 * I;
        assert!(sample(&p, k, DEFAULT_TOL).unwrap().near_singular);
        let pv = value(&p, Function::Pb, k, DEFAULT_TOL).unwrap();
        assert!(rel(pv, (I / 2.0) * (k + k2) / ((k + k1) * (k - k1))) < 1e-8);
        let av = value(&p, Function::Ab2, k, DEFAULT_TOL).unwrap();
        assert!(rel(av, (k * k - k2 * k2) / (k * k - k1 * k1)) < 1e-8);
    }

    #[test]
    fn qb_at_one_is_lattice_limit() {
        // k = 1 is a lattice point; the guard-aware evaluator still returns Q^b(1)
        let p = d11();
        let q = qb_value(&p, C::from(1.0), DEFAULT_TOL).unwrap();
        let want = -I / (2.0 + I * 2f64.sqrt());
        assert!(rel(q, want) < 1e-8, "{q} vs {want}");
        assert!((want.norm() - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        let q0 = qb_value(&p, C::from(0.0), DEFAULT_TOL).unwrap();
        assert!((q0 + 1.0 / 2f64.sqrt()).norm() < 1e-7, "{q0}");
        assert!(sample(&p, C::from(1.0), DEFAULT_TOL).unwrap().near_singular);
    }

    #[test]
    fn pb_product_identity() {
        let p = PeriodicPair::family_d(0.7, 1.6).unwrap();
        for k in [C::new(0.41, 0.33), C::new(-0.8, 0.57), C::new(1.2, -0.3)] {
            let s = sample(&p, k, DEFAULT_TOL).unwrap();
            let t = sample(&p, k.conj(), DEFAULT_TOL).unwrap();
            let lhs = s.ab2 * (s.ab2 - 1.0);
            let rhs = s.pb * t.pb.conj();
            assert!((lhs - rhs).norm() < 1e-8 * (1.0 + lhs.norm()), "{lhs} {rhs}");
        }
    }

    #[test]
    fn large_k_pb_decay() {
        let p = PeriodicPair::exponential(1.4, 1.0, C::new(0.2, 0.5)).unwrap();
        let k = C::from_polar(12.0, PI / 8.0);
        let m = monodromy(&p, k, DEFAULT_TOL).unwrap();
        let pv = pb(&m, sqrt_g_asymptotic(&m)).unwrap();
        let lead = -C::from(1.4) / (2.0 * I * k);
        assert!((pv - lead).norm() < 0.05 * lead.norm(), "{pv} {lead}");
        let d = PeriodicPair::family_d(1.0, 1.0).unwrap();
        let m = monodromy(&d, C::new(0.4, 0.3), DEFAULT_TOL).unwrap();
        let sg = sqrt_g_scaled(m.k, m.tau, m.log_scale);
        assert!((sqrt_g_asymptotic(&m) - sg).norm() < 1e-9 * sg.norm());
    }

    #[test]
    fn tracked_root_squares_to_g() {
        let p = d11();
        let path: Vec<Monodromy> = (0..20)
            .map(|j| monodromy(&p, C::new(0.2 + 0.01 * j as f64, 0.3), DEFAULT_TOL).unwrap())
            .collect();
        let r = sqrt_g_tracked(&path);
        for (m, s) in path.iter().zip(&r) {
            assert!((s * s - g_scaled(m)).norm() < 1e-12);
        }
        for w in r.windows(2) {
            assert!((w[1] - w[0]).norm() < 0.2);
        }
    }
}
