//! One-period transfer matrix of the background t-part
//! psi_t = (-2 i k^2 sigma3 + V(t,k)) psi, psi(0) = I.
//!
//! Integration uses a fourth-order Magnus scheme (two Gauss points). The
//! generator is trace-free, so each step is an exact SL(2) exponential and
//! det Z = 1 holds to rounding. Growth e^{2|Im k^2| t} is divided out as a
//! scalar factor and kept separately in `log_scale`.

use crate::boundary::PeriodicPair;
use crate::error::{Error, Result};
use crate::lattice;
use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

pub type C = Complex64;
pub type Mat2 = Matrix2<Complex64>;

const I: C = C::new(0.0, 1.0);
const STEP_BUDGET: usize = 1 << 22;
/// Default Richardson tolerance; the rounding floor sits near 1e-13.
pub const DEFAULT_TOL: f64 = 1e-11;

/// V^b(t, k).
pub fn vb_matrix(pair: &PeriodicPair, t: f64, k: C) -> Mat2 {
    let (g0, g1) = pair.eval(t);
    let m = g0.norm_sqr();
    Mat2::new(
        -I * m,
        2.0 * k * g0 + I * g1,
        2.0 * k * g0.conj() - I * g1.conj(),
        I * m,
    )
}

fn generator(pair: &PeriodicPair, t: f64, k: C) -> Mat2 {
    let mut a = vb_matrix(pair, t, k);
    let d = 2.0 * I * k * k;
    a[(0, 0)] -= d;
    a[(1, 1)] += d;
    a
}

/// exp(M) for trace-free 2x2 M: cosh(mu) I + sinh(mu)/mu M with mu^2 = -det M.
pub fn expm_traceless(m: &Mat2) -> Mat2 {
    let mu2 = -(m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]);
    let (ch, sh) = if mu2.norm() < 1e-8 {
        // series, accurate to far below rounding for |mu| < 1e-4
        (1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0, 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0)
    } else {
        let mu = mu2.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    };
    Mat2::new(ch + sh * m[(0, 0)], sh * m[(0, 1)], sh * m[(1, 0)], ch + sh * m[(1, 1)])
}

/// Z(k) = psi(tau, k), stored as `z_scaled = Z e^{-log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub k: C,
    pub tau: f64,
    pub z_scaled: Mat2,
    pub log_scale: f64,
    /// Richardson estimate of the error in `z_scaled`, relative to its norm.
    pub est_error: f64,
    pub steps: usize,
}

impl Monodromy {
    /// Unscaled Z. Entries overflow when `log_scale` exceeds ~700.
    pub fn z(&self) -> Mat2 {
        self.z_scaled * C::from(self.log_scale.exp())
    }

    pub fn det(&self) -> C {
        let z = &self.z_scaled;
        (z[(0, 0)] * z[(1, 1)] - z[(0, 1)] * z[(1, 0)]) * (2.0 * self.log_scale).exp()
    }

    pub fn trace_scaled(&self) -> C {
        self.z_scaled[(0, 0)] + self.z_scaled[(1, 1)]
    }
}

fn integrate(pair: &PeriodicPair, k: C, steps: usize, lambda: f64) -> Mat2 {
    let tau = pair.tau();
    let h = tau / steps as f64;
    let c1 = 0.5 - 3f64.sqrt() / 6.0;
    let c2 = 0.5 + 3f64.sqrt() / 6.0;
    let comm_w = C::from(3f64.sqrt() * h * h / 12.0);
    let decay = (-lambda * h).exp();
    let mut psi = Mat2::identity();
    for n in 0..steps {
        let t0 = n as f64 * h;
        let a1 = generator(pair, t0 + c1 * h, k);
        let a2 = generator(pair, t0 + c2 * h, k);
        let omega = (a1 + a2) * C::from(h / 2.0) + (a2 * a1 - a1 * a2) * comm_w;
        psi = expm_traceless(&omega) * psi * C::from(decay);
    }
    psi
}

fn initial_steps(pair: &PeriodicPair, k: C) -> usize {
    let (m0, m1) = pair.magnitude();
    let size = 1.0 + k.norm_sqr() + (m0 * k.norm() + m0 * m0 + m1);
    ((4.0 * size * pair.tau()).ceil() as usize).max(16)
}

/// Z(k) with step doubling until the Richardson estimate is below `tol`.
pub fn monodromy(pair: &PeriodicPair, k: C, tol: f64) -> Result<Monodromy> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    if !k.re.is_finite() || !k.im.is_finite() {
        return Err(Error::InvalidInput("k must be finite".into()));
    }
    let tau = pair.tau();
    let lambda = 2.0 * (k * k).im.abs();
    let mut n = initial_steps(pair, k);
    if pair.is_zero() {
        let e = C::from_polar(1.0, -2.0 * (k * k).re * tau) * (2.0 * (k * k).im * tau - lambda * tau).exp();
        let f = C::from_polar(1.0, 2.0 * (k * k).re * tau) * (-2.0 * (k * k).im * tau - lambda * tau).exp();
        return Ok(Monodromy {
            k,
            tau,
            z_scaled: Mat2::new(e, C::from(0.0), C::from(0.0), f),
            log_scale: lambda * tau,
            est_error: 0.0,
            steps: 0,
        });
    }
    let mut coarse = integrate(pair, k, n, lambda);
    let mut prev_est = f64::INFINITY;
    loop {
        if 2 * n > STEP_BUDGET {
            return Err(Error::NonConvergence { k, tol, max_steps: STEP_BUDGET });
        }
        let fine = integrate(pair, k, 2 * n, lambda);
        let est = (fine - coarse).norm() / 15.0 / fine.norm().max(f64::MIN_POSITIVE);
        n *= 2;
        // rounding floor reached: further doubling only adds noise
        if est > 0.5 * prev_est && est > tol {
            return Err(Error::NonConvergence { k, tol, max_steps: n });
        }
        prev_est = est;
        if est <= tol {
            // one Richardson extrapolation step on top of the finer solution
            let z = fine + (fine - coarse) / C::from(15.0);
            return Ok(Monodromy { k, tau, z_scaled: z, log_scale: lambda * tau, est_error: est, steps: n });
        }
        coarse = fine;
    }
}

/// Z(k) at many points in parallel; results keep input order.
pub fn monodromy_grid(pair: &PeriodicPair, ks: &[C], tol: f64) -> Vec<Result<Monodromy>> {
    ks.par_iter().map(|&k| monodromy(pair, k, tol)).collect()
}

/// Order-1/k truncation of the large-k expansion of Z, divided by e^{log_scale}.
pub fn z_truncation_scaled(pair: &PeriodicPair, k: C, log_scale: f64) -> Mat2 {
    let tau = pair.tau();
    let eta1 = pair.eta1(tau);
    let g0 = pair.g0_at_zero();
    let phase = -2.0 * I * k * k * tau;
    let em = (phase - log_scale).exp();
    let ep = (-phase - log_scale).exp();
    let s_scaled = (ep - em) / (2.0 * I);
    Mat2::new(
        em * (1.0 - I * eta1 / k),
        g0 * s_scaled / k,
        g0.conj() * s_scaled / k,
        ep * (1.0 + I * eta1 / k),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub samples: Vec<C>,
    /// |Z - truncation| / e^{log_scale}, per sample.
    pub deviations: Vec<f64>,
    /// deviation[i] / deviation[i+1].
    pub ratios: Vec<f64>,
}

/// Deviation of Z from the order-1/k truncation of its large-k expansion.
pub fn check_z_asymptotics(pair: &PeriodicPair, k_samples: &[C], tol: f64) -> Result<AsymptoticsReport> {
    let tau = pair.tau();
    let omega = pair.lattice_omega();
    let guard = 1e-3 * omega.sqrt();
    for &k in k_samples {
        let d = lattice::distance(k, tau);
        if d < guard {
            return Err(Error::SampleTooClose { k, guard });
        }
    }
    let deviations = k_samples
        .par_iter()
        .map(|&k| {
            let m = monodromy(pair, k, tol)?;
            let t = z_truncation_scaled(pair, k, m.log_scale);
            Ok((m.z_scaled - t).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    let ratios = deviations.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(AsymptoticsReport { samples: k_samples.to_vec(), deviations, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn family_d11() -> PeriodicPair {
        PeriodicPair::family_d(1.0, 1.0).unwrap()
    }

    #[test]
    fn vb_at_origin() {
        let v = vb_matrix(&family_d11(), 0.0, C::from(0.0));
        let s = 2f64.sqrt();
        let want = Mat2::new(-I, -I * s, I * s, I);
        assert!((v - want).norm() < 1e-15);
        assert!((v[(0, 0)] + v[(1, 1)]).norm() == 0.0);
    }

    #[test]
    fn zero_pair_is_free_evolution() {
        let p = PeriodicPair::zero(2.0 * PI).unwrap();
        let m = monodromy(&p, C::from(1.0), 1e-12).unwrap();
        assert!((m.z() - Mat2::identity()).norm() < 1e-12);
        let k = C::new(0.4, 0.3);
        let m = monodromy(&p, k, 1e-12).unwrap();
        let e = (-2.0 * I * k * k * p.tau()).exp();
        assert!((m.z()[(0, 0)] - e).norm() < 1e-12 && (m.z()[(1, 1)] - 1.0 / e).norm() < 1e-12);
    }

    #[test]
    fn expm_matches_series() {
        let m = Mat2::new(C::new(0.1, 0.2), C::new(-0.3, 0.05), C::new(0.2, 0.1), C::new(-0.1, -0.2));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for j in 1..30 {
            term = term * m / C::from(j as f64);
            sum += term;
        }
        assert!((expm_traceless(&m) - sum).norm() < 1e-15);
    }

    #[test]
    fn determinant_and_real_line_symmetry() {
        let p = family_d11();
        for k in [0.3, 1.1, 2.7] {
            let m = monodromy(&p, C::from(k), 1e-12).unwrap();
            let z = m.z();
            assert!((m.det() - 1.0).norm() < 1e-10);
            assert!((z[(1, 1)] - z[(0, 0)].conj()).norm() < 1e-10);
            assert!((z[(1, 0)] - z[(0, 1)].conj()).norm() < 1e-10);
            assert!((z[(0, 0)].norm_sqr() - z[(0, 1)].norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let p = PeriodicPair::exponential(0.8, 1.3, C::new(0.2, -0.5)).unwrap();
        let k = C::new(0.7, 0.2);
        let lam = 2.0 * (k * k).im.abs();
        let reference = integrate(&p, k, 4096, lam);
        let e1 = (integrate(&p, k, 64, lam) - reference).norm();
        let e2 = (integrate(&p, k, 128, lam) - reference).norm();
        let ratio = e1 / e2;
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn truncation_deviation_decays_like_inverse_square() {
        let p = family_d11();
        let ray = C::from_polar(1.0, PI / 4.0);
        let ks: Vec<C> = [5.0, 10.0, 20.0].iter().map(|r| ray * *r).collect();
        let rep = check_z_asymptotics(&p, &ks, 1e-12).unwrap();
        for r in &rep.ratios {
            assert!((r - 4.0).abs() < 0.4, "ratios {:?}", rep.ratios);
        }
        let zero = PeriodicPair::zero(2.0).unwrap();
        let rep = check_z_asymptotics(&zero, &ks, 1e-12).unwrap();
        assert!(rep.deviations.iter().all(|d| *d < 1e-14));
    }

    #[test]
    fn guard_rejects_lattice_samples() {
        let p = family_d11();
        assert!(matches!(
            check_z_asymptotics(&p, &[C::new(0.0, 0.5)], 1e-10),
            Err(Error::SampleTooClose { .. })
        ));
    }
}
