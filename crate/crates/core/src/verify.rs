//! Black-box checks on a solution evaluator u(x, t): finite-difference NLS
//! residual, boundary traces, t-periodicity, spatial decay and L1 norms.

use crate::boundary::PeriodicPair;
use crate::error::{Error, Result};
use crate::monodromy::C;
use crate::quadrature::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

const I: C = C::new(0.0, 1.0);

/// Max over grid points with x >= h_x and t >= h_t of
/// |i D_t u + D_xx u - 2|u|^2 u|, central differences.
pub fn nls_residual<U>(u: &U, xs: &[f64], ts: &[f64], hx: f64, ht: f64) -> Result<f64>
where
    U: Fn(f64, f64) -> Result<C> + Sync + ?Sized,
{
    if !(hx > 0.0 && ht > 0.0) {
        return Err(Error::InvalidInput("step sizes must be positive".into()));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .filter(|&&x| x - hx >= 0.0)
        .flat_map(|&x| ts.iter().filter(|&&t| t - ht >= 0.0).map(move |&t| (x, t)))
        .collect();
    let res = pts
        .par_iter()
        .map(|&(x, t)| {
            let u0 = u(x, t)?;
            let ut = (u(x, t + ht)? - u(x, t - ht)?) / (2.0 * ht);
            let uxx = (u(x + hx, t)? - 2.0 * u0 + u(x - hx, t)?) / (hx * hx);
            Ok((I * ut + uxx - 2.0 * u0.norm_sqr() * u0).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// u_x(0, t) by the 5-point one-sided fourth-order formula.
pub fn ux_at_zero<U: Fn(f64, f64) -> Result<C> + ?Sized>(u: &U, t: f64, hx: f64) -> Result<C> {
    const W: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let mut acc = C::new(0.0, 0.0);
    for (j, w) in W.iter().enumerate() {
        acc += *w * u(j as f64 * hx, t)?;
    }
    Ok(acc / (12.0 * hx))
}

/// (max |u(0,t) - g0(t)|, max |u_x(0,t) - g1(t)|) over `ts`.
pub fn boundary_check<U>(u: &U, pair: &PeriodicPair, ts: &[f64], hx: f64) -> Result<(f64, f64)>
where
    U: Fn(f64, f64) -> Result<C> + Sync + ?Sized,
{
    let errs = ts
        .par_iter()
        .map(|&t| {
            let (g0, g1) = pair.eval(t);
            Ok(((u(0.0, t)? - g0).norm(), (ux_at_zero(u, t, hx)? - g1).norm()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(errs.into_iter().fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))))
}

/// max |u(x, t + tau) - u(x, t)| over the grid.
pub fn periodicity_check<U>(u: &U, tau: f64, xs: &[f64], ts: &[f64]) -> Result<f64>
where
    U: Fn(f64, f64) -> Result<C> + Sync + ?Sized,
{
    let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    let e = pts
        .par_iter()
        .map(|&(x, t)| Ok((u(x, t + tau)? - u(x, t)?).norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(e.into_iter().fold(0.0, f64::max))
}

/// (x, sup_t |u(x, t)|) for each x.
pub fn decay_check<U>(u: &U, xs: &[f64], ts: &[f64]) -> Result<Vec<(f64, f64)>>
where
    U: Fn(f64, f64) -> Result<C> + Sync + ?Sized,
{
    xs.par_iter()
        .map(|&x| {
            let mut m: f64 = 0.0;
            for &t in ts {
                m = m.max(u(x, t)?.norm());
            }
            Ok((x, m))
        })
        .collect()
}

/// Beyond the profile's maximum, sup |u| does not grow and ends below 1% of
/// the peak.
pub fn decays(profile: &[(f64, f64)]) -> bool {
    let Some((imax, &(_, peak))) = profile.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)) else {
        return true;
    };
    if peak == 0.0 {
        return true;
    }
    let tail = &profile[imax..];
    tail.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9) + 1e-300) && tail.last().unwrap().1 <= 1e-2 * peak
}

/// ||u(., t)||_1 on [0, inf), truncated where |u| drops below 1e-14.
pub fn l1_norm<U: Fn(f64, f64) -> Result<C> + ?Sized>(u: &U, t: f64) -> Result<f64> {
    let rule = GaussLegendre::new(16);
    let width = 0.25;
    let mut total = 0.0;
    let mut a = 0.0;
    while a < 400.0 {
        let mut panel = 0.0;
        let mut peak: f64 = 0.0;
        for (x, w) in rule.mapped(a, a + width) {
            let v = u(x, t)?.norm();
            panel += w * v;
            peak = peak.max(v);
        }
        total += panel;
        a += width;
        if peak < 1e-14 {
            return Ok(total);
        }
    }
    Err(Error::Inconclusive(format!("|u(x, {t})| has not dropped below 1e-14 by x = 400")))
}

pub fn l1_growth<U>(u: &U, ts: &[f64]) -> Result<Vec<(f64, f64)>>
where
    U: Fn(f64, f64) -> Result<C> + Sync + ?Sized,
{
    ts.par_iter().map(|&t| Ok((t, l1_norm(u, t)?))).collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyOptions {
    pub h: f64,
    pub pde_tol: f64,
    pub min_order: f64,
    pub g0_tol: f64,
    pub g1_tol: f64,
    pub periodicity_tol: f64,
    /// Relative tolerance on L1(t + tau) - L1(t).
    pub l1_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { h: 1e-3, pde_tol: 1e-5, min_order: 1.9, g0_tol: 1e-10, g1_tol: 1e-6, periodicity_tol: 1e-12, l1_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub max_pde_residual: f64,
    /// log2 of residual(2h) / residual(h); None when the residual is
    /// already at rounding level.
    pub pde_order: Option<f64>,
    pub boundary_err_g0: Option<f64>,
    pub boundary_err_g1: Option<f64>,
    pub periodicity_err: f64,
    pub decay_profile: Vec<(f64, f64)>,
    pub l1_growth: Vec<(f64, f64)>,
    pub pass: bool,
}

/// All checks on the grid xs x ts. The decay profile runs over
/// `decay_xs`; L1 norms are sampled at the grid times and one period later.
pub fn verify<U>(
    u: &U,
    pair: Option<&PeriodicPair>,
    tau: f64,
    xs: &[f64],
    ts: &[f64],
    decay_xs: &[f64],
    opts: &VerifyOptions,
) -> Result<VerificationReport>
where
    U: Fn(f64, f64) -> Result<C> + Sync + ?Sized,
{
    let h = opts.h;
    let r1 = nls_residual(u, xs, ts, h, h)?;
    // halving from 2h to h keeps the D_xx rounding, eps |u| / h^2, well
    // below the truncation error
    let r0 = nls_residual(u, xs, ts, 2.0 * h, 2.0 * h)?;
    let floor = 1e2 * f64::EPSILON / (h * h);
    let pde_order = if r1 > floor { Some((r0 / r1).log2()) } else { None };
    let (g0, g1) = match pair {
        Some(p) => {
            let (a, b) = boundary_check(u, p, ts, h)?;
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    let periodicity_err = periodicity_check(u, tau, xs, ts)?;
    let decay_profile = decay_check(u, decay_xs, ts)?;
    let lt: Vec<f64> = ts.iter().copied().chain(ts.iter().map(|t| t + tau)).collect();
    let l1 = l1_growth(u, &lt)?;
    let n = ts.len();
    let l1_scale = l1.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-300);
    let l1_ok = (0..n).all(|i| (l1[i].1 - l1[i + n].1).abs() <= opts.l1_tol * l1_scale);
    let pass = r1 <= opts.pde_tol
        && pde_order.is_none_or(|o| o >= opts.min_order)
        && g0.is_none_or(|e| e <= opts.g0_tol)
        && g1.is_none_or(|e| e <= opts.g1_tol)
        && periodicity_err <= opts.periodicity_tol
        && decays(&decay_profile)
        && l1_ok;
    Ok(VerificationReport {
        max_pde_residual: r1,
        pde_order,
        boundary_err_g0: g0,
        boundary_err_g1: g1,
        periodicity_err,
        decay_profile,
        l1_growth: l1,
        pass,
    })
}
