//! Eventual-admissibility gates: odd-order zeros of G, poles of Q^b in the
//! upper half-plane, sup |Q^b| < 1 on the real line, the 1/k decay of P^b,
//! and the lattice poles of P^b with their residues.

use crate::boundary::{PairKind, PeriodicPair};
use crate::error::{Error, Result};
use crate::lattice;
use crate::monodromy::{self, C};
use crate::quadrature::{circle_nodes, GaussLegendre};
use crate::spectral::{self, Function};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Clone, Copy)]
pub struct GateOptions {
    /// Monodromy tolerance for A3 and for the residues of retained poles.
    pub tol: f64,
    /// Looser tolerance for the winding scan and for pole detection.
    pub scan_tol: f64,
    pub a3_margin: f64,
    /// Half-width of the real interval scanned for sup |Q^b|.
    pub a3_half_width: f64,
    pub a3_spacing: f64,
    pub n_max: u32,
    pub radius_factor: f64,
    /// Residues below this modulus count as zero.
    pub residue_tol: f64,
    /// Relative tolerance on the leading coefficient of k P^b.
    pub decay_tol: f64,
    /// Half-size of the region scanned for odd zeros of G and poles of Q^b;
    /// derived from the data when None.
    pub scan_extent: Option<f64>,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            scan_tol: 1e-6,
            a3_margin: 1e-6,
            a3_half_width: 8.0,
            a3_spacing: 0.05,
            n_max: 32,
            radius_factor: 0.25,
            residue_tol: 1e-7,
            decay_tol: 0.01,
            scan_extent: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct A3Result {
    pub sup: f64,
    pub argmax: f64,
    pub pass: bool,
}

/// sup over the real line of |q|, by a grid scan over [-l, l] refined by
/// golden-section search around the largest samples.
pub fn check_a3_with<F>(q: F, l: f64, spacing: f64, margin: f64) -> Result<A3Result>
where
    F: Fn(f64) -> Result<C> + Sync,
{
    a3_two_level(&q, &q, l, spacing, margin)
}

/// Grid scan with `coarse`, refinement with `fine`.
fn a3_two_level<F, G>(coarse: &F, q: &G, l: f64, spacing: f64, margin: f64) -> Result<A3Result>
where
    F: Fn(f64) -> Result<C> + Sync,
    G: Fn(f64) -> Result<C> + Sync,
{
    if !(l > 0.0) || !(spacing > 0.0) {
        return Err(Error::InvalidInput("A3 scan needs l > 0 and spacing > 0".into()));
    }
    let n = (2.0 * l / spacing).ceil() as usize + 1;
    let xs: Vec<f64> = (0..n).map(|j| -l + 2.0 * l * j as f64 / (n - 1) as f64).collect();
    let vals = xs.par_iter().map(|&x| coarse(x).map(|v| v.norm())).collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &j in order.iter().take(3) {
        let lo = xs[j.saturating_sub(1)];
        let hi = xs[(j + 1).min(n - 1)];
        let (x, v) = golden_max(|x| q(x).map(|v| v.norm()), lo, hi, 1e-7)?;
        if v > best.0 {
            best = (v, x);
        }
    }
    Ok(A3Result { sup: best.0, argmax: best.1, pass: best.0 < 1.0 - margin })
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// A3 for a pair, with Q^b from the monodromy.
pub fn check_a3(pair: &PeriodicPair, opts: &GateOptions) -> Result<A3Result> {
    let coarse_tol = (0.1 * opts.scan_tol).max(opts.tol);
    a3_two_level(
        &|x| spectral::value(pair, Function::Qb, C::from(x), coarse_tol),
        &|x| spectral::value(pair, Function::Qb, C::from(x), opts.tol),
        opts.a3_half_width,
        opts.a3_spacing,
        opts.a3_margin,
    )
}

/// Half-size of the k-region that contains every branch point of a pair.
pub fn scan_extent(pair: &PeriodicPair) -> f64 {
    let bound = match pair.kind() {
        PairKind::Exponential { alpha, omega, c } => {
            // Fujiwara bound for the roots of Omega^2
            let a2 = 2.0 * omega;
            let a1 = 4.0 * alpha * c.im;
            let a0 = (omega / 2.0 + alpha * alpha).powi(2) - c.norm_sqr();
            2.0 * f64::max((a2.abs() / 4.0).sqrt(), f64::max((a1.abs() / 4.0).cbrt(), (a0.abs() / 8.0).powf(0.25)))
        }
        PairKind::Fourier { .. } => {
            let (m0, m1) = pair.magnitude();
            1.0 + m0 + m1.sqrt() + pair.lattice_omega().sqrt()
        }
    };
    (1.25 * bound).max(0.75 * pair.lattice_omega().sqrt()).max(0.5)
}

/// Grid lines at x with x^2 = (n + 1/2) omega / 4, halfway between lattice points.
fn half_lattice_lines(extent: f64, omega: f64, cells: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let step = extent / cells as f64;
    let mut last = f64::NEG_INFINITY;
    for j in 0..=cells {
        let target = j as f64 * step;
        let n = (4.0 * target * target / omega - 0.5).round().max(0.0);
        let x = ((n + 0.5) * omega).sqrt() / 2.0;
        if x > last + 1e-12 {
            out.push(x);
            last = x;
        }
    }
    out
}

/// R = G / (-4 sin^2(2 k^2 tau)), in scaled form.
fn ratio(pair: &PeriodicPair, k: C, tol: f64) -> Result<C> {
    let m = monodromy::monodromy(pair, k, tol)?;
    let sg = spectral::sqrt_g_scaled(k, m.tau, m.log_scale);
    Ok(spectral::g_scaled(&m) / (sg * sg))
}

/// Change of arg R along the segment a -> b, with adaptive subdivision.
fn arg_change(pair: &PeriodicPair, a: C, b: C, ra: C, rb: C, tol: f64, depth: u32) -> Result<f64> {
    let d = (rb / ra).arg();
    if depth == 0 || (d.abs() < PI / 4.0 && depth < 9) {
        return Ok(d);
    }
    let mid = 0.5 * (a + b);
    let rm = ratio(pair, mid, tol)?;
    Ok(arg_change(pair, a, mid, ra, rm, tol, depth - 1)? + arg_change(pair, mid, b, rm, rb, tol, depth - 1)?)
}

/// Change of arg R along a segment, starting from four forced subdivisions.
fn edge_arg(pair: &PeriodicPair, a: C, b: C, tol: f64) -> Result<f64> {
    let pts: Vec<C> = (0..=4).map(|i| a + (b - a) * (i as f64 / 4.0)).collect();
    let vals: Vec<C> = pts.iter().map(|&p| ratio(pair, p, tol)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for i in 0..4 {
        total += arg_change(pair, pts[i], pts[i + 1], vals[i], vals[i + 1], tol, 12)?;
    }
    Ok(total)
}

fn winding(pair: &PeriodicPair, corners: [C; 4], tol: f64) -> Result<i64> {
    let mut total = 0.0;
    for j in 0..4 {
        total += edge_arg(pair, corners[j], corners[(j + 1) % 4], tol)?;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessResult {
    pub pass: bool,
    /// Centres of cells found to contain an odd number of odd-order zeros of G.
    pub odd_zeros: Vec<C>,
    pub cells_checked: usize,
}

/// Scan of the closed upper half-plane (|Re k| <= X, -h <= Im k <= Y) for
/// odd-order zeros of G, by the winding of the sin-normalized ratio
/// G / (-4 sin^2(2 k^2 tau)) around cells. Cells with nonzero winding are
/// subdivided; a leaf with odd winding holds an odd-order zero.
pub fn check_smoothness(pair: &PeriodicPair, opts: &GateOptions) -> Result<SmoothnessResult> {
    let extent = opts.scan_extent.unwrap_or_else(|| scan_extent(pair));
    let omega = pair.lattice_omega();
    let xs_pos = half_lattice_lines(extent, omega, 4);
    let mut xs: Vec<f64> = xs_pos.iter().rev().map(|x| -x).collect();
    xs.extend(&xs_pos);
    let h = 0.5 * (0.5 * omega).sqrt() / 2.0;
    let mut ys = vec![-h];
    ys.extend(half_lattice_lines(extent, omega, 3));
    let (nx, ny) = (xs.len(), ys.len());
    // arg changes along the grid edges, each computed once
    let mut segs = Vec::new();
    for &y in &ys {
        for w in xs.windows(2) {
            segs.push((C::new(w[0], y), C::new(w[1], y)));
        }
    }
    for &x in &xs {
        for w in ys.windows(2) {
            segs.push((C::new(x, w[0]), C::new(x, w[1])));
        }
    }
    let args = segs.par_iter().map(|&(a, b)| edge_arg(pair, a, b, opts.scan_tol)).collect::<Result<Vec<f64>>>()?;
    let h_edge = |i: usize, j: usize| args[j * (nx - 1) + i];
    let v_edge = |i: usize, j: usize| args[ny * (nx - 1) + i * (ny - 1) + j];
    let mut flagged = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let total = h_edge(i, j) + v_edge(i + 1, j) - h_edge(i, j + 1) - v_edge(i, j);
            if (total / (2.0 * PI)).round() as i64 != 0 {
                flagged.push((C::new(xs[i], ys[j]), C::new(xs[i + 1], ys[j + 1])));
            }
        }
    }
    let min_size = 1e-3 * extent;
    let results = flagged
        .par_iter()
        .map(|&(lo, hi)| refine_cell(pair, lo, hi, min_size, opts.scan_tol))
        .collect::<Result<Vec<(Vec<C>, usize)>>>()?;
    let mut odd = Vec::new();
    let mut count = (nx - 1) * (ny - 1);
    for (z, n) in results {
        odd.extend(z);
        count += n;
    }
    Ok(SmoothnessResult { pass: odd.is_empty(), odd_zeros: odd, cells_checked: count })
}

fn refine_cell(pair: &PeriodicPair, lo: C, hi: C, min_size: f64, tol: f64) -> Result<(Vec<C>, usize)> {
    let corners = [lo, C::new(hi.re, lo.im), hi, C::new(lo.re, hi.im)];
    let w = winding(pair, corners, tol)?;
    if w == 0 {
        return Ok((Vec::new(), 1));
    }
    let size = (hi.re - lo.re).max(hi.im - lo.im);
    if size < min_size {
        let centre = 0.5 * (lo + hi);
        return Ok((if w % 2 != 0 { vec![centre] } else { Vec::new() }, 1));
    }
    // split off-centre so new edges avoid the axes and the lattice
    let mx = lo.re + 0.4897 * (hi.re - lo.re);
    let my = lo.im + 0.5113 * (hi.im - lo.im);
    let mut out = Vec::new();
    let mut n = 1;
    for (a, b) in [
        (lo, C::new(mx, my)),
        (C::new(mx, lo.im), C::new(hi.re, my)),
        (C::new(lo.re, my), C::new(mx, hi.im)),
        (C::new(mx, my), hi),
    ] {
        let (z, c) = refine_cell(pair, a, b, min_size, tol)?;
        out.extend(z);
        n += c;
    }
    Ok((out, n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QPoleResult {
    pub pass: bool,
    /// (1/2 pi i) times the contour integrals of Q^b k^m, m = 0, 1, 2.
    pub moments: [C; 3],
}

/// Moments of Q^b around the rectangle [-X, X] x [delta, Y]; all vanish when
/// Q^b is analytic inside.
pub fn check_qb_poles(pair: &PeriodicPair, opts: &GateOptions) -> Result<QPoleResult> {
    let extent = opts.scan_extent.unwrap_or_else(|| scan_extent(pair));
    let omega = pair.lattice_omega();
    let delta = 10.0 * spectral::default_guard(pair.tau());
    let y_top = *half_lattice_lines(extent, omega, 1).last().unwrap_or(&extent);
    let x = extent;
    let corners = [C::new(-x, delta), C::new(x, delta), C::new(x, y_top), C::new(-x, y_top)];
    let rule = GaussLegendre::new(16);
    let mut nodes = Vec::new();
    for j in 0..4 {
        let (a, b) = (corners[j], corners[(j + 1) % 4]);
        let len = (b - a).norm();
        let panels = (len / 0.5).ceil().max(2.0) as usize;
        for p in 0..panels {
            let pa = a + (b - a) * (p as f64 / panels as f64);
            let pb = a + (b - a) * ((p + 1) as f64 / panels as f64);
            for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                let z = 0.5 * (pa + pb) + 0.5 * (pb - pa) * u;
                nodes.push((z, 0.5 * (pb - pa) * w));
            }
        }
    }
    let vals = nodes
        .par_iter()
        .map(|&(z, _)| spectral::value(pair, Function::Qb, z, 10.0 * opts.tol))
        .collect::<Result<Vec<C>>>()?;
    let mut moments = [C::new(0.0, 0.0); 3];
    let mut scale = 0.0;
    for ((z, w), q) in nodes.iter().zip(&vals) {
        for (m, acc) in moments.iter_mut().enumerate() {
            *acc += q * z.powi(m as i32) * w;
        }
        scale += (q * w).norm();
    }
    for m in moments.iter_mut() {
        *m /= 2.0 * PI * I;
    }
    let thresh = 1e-6 * (1.0 + scale);
    Ok(QPoleResult { pass: moments.iter().all(|m| m.norm() < thresh), moments })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayResult {
    pub pass: bool,
    pub expected: C,
    /// Fitted L and m in k P^b = L + m / k, per ray.
    pub fits: Vec<(C, C)>,
}

/// Fit of k P^b = L + m/k on the rays arg k = pi/8 and 3 pi/8; passes when L
/// matches -conj(g0(0)) / (2i) within `decay_tol` and the fit residual
/// shrinks like 1/k^2.
pub fn check_decay(pair: &PeriodicPair, opts: &GateOptions) -> Result<DecayResult> {
    let expected = -pair.g0_at_zero().conj() / (2.0 * I);
    let (m0, m1) = pair.magnitude();
    let scale = 1.0 + m0 + m1.sqrt() + pair.lattice_omega().sqrt();
    let radii: Vec<f64> = [3.0, 4.0, 6.0, 8.0].iter().map(|r| r * scale).collect();
    let mut fits = Vec::new();
    let mut pass = true;
    for theta in [PI / 8.0, 3.0 * PI / 8.0] {
        let ks: Vec<C> = radii.iter().map(|&r| C::from_polar(r, theta)).collect();
        let kp = ks
            .par_iter()
            .map(|&k| {
                let m = monodromy::monodromy(pair, k, opts.tol)?;
                Ok(k * spectral::pb(&m, spectral::sqrt_g_asymptotic(&m))?)
            })
            .collect::<Result<Vec<C>>>()?;
        // least squares for (L, m) on basis (1, 1/k)
        let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, C::new(0.0, 0.0), 0.0, C::new(0.0, 0.0), C::new(0.0, 0.0));
        for (k, v) in ks.iter().zip(&kp) {
            let e = 1.0 / k;
            s11 += 1.0;
            s12 += e;
            s22 += e.norm_sqr();
            b1 += v;
            b2 += e.conj() * v;
        }
        let det = s11 * s22 - s12.norm_sqr();
        let l = (s22 * b1 - s12 * b2) / det;
        let m = (s11 * b2 - s12.conj() * b1) / det;
        let resid: Vec<f64> = ks.iter().zip(&kp).map(|(k, v)| (v - l - m / k).norm()).collect();
        let lead_ok = (l - expected).norm() <= opts.decay_tol * expected.norm().max(1e-8 / opts.decay_tol);
        // 1/k^2 remainder: the residual is small against the 1/k term at the outer radius
        let rem_ok = resid.iter().all(|r| *r <= 0.05 * (expected.norm() + m.norm() / radii[0]) + 1e-8);
        pass &= lead_ok && rem_ok;
        fits.push((l, m));
    }
    Ok(DecayResult { pass, expected, fits })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleCandidate {
    pub n: u32,
    pub k: C,
    pub residue: C,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleScan {
    /// Upper lattice points i sqrt(n omega)/2, n = 1..n_max, with the residue of P^b.
    pub upper: Vec<PoleCandidate>,
    /// Real lattice points sqrt(n omega)/2, n = 0..n_max (both signs), with residues.
    pub real: Vec<PoleCandidate>,
    pub real_pass: bool,
}

impl PoleScan {
    /// Upper candidates with nonzero residue.
    pub fn poles(&self, tol: f64) -> Vec<PoleCandidate> {
        self.upper.iter().copied().filter(|c| c.residue.norm() > tol).collect()
    }
}

fn residue_at(pair: &PeriodicPair, k: C, radius_factor: f64, tol: f64, moment: i32, nodes: usize) -> Result<C> {
    let tau = pair.tau();
    let gap = lattice::gap_at(k, tau);
    let r = radius_factor * gap;
    let guard = spectral::default_guard(tau);
    if r + guard >= gap || r <= guard {
        return Err(Error::ContourCrossesSingularity { center: k });
    }
    let nodes = circle_nodes(k, r, nodes);
    let vals = nodes
        .iter()
        .map(|&(z, _)| {
            let m = monodromy::monodromy(pair, z, tol)?;
            spectral::pb(&m, spectral::sqrt_g_scaled(z, m.tau, m.log_scale))
        })
        .collect::<Result<Vec<C>>>()?;
    let mut acc = C::new(0.0, 0.0);
    for ((z, w), v) in nodes.iter().zip(&vals) {
        acc += v * (z - k).powi(moment) * w;
    }
    Ok(acc / (2.0 * PI * I))
}

const DETECT: f64 = 1e-5;

fn residue_2stage(pair: &PeriodicPair, k: C, radius_factor: f64, opts: &GateOptions, moment: i32) -> Result<C> {
    let r = residue_at(pair, k, radius_factor, opts.scan_tol, moment, 32)?;
    if r.norm() < DETECT.max(opts.residue_tol) {
        return Ok(r);
    }
    residue_at(pair, k, radius_factor, opts.tol, moment, 64)
}

/// Residues of P^b at the lattice points, by trapezoid sums on circles of
/// radius `radius_factor` times the gap to the nearest other lattice point.
/// A 32-node pass at `scan_tol` screens every point; points whose screened
/// residue exceeds `DETECT` are recomputed with 64 nodes at `tol`.
pub fn locate_poles(pair: &PeriodicPair, n_max: u32, radius_factor: f64, opts: &GateOptions) -> Result<PoleScan> {
    if n_max < 1 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let omega = pair.lattice_omega();
    if pair.is_zero() {
        return Ok(PoleScan { upper: Vec::new(), real: Vec::new(), real_pass: true });
    }
    let upper = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let k = lattice::upper(n, omega);
            Ok(PoleCandidate { n, k, residue: residue_2stage(pair, k, radius_factor, opts, 0)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut real_pts = vec![(0u32, C::new(0.0, 0.0))];
    for n in 1..=n_max {
        let k = lattice::point(n as i64, omega);
        real_pts.push((n, k));
        real_pts.push((n, -k));
    }
    let real = real_pts
        .par_iter()
        .map(|&(n, k)| {
            let mut residue = residue_2stage(pair, k, radius_factor, opts, 0)?;
            if n == 0 {
                // G has a fourth-order zero at k = 0; a double pole has no
                // residue but shows in the first moment
                let m1 = residue_2stage(pair, k, radius_factor, opts, 1)?;
                if m1.norm() > residue.norm() {
                    residue = m1;
                }
            }
            Ok(PoleCandidate { n, k, residue })
        })
        .collect::<Result<Vec<_>>>()?;
    let real_pass = real.iter().all(|c| c.residue.norm() <= opts.residue_tol);
    Ok(PoleScan { upper, real, real_pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinitePoles {
    pub pass: bool,
    /// Largest lattice index with a residue above tolerance (0 if none).
    pub n0: u32,
}

/// Passes when every residue beyond some N0 <= n_max/2 is below `tol`.
pub fn check_finite_poles(residues: &[(u32, C)], n_max: u32, tol: f64) -> Result<FinitePoles> {
    let n0 = residues.iter().filter(|(_, r)| r.norm() > tol).map(|(n, _)| *n).max().unwrap_or(0);
    if n0 <= n_max / 2 {
        Ok(FinitePoles { pass: true, n0 })
    } else {
        Err(Error::Inconclusive(format!(
            "residues above {tol:e} persist up to n = {n0} of n_max = {n_max}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Rejection {
    /// Odd-order zero of G (a branch point) near the given points.
    Smoothness(Vec<C>),
    /// Q^b is not analytic in the upper half-plane.
    QbPole([C; 3]),
    /// sup |Q^b| on the real line is not below 1.
    A3 { sup: f64, argmax: f64 },
    /// P^b does not decay like -conj(g0(0)) / (2ik).
    Decay,
    /// P^b has a pole on the real line.
    RealPole(C),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    Admissible,
    Rejected(Rejection),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub smoothness_pass: Option<bool>,
    pub qb_analytic_pass: Option<bool>,
    pub sup_qb_on_r: Option<f64>,
    pub a3_pass: Option<bool>,
    pub decay_pass: Option<bool>,
    pub real_poles_pass: Option<bool>,
    /// Upper lattice poles of P^b with their residues.
    pub pole_candidates: Vec<PoleCandidate>,
    pub finite_poles_pass: Option<bool>,
    pub n0: Option<u32>,
    pub verdict: Verdict,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }

    /// (k_j, residue of P^b) for the retained poles.
    pub fn pb_poles(&self) -> Vec<(C, C)> {
        self.pole_candidates.iter().map(|c| (c.k, c.residue)).collect()
    }
}

/// Runs the gates in order and stops at the first failure. Gates not run
/// are reported as None.
pub fn verdict(pair: &PeriodicPair, opts: &GateOptions) -> Result<AdmissibilityReport> {
    let mut rep = AdmissibilityReport {
        smoothness_pass: None,
        qb_analytic_pass: None,
        sup_qb_on_r: None,
        a3_pass: None,
        decay_pass: None,
        real_poles_pass: None,
        pole_candidates: Vec::new(),
        finite_poles_pass: None,
        n0: None,
        verdict: Verdict::Admissible,
    };
    if pair.is_zero() {
        rep.smoothness_pass = Some(true);
        rep.qb_analytic_pass = Some(true);
        rep.sup_qb_on_r = Some(0.0);
        rep.a3_pass = Some(true);
        rep.decay_pass = Some(true);
        rep.real_poles_pass = Some(true);
        rep.finite_poles_pass = Some(true);
        rep.n0 = Some(0);
        return Ok(rep);
    }
    let s = check_smoothness(pair, opts)?;
    rep.smoothness_pass = Some(s.pass);
    if !s.pass {
        rep.verdict = Verdict::Rejected(Rejection::Smoothness(s.odd_zeros));
        return Ok(rep);
    }
    let q = check_qb_poles(pair, opts)?;
    rep.qb_analytic_pass = Some(q.pass);
    if !q.pass {
        rep.verdict = Verdict::Rejected(Rejection::QbPole(q.moments));
        return Ok(rep);
    }
    let a3 = check_a3(pair, opts)?;
    rep.sup_qb_on_r = Some(a3.sup);
    rep.a3_pass = Some(a3.pass);
    if !a3.pass {
        rep.verdict = Verdict::Rejected(Rejection::A3 { sup: a3.sup, argmax: a3.argmax });
        return Ok(rep);
    }
    let d = check_decay(pair, opts)?;
    rep.decay_pass = Some(d.pass);
    if !d.pass {
        rep.verdict = Verdict::Rejected(Rejection::Decay);
        return Ok(rep);
    }
    let scan = locate_poles(pair, opts.n_max, opts.radius_factor, opts)?;
    rep.real_poles_pass = Some(scan.real_pass);
    if !scan.real_pass {
        let worst = scan.real.iter().max_by(|a, b| a.residue.norm().total_cmp(&b.residue.norm())).map(|c| c.k);
        rep.verdict = Verdict::Rejected(Rejection::RealPole(worst.unwrap_or_default()));
        return Ok(rep);
    }
    let residues: Vec<(u32, C)> = scan.upper.iter().map(|c| (c.n, c.residue)).collect();
    let fin = check_finite_poles(&residues, opts.n_max, opts.residue_tol)?;
    rep.finite_poles_pass = Some(fin.pass);
    rep.n0 = Some(fin.n0);
    rep.pole_candidates = scan.poles(opts.residue_tol);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::FamilyD;

    #[test]
    fn a3_closed_form_examples() {
        let d = FamilyD::new(1.0, 1.0).unwrap();
        let r = check_a3_with(|x| Ok(d.qb(C::from(x))), 8.0, 0.05, 1e-6).unwrap();
        assert!((r.sup - 1.0 / 2f64.sqrt()).abs() < 1e-12 && r.pass);
        // omega = 0 edge of the family: |Q(0)| = 1
        let q = |x: f64| Ok(-I / (2.0 * x + I));
        let r = check_a3_with(q, 8.0, 0.05, 1e-6).unwrap();
        assert!(!r.pass && (r.sup - 1.0).abs() < 1e-12);
        let r = check_a3_with(|_| Ok(C::new(0.0, 0.0)), 8.0, 0.05, 1e-6).unwrap();
        assert!(r.pass && r.sup == 0.0);
    }

    #[test]
    fn finite_pole_rule() {
        let r = vec![(1, C::from(0.5)), (2, C::from(1e-12)), (3, C::from(0.0))];
        assert_eq!(check_finite_poles(&r, 32, 1e-7).unwrap(), FinitePoles { pass: true, n0: 1 });
        assert_eq!(check_finite_poles(&[], 32, 1e-7).unwrap().n0, 0);
        let all: Vec<(u32, C)> = (1..=32).map(|n| (n, C::from(1.0 / n as f64))).collect();
        assert!(matches!(check_finite_poles(&all, 32, 1e-7), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn family_d_residue_at_k1() {
        let pair = PeriodicPair::family_d(1.0, 1.0).unwrap();
        let d = FamilyD::new(1.0, 1.0).unwrap();
        let opts = GateOptions::default();
        let r = residue_at(&pair, d.k1(), 0.25, opts.tol, 0, 64).unwrap();
        assert!((r - d.pb_residue()).norm() < 1e-8, "{r}");
        let r2 = residue_at(&pair, d.k1(), 0.125, opts.tol, 0, 64).unwrap();
        assert!((r - r2).norm() < 1e-8);
        let r = residue_at(&pair, lattice::upper(2, 1.0), 0.25, opts.tol, 0, 64).unwrap();
        assert!(r.norm() < 1e-8);
    }

    #[test]
    fn smoothness_scan_on_admissible_and_family_c() {
        let opts = GateOptions::default();
        let pair = PeriodicPair::family_d(1.0, 1.0).unwrap();
        assert!(check_smoothness(&pair, &opts).unwrap().pass);
        let c = PeriodicPair::exponential(1.0, -4.0, C::new(0.0, 2f64.sqrt())).unwrap();
        let s = check_smoothness(&c, &opts).unwrap();
        assert!(!s.pass);
    }

    #[test]
    fn qb_pole_detected_for_plus_sign() {
        let opts = GateOptions::default();
        let plus = PeriodicPair::exponential(1.0, 1.0, C::from(2f64.sqrt())).unwrap();
        let r = check_qb_poles(&plus, &opts).unwrap();
        assert!(!r.pass);
        // residue of -i/(2k - i sqrt 2) at i/sqrt 2 is -i/2
        assert!((r.moments[0] + I / 2.0).norm() < 1e-6, "{:?}", r.moments);
        let minus = PeriodicPair::family_d(1.0, 1.0).unwrap();
        assert!(check_qb_poles(&minus, &opts).unwrap().pass);
    }

    #[test]
    fn decay_leading_coefficient() {
        let opts = GateOptions::default();
        let pair = PeriodicPair::family_d(1.0, 1.0).unwrap();
        let d = check_decay(&pair, &opts).unwrap();
        assert!(d.pass, "{d:?}");
        assert!((d.expected - I / 2.0).norm() < 1e-15);
    }
}
