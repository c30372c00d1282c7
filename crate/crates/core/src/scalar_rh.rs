//! Scalar functions a(k), b(k), h(k) built from Q^b and P^b through the
//! Cauchy transform (Cf)(k) = (1/2 pi i) int_R f(s)/(s - k) ds.
//!
//! f is sampled on Gauss-Legendre panels over [-S, S]. On each panel it is
//! represented by its Legendre series, so evaluation points close to the
//! real line (and boundary values on it) are handled by exact product
//! integration instead of a nearly singular quadrature. The tails |s| > S
//! are integrated after the substitution s = S/u.

use crate::boundary::PeriodicPair;
use crate::error::{Error, Result};
use crate::lattice;
use crate::quadrature::GaussLegendre;
use crate::spectral::{self, Function};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

const I: C = C::new(0.0, 1.0);
const NODES: usize = 16;
const FINE: usize = 64;
const TAIL_NODES: usize = 48;
/// Monodromy tolerance for the Q^b samples; a(k) is insensitive below this.
pub const SCALAR_TOL: f64 = 1e-9;

pub type RealFn = Arc<dyn Fn(f64) -> C + Send + Sync>;

/// Behaviour of f beyond the sampled interval.
#[derive(Clone)]
pub enum Tail {
    /// f is treated as zero outside [-S, S].
    Zero,
    /// f is known in closed form everywhere.
    Exact(RealFn),
    /// f(s) = sum_m c_m s^{-m}, m = 2, 3, ..., separately for s > S and s < -S.
    Series { pos: Vec<C>, neg: Vec<C> },
}

impl std::fmt::Debug for Tail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tail::Zero => write!(f, "Zero"),
            Tail::Exact(_) => write!(f, "Exact"),
            Tail::Series { pos, neg } => write!(f, "Series {{ pos: {pos:?}, neg: {neg:?} }}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Panel {
    mid: f64,
    half: f64,
    /// Legendre coefficients of f(mid + half u) on [-1, 1].
    coeffs: Vec<C>,
}

fn legendre_all(u: f64, n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    p[0] = 1.0;
    if n > 1 {
        p[1] = u;
    }
    for j in 1..n.saturating_sub(1) {
        p[j + 1] = ((2 * j + 1) as f64 * u * p[j] - j as f64 * p[j - 1]) / (j + 1) as f64;
    }
    p
}

/// int_{-1}^{1} P_n(u) / (u - z) du for n < count, by forward recurrence.
/// Real z inside (-1, 1) gives the limit from the upper half-plane. At a
/// real endpoint the divergent log is replaced by log(1/half); the
/// neighbouring panel carries the opposite term, so the sum is exact.
fn legendre_cauchy(z: C, count: usize, half: f64) -> Vec<C> {
    let mut r = vec![C::new(0.0, 0.0); count];
    // log(1 - z) - log(-1 - z) with the upper-side branch for real z
    let (zp, zm) = if z.im == 0.0 {
        (C::new(1.0 - z.re, -0.0), C::new(-1.0 - z.re, -0.0))
    } else {
        (1.0 - z, -1.0 - z)
    };
    let log_or = |w: C| if w.norm() == 0.0 { C::from(-half.ln()) } else { w.ln() };
    r[0] = log_or(zp) - log_or(zm);
    if count > 1 {
        r[1] = 2.0 + z * r[0];
    }
    for n in 1..count.saturating_sub(1) {
        r[n + 1] = ((2 * n + 1) as f64 * z * r[n] - n as f64 * r[n - 1]) / (n + 1) as f64;
    }
    r
}

/// Bernstein-ellipse parameter of z relative to [-1, 1].
fn rho(z: C) -> f64 {
    let w = z + (z - 1.0).sqrt() * (z + 1.0).sqrt();
    w.norm().max(1.0 / w.norm())
}

/// Cauchy transform of a sampled function on the real line.
#[derive(Debug, Clone)]
pub struct CauchyTransform {
    panels: Vec<Panel>,
    /// End of the sampled interval (0 until a tail is installed).
    inner: f64,
    s_max: f64,
    tail: Tail,
    delta: f64,
    rule: GaussLegendre,
    fine: GaussLegendre,
    tail_rule: GaussLegendre,
}

/// Breakpoints 0, +-0.25, ..., +-2, then widening panels up to +-s_max.
pub fn default_breakpoints(s_max: f64) -> Vec<f64> {
    let mut pos: Vec<f64> = (0..=8).map(|j| j as f64 * 0.25).collect();
    let mut x = 2.0;
    while x < s_max - 1e-12 {
        let w = (0.25 * x).clamp(0.5, 2.0);
        x = (x + w).min(s_max);
        pos.push(x);
    }
    let mut all: Vec<f64> = pos.iter().rev().map(|v| -v).collect();
    all.pop();
    all.extend(pos);
    all
}

impl CauchyTransform {
    /// Samples `f` on panels with the given breakpoints (ascending).
    pub fn new<F>(f: F, breakpoints: &[f64], tail: Tail, delta: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<C> + Sync,
    {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        let rule = GaussLegendre::new(NODES);
        let pts: Vec<(usize, f64)> = breakpoints
            .windows(2)
            .enumerate()
            .flat_map(|(p, w)| {
                let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                rule.nodes.iter().map(move |u| (p, mid + half * u)).collect::<Vec<_>>()
            })
            .collect();
        let vals = pts.par_iter().map(|&(_, s)| f(s)).collect::<Result<Vec<C>>>()?;
        let panels = breakpoints
            .windows(2)
            .enumerate()
            .map(|(p, w)| {
                let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                let v = &vals[p * NODES..(p + 1) * NODES];
                let mut coeffs = vec![C::new(0.0, 0.0); NODES];
                for (i, (&u, &wt)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    for (n, pn) in legendre_all(u, NODES).into_iter().enumerate() {
                        coeffs[n] += v[i] * (wt * pn * (2 * n + 1) as f64 / 2.0);
                    }
                }
                Panel { mid, half, coeffs }
            })
            .collect();
        let s_max = breakpoints[breakpoints.len() - 1].max(-breakpoints[0]);
        let ct = Self {
            panels,
            inner: 0.0,
            s_max,
            tail: Tail::Zero,
            delta,
            rule,
            fine: GaussLegendre::new(FINE),
            tail_rule: GaussLegendre::new(TAIL_NODES),
        };
        Ok(ct.with_tail(tail))
    }

    fn panel_from(&self, a: f64, b: f64, f: impl Fn(f64) -> C) -> Panel {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut coeffs = vec![C::new(0.0, 0.0); NODES];
        for (&u, &wt) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let v = f(mid + half * u);
            for (n, pn) in legendre_all(u, NODES).into_iter().enumerate() {
                coeffs[n] += v * (wt * pn * (2 * n + 1) as f64 / 2.0);
            }
        }
        Panel { mid, half, coeffs }
    }

    /// Samples of f at the panel nodes as (s, f(s)), for diagnostics and fits.
    pub fn samples(&self) -> Vec<(f64, C)> {
        let mut out = Vec::new();
        for p in self.panels.iter().filter(|p| p.mid.abs() < self.inner_max()) {
            for &u in &self.rule.nodes {
                out.push((p.mid + p.half * u, p.value(u)));
            }
        }
        out
    }

    /// Installs the tail model. The model is also laid out on panels out to
    /// |s| = max(4S, 64), so evaluation points with |Re k| beyond the sampled
    /// interval still get product integration near the real line.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        let inner: Vec<Panel> = self
            .panels
            .iter()
            .filter(|p| p.mid.abs() < self.inner_max())
            .cloned()
            .collect();
        let s0 = inner.iter().map(|p| p.mid.abs() + p.half).fold(0.0, f64::max);
        self.panels = inner;
        self.s_max = s0;
        self.tail = tail;
        if matches!(self.tail, Tail::Zero) {
            return self;
        }
        let far = (4.0 * s0).max(64.0);
        let mut edges = vec![s0];
        let mut x = s0;
        while x < far - 1e-9 {
            x = (x + (0.25 * x).clamp(0.5, 8.0)).min(far);
            edges.push(x);
        }
        let mut extra = Vec::new();
        for w in edges.windows(2) {
            extra.push(self.panel_from(w[0], w[1], |s| self.tail_value(s)));
            extra.push(self.panel_from(-w[1], -w[0], |s| self.tail_value(s)));
        }
        self.panels.extend(extra);
        self.inner = s0;
        self.s_max = far;
        self
    }

    fn inner_max(&self) -> f64 {
        if self.inner > 0.0 {
            self.inner
        } else {
            f64::INFINITY
        }
    }

    /// Interpolated f(s) for |s| <= S, tail model beyond.
    pub fn f(&self, s: f64) -> C {
        if s.abs() > self.s_max {
            return self.tail_value(s);
        }
        for p in &self.panels {
            if (s - p.mid).abs() <= p.half * (1.0 + 1e-12) {
                return p.value((s - p.mid) / p.half);
            }
        }
        C::new(0.0, 0.0)
    }

    fn tail_value(&self, s: f64) -> C {
        match &self.tail {
            Tail::Zero => C::new(0.0, 0.0),
            Tail::Exact(f) => f(s),
            Tail::Series { pos, neg } => {
                let c = if s > 0.0 { pos } else { neg };
                c.iter().enumerate().map(|(j, cm)| cm * s.powi(-(j as i32 + 2))).sum()
            }
        }
    }

    /// (1/2 pi i) int f(s) / (s - k) ds for |Im k| >= delta.
    pub fn eval(&self, k: C) -> Result<C> {
        if k.im.abs() < self.delta {
            return Err(Error::TooCloseToContour { k, delta: self.delta });
        }
        Ok(self.integral(k) / (2.0 * PI * I))
    }

    /// Boundary value from the upper half-plane at real x.
    pub fn boundary_plus(&self, x: f64) -> C {
        let mut x = x;
        // interior breakpoints are handled exactly; the outer ends are not
        if (x.abs() - self.s_max).abs() < 1e-10 * self.s_max {
            x -= 1e-9 * self.s_max * x.signum();
        }
        for p in &self.panels {
            for e in [p.mid - p.half, p.mid + p.half] {
                if (x - e).abs() < 1e-13 * (1.0 + e.abs()) {
                    x = e;
                }
            }
        }
        self.integral(C::new(x, 0.0)) / (2.0 * PI * I)
    }

    fn integral(&self, k: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for p in &self.panels {
            let z = (k - p.mid) / p.half;
            let r = rho(z);
            if r <= 1.5 {
                let z = if k.im == 0.0 {
                    let u = (k.re - p.mid) / p.half;
                    C::new(if (u.abs() - 1.0).abs() < 1e-12 { u.signum() } else { u }, 0.0)
                } else {
                    z
                };
                let q = legendre_cauchy(z, NODES, p.half);
                acc += p.coeffs.iter().zip(&q).map(|(c, q)| c * q).sum::<C>();
            } else {
                let rule = if r <= 8.0 { &self.fine } else { &self.rule };
                for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
                    acc += w * p.value(u) / (u - z);
                }
            }
        }
        acc + self.tail_integral(k)
    }

    fn tail_integral(&self, k: C) -> C {
        if matches!(self.tail, Tail::Zero) {
            return C::new(0.0, 0.0);
        }
        let s = self.s_max;
        let mut acc = C::new(0.0, 0.0);
        for (&v, &w) in self.tail_rule.nodes.iter().zip(&self.tail_rule.weights) {
            let u = 0.5 * (v + 1.0);
            let w = 0.5 * w;
            acc += w * self.tail_value(s / u) * s / (u * (s - k * u));
            acc -= w * self.tail_value(-s / u) * s / (u * (s + k * u));
        }
        acc
    }
}

impl Panel {
    fn value(&self, u: f64) -> C {
        self.coeffs
            .iter()
            .zip(legendre_all(u, NODES))
            .map(|(c, p)| c * p)
            .sum()
    }
}

/// Least-squares fit of f(s) = lead s^{-2} + sum_{m=3}^{3+extra-1} c_m s^{-m}
/// on the given samples. Returns [lead, c_3, ...].
pub fn fit_tail(samples: &[(f64, C)], lead: Option<C>, extra: usize) -> Vec<C> {
    let first = if lead.is_some() { 3 } else { 2 };
    let cols = extra + if lead.is_some() { 0 } else { 1 };
    let n = samples.len();
    // columns scaled by s_ref^m to keep the system well conditioned
    let s_ref = samples.iter().map(|(s, _)| s.abs()).fold(0.0, f64::max);
    let a = DMatrix::from_fn(n, cols, |i, j| (s_ref / samples[i].0.abs()).powi((first + j) as i32) * samples[i].0.signum().powi((first + j) as i32));
    let resid = |i: usize| match lead {
        Some(l) => samples[i].1 - l * samples[i].0.powi(-2),
        None => samples[i].1,
    };
    let svd = a.svd(true, true);
    let solve = |part: fn(C) -> f64| -> DVector<f64> {
        let b = DVector::from_fn(n, |i, _| part(resid(i)));
        svd.solve(&b, 1e-14).expect("svd with both factors")
    };
    let re = solve(|z| z.re);
    let im = solve(|z| z.im);
    let mut out = Vec::new();
    if let Some(l) = lead {
        out.push(l);
    }
    for j in 0..cols {
        let scale = s_ref.powi((first + j) as i32);
        out.push(C::new(re[j], im[j]) * scale);
    }
    out
}

/// Poles k_j of h in the upper half-plane and the residues h_j.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleData {
    pub omega: f64,
    pub poles: Vec<C>,
    pub residues: Vec<C>,
}

impl PoleData {
    /// Checks that poles are distinct, in the upper half-plane and on the
    /// lattice i sqrt(n omega)/2.
    pub fn new(omega: f64, poles: Vec<C>, residues: Vec<C>) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
        }
        if poles.len() != residues.len() {
            return Err(Error::InvalidInput("poles and residues differ in length".into()));
        }
        for &k in &poles {
            let n = 4.0 * k.norm_sqr() / omega;
            if !(k.im > 0.0) || k.re.abs() > 1e-12 * k.norm() || (n - n.round()).abs() > 1e-8 * n.max(1.0) || n.round() < 1.0 {
                return Err(Error::InvalidInput(format!(
                    "pole {k} is not of the form i sqrt(n omega)/2 with omega = {omega}"
                )));
            }
        }
        let thresh = 1e-8 * omega.sqrt();
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                if (poles[i] - poles[j]).norm() < thresh {
                    return Err(Error::CoincidentPoles(poles[i], poles[j]));
                }
            }
        }
        Ok(Self { omega, poles, residues })
    }

    pub fn empty(omega: f64) -> Self {
        Self { omega, poles: Vec::new(), residues: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Lattice index n of each pole.
    pub fn lattice_indices(&self) -> Vec<u32> {
        self.poles.iter().map(|k| (4.0 * k.norm_sqr() / self.omega).round() as u32).collect()
    }

    /// Period in t of the dressed solution, 2 pi / omega.
    pub fn tau(&self) -> f64 {
        2.0 * PI / self.omega
    }
}

#[derive(Serialize, Deserialize)]
struct PoleDataJson {
    omega: f64,
    poles: Vec<[f64; 2]>,
    residues: Vec<[f64; 2]>,
}

impl Serialize for PoleData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoleDataJson {
            omega: self.omega,
            poles: self.poles.iter().map(|k| [k.re, k.im]).collect(),
            residues: self.residues.iter().map(|h| [h.re, h.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PoleData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PoleDataJson::deserialize(d)?;
        let conv = |v: Vec<[f64; 2]>| v.into_iter().map(|p| C::new(p[0], p[1])).collect();
        PoleData::new(j.omega, conv(j.poles), conv(j.residues)).map_err(serde::de::Error::custom)
    }
}

type ComplexFn = Arc<dyn Fn(C) -> Result<C> + Send + Sync>;

/// a, b and h for one pair.
#[derive(Clone)]
pub struct ScalarFunctions {
    log_transform: CauchyTransform,
    q: ComplexFn,
    p: ComplexFn,
    delta: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ScalarOptions {
    /// Sampling half-width S for Q^b from the monodromy.
    pub s_max: f64,
    pub tol: f64,
    /// Minimum distance from the real line for interior evaluations.
    pub delta: f64,
}

impl ScalarOptions {
    /// S grows with |g0| so the tail series is used only where it
    /// converges quickly.
    pub fn for_pair(pair: &PeriodicPair) -> Self {
        let s_max = 8f64.max(6.0 * pair.magnitude().0);
        Self { s_max, tol: SCALAR_TOL, delta: 1e-3 * pair.lattice_omega().sqrt() }
    }
}

impl ScalarFunctions {
    /// Builds a(k) from Q^b sampled through the monodromy on [-S, S]; the
    /// tails use the 1/s^2 law with the known leading coefficient plus a
    /// fitted correction.
    pub fn from_pair(pair: &PeriodicPair, opts: ScalarOptions) -> Result<Self> {
        let pair_q = pair.clone();
        let tol = opts.tol;
        let f = move |s: f64| -> Result<C> {
            let q = spectral::value(&pair_q, Function::Qb, C::from(s), tol)?;
            log1m(q.norm_sqr(), s)
        };
        let bp = default_breakpoints(opts.s_max);
        let ct = CauchyTransform::new(f, &bp, Tail::Zero, opts.delta)?;
        let lead = C::from(-pair.g0_at_zero().norm_sqr() / 4.0);
        let samples = ct.samples();
        let side = |sign: f64| -> Vec<(f64, C)> {
            samples
                .iter()
                .copied()
                .filter(|(s, _)| s * sign >= opts.s_max / 2.0)
                .collect()
        };
        let tail = Tail::Series { pos: fit_tail(&side(1.0), Some(lead), 4), neg: fit_tail(&side(-1.0), Some(lead), 4) };
        let ct = ct.with_tail(tail);
        let (pq, pp) = (pair.clone(), pair.clone());
        Ok(Self {
            log_transform: ct,
            q: Arc::new(move |k| spectral::value(&pq, Function::Qb, k, tol)),
            p: Arc::new(move |k| spectral::value(&pp, Function::Pb, k, tol)),
            delta: opts.delta,
        })
    }

    /// Builds the scalar functions from closed forms of Q^b and P^b.
    pub fn from_closed_form<Q, P>(q: Q, p: P, delta: f64) -> Result<Self>
    where
        Q: Fn(C) -> C + Send + Sync + 'static,
        P: Fn(C) -> C + Send + Sync + 'static,
    {
        let q = Arc::new(q);
        let qf = q.clone();
        let f = move |s: f64| log1m(qf(C::from(s)).norm_sqr(), s);
        let qt = q.clone();
        let tail = Tail::Exact(Arc::new(move |s| log1m(qt(C::from(s)).norm_sqr(), s).unwrap_or(C::new(f64::NAN, 0.0))));
        let ct = CauchyTransform::new(f, &default_breakpoints(16.0), tail, delta)?;
        Ok(Self {
            log_transform: ct,
            q: Arc::new(move |k| Ok(q(k))),
            p: Arc::new(move |k| Ok(p(k))),
            delta,
        })
    }

    /// a(k) = exp(-C[log(1 - |Q^b|^2)](k)), Im k >= delta.
    pub fn a(&self, k: C) -> Result<C> {
        if k.im < self.delta {
            return Err(Error::TooCloseToContour { k, delta: self.delta });
        }
        Ok((-self.log_transform.eval(k)?).exp())
    }

    /// Boundary value of a on the real line.
    pub fn a_boundary(&self, x: f64) -> C {
        (-self.log_transform.boundary_plus(x)).exp()
    }

    /// b = Q^b a.
    pub fn b(&self, k: C) -> Result<C> {
        Ok((self.q)(k)? * self.a(k)?)
    }

    pub fn b_boundary(&self, x: f64) -> Result<C> {
        Ok((self.q)(C::from(x))? * self.a_boundary(x))
    }

    /// h = -P^b / a^2.
    pub fn h(&self, k: C) -> Result<C> {
        let a = self.a(k)?;
        Ok(-(self.p)(k)? / (a * a))
    }

    /// h on the real line, -P^b / a^2 from boundary values.
    pub fn h_boundary(&self, x: f64) -> Result<C> {
        let a = self.a_boundary(x);
        Ok(-(self.p)(C::from(x))? / (a * a))
    }

    pub fn qb(&self, k: C) -> Result<C> {
        (self.q)(k)
    }

    pub fn log_transform(&self) -> &CauchyTransform {
        &self.log_transform
    }

    /// h_j = Res P^b(k_j) * (-1 / a(k_j)^2).
    pub fn h_residues(&self, omega: f64, pb_poles: &[(C, C)]) -> Result<PoleData> {
        let mut poles = Vec::new();
        let mut res = Vec::new();
        for &(k, r) in pb_poles {
            let a = self.a(k)?;
            if a.norm() < 1e-8 {
                return Err(Error::PoleOfA { k, modulus: a.norm() });
            }
            poles.push(k);
            res.push(-r / (a * a));
        }
        PoleData::new(omega, poles, res)
    }
}

fn log1m(q2: f64, s: f64) -> Result<C> {
    if !(q2 < 1.0) {
        return Err(Error::GateNotPassed(format!("|Q^b({s})|^2 = {q2} is not below 1")));
    }
    Ok(C::from((-q2).ln_1p()))
}

/// Cauchy transform of a closed-form f at k, for quick checks.
pub fn cauchy_transform<F>(f: F, k: C, delta: f64) -> Result<C>
where
    F: Fn(f64) -> C + Send + Sync + Clone + 'static,
{
    let g = f.clone();
    let ct = CauchyTransform::new(move |s| Ok(g(s)), &default_breakpoints(16.0), Tail::Exact(Arc::new(f)), delta)?;
    ct.eval(k)
}

/// Distance from k to the nearest lattice point of the pair.
pub fn lattice_distance(pair: &PeriodicPair, k: C) -> f64 {
    lattice::distance(k, pair.tau())
}
