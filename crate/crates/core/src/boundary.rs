//! Smooth tau-periodic boundary pairs {g0(t), g1(t)}.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One Fourier mode `coeff * exp(2 pi i n t / tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub n: i64,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairKind {
    /// {alpha e^{i omega t}, c e^{i omega t}}
    Exponential { alpha: f64, omega: f64, c: Complex64 },
    /// Truncated Fourier series for both components.
    Fourier { g0: Vec<Mode>, g1: Vec<Mode> },
}

/// A boundary pair of period `tau`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPair {
    kind: PairKind,
    tau: f64,
}

impl PeriodicPair {
    pub fn exponential(alpha: f64, omega: f64, c: Complex64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::InvalidInput("omega must be a nonzero finite frequency".into()));
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidInput("c must be finite".into()));
        }
        Ok(Self {
            kind: PairKind::Exponential { alpha, omega, c },
            tau: 2.0 * PI / omega.abs(),
        })
    }

    /// The admissible single-exponential pair with c = -alpha sqrt(omega + alpha^2).
    pub fn family_d(alpha: f64, omega: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(omega > 0.0) {
            return Err(Error::InvalidInput(format!(
                "family D needs alpha > 0 and omega > 0, got ({alpha}, {omega})"
            )));
        }
        Self::exponential(alpha, omega, Complex64::new(-alpha * (omega + alpha * alpha).sqrt(), 0.0))
    }

    pub fn fourier(tau: f64, g0: Vec<Mode>, g1: Vec<Mode>) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { kind: PairKind::Fourier { g0, g1 }, tau })
    }

    pub fn zero(tau: f64) -> Result<Self> {
        Self::fourier(tau, Vec::new(), Vec::new())
    }

    /// Fourier pair from samples of two tau-periodic functions, dropping
    /// modes with modulus below `cutoff`.
    pub fn from_samples<F>(tau: f64, samples: usize, cutoff: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> (Complex64, Complex64),
    {
        if samples < 4 {
            return Err(Error::InvalidInput("need at least 4 samples".into()));
        }
        let values: Vec<(Complex64, Complex64)> =
            (0..samples).map(|j| f(tau * j as f64 / samples as f64)).collect();
        let half = samples as i64 / 2;
        let mut g0 = Vec::new();
        let mut g1 = Vec::new();
        for n in (-half + 1)..half {
            let mut c0 = Complex64::new(0.0, 0.0);
            let mut c1 = Complex64::new(0.0, 0.0);
            for (j, (v0, v1)) in values.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -2.0 * PI * (n * j as i64).rem_euclid(samples as i64) as f64 / samples as f64);
                c0 += v0 * phase;
                c1 += v1 * phase;
            }
            c0 /= samples as f64;
            c1 /= samples as f64;
            if c0.norm() > cutoff {
                g0.push(Mode { n, coeff: c0 });
            }
            if c1.norm() > cutoff {
                g1.push(Mode { n, coeff: c1 });
            }
        }
        Self::fourier(tau, g0, g1)
    }

    pub fn kind(&self) -> &PairKind {
        &self.kind
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// 2 pi / tau. The zeros of sin(2 k^2 tau) are k^2 = n * lattice_omega / 4.
    pub fn lattice_omega(&self) -> f64 {
        2.0 * PI / self.tau
    }

    /// (g0(t), g1(t)). The phase is reduced modulo tau first.
    pub fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let tr = t.rem_euclid(self.tau);
        match &self.kind {
            PairKind::Exponential { alpha, omega, c } => {
                let e = Complex64::from_polar(1.0, omega * tr);
                (e * alpha, e * c)
            }
            PairKind::Fourier { g0, g1 } => {
                let theta = 2.0 * PI * tr / self.tau;
                (sum_modes(g0, theta), sum_modes(g1, theta))
            }
        }
    }

    pub fn g0_at_zero(&self) -> Complex64 {
        self.eval(0.0).0
    }

    pub fn g1_at_zero(&self) -> Complex64 {
        self.eval(0.0).1
    }

    /// eta_1(t) = int_0^t Im(conj(g0) g1) dt'.
    pub fn eta1(&self, t: f64) -> f64 {
        let rule = GaussLegendre::new(32);
        let panels = ((t.abs() / self.tau).ceil() as usize * 8).max(8);
        let width = t / panels as f64;
        (0..panels)
            .map(|p| {
                let a = p as f64 * width;
                rule.integrate(a, a + width, |s| {
                    let (g0, g1) = self.eval(s);
                    (g0.conj() * g1).im
                })
            })
            .sum()
    }

    /// Rough size of the data, used to scale search regions in k.
    pub fn magnitude(&self) -> (f64, f64) {
        match &self.kind {
            PairKind::Exponential { alpha, c, .. } => (*alpha, c.norm()),
            PairKind::Fourier { g0, g1 } => (
                g0.iter().map(|m| m.coeff.norm()).sum(),
                g1.iter().map(|m| m.coeff.norm()).sum(),
            ),
        }
    }

    pub fn is_zero(&self) -> bool {
        let (a, b) = self.magnitude();
        a == 0.0 && b == 0.0
    }
}

fn sum_modes(modes: &[Mode], theta: f64) -> Complex64 {
    modes
        .iter()
        .map(|m| m.coeff * Complex64::from_polar(1.0, m.n as f64 * theta))
        .sum()
}

/// JSON form of a pair:
/// `{"type":"exponential","alpha":..,"omega":..,"c":[re,im]}` or
/// `{"type":"fourier","tau":..,"g0":[[n,re,im],..],"g1":[[n,re,im],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PairSpec {
    Exponential { alpha: f64, omega: f64, c: [f64; 2] },
    Fourier { tau: f64, g0: Vec<(i64, f64, f64)>, g1: Vec<(i64, f64, f64)> },
}

impl TryFrom<PairSpec> for PeriodicPair {
    type Error = Error;

    fn try_from(spec: PairSpec) -> Result<Self> {
        match spec {
            PairSpec::Exponential { alpha, omega, c } => {
                PeriodicPair::exponential(alpha, omega, Complex64::new(c[0], c[1]))
            }
            PairSpec::Fourier { tau, g0, g1 } => {
                let conv = |v: Vec<(i64, f64, f64)>| {
                    v.into_iter()
                        .map(|(n, re, im)| Mode { n, coeff: Complex64::new(re, im) })
                        .collect()
                };
                PeriodicPair::fourier(tau, conv(g0), conv(g1))
            }
        }
    }
}

impl From<&PeriodicPair> for PairSpec {
    fn from(pair: &PeriodicPair) -> Self {
        match &pair.kind {
            PairKind::Exponential { alpha, omega, c } => PairSpec::Exponential {
                alpha: *alpha,
                omega: *omega,
                c: [c.re, c.im],
            },
            PairKind::Fourier { g0, g1 } => {
                let conv = |v: &[Mode]| v.iter().map(|m| (m.n, m.coeff.re, m.coeff.im)).collect();
                PairSpec::Fourier { tau: pair.tau, g0: conv(g0), g1: conv(g1) }
            }
        }
    }
}

impl Serialize for PeriodicPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodicPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = PairSpec::deserialize(d)?;
        PeriodicPair::try_from(spec).map_err(serde::de::Error::custom)
    }
}
