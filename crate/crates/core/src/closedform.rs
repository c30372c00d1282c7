//! Closed-form oracles for single-exponential pairs {alpha e^{i omega t}, c e^{i omega t}}:
//! Omega and H, the five parameter families, the admissible family's
//! rational spectral functions and explicit solution, and the two-pole
//! example solution.

use crate::error::{Error, Result};
use num_complex::Complex64 as C;
use serde::Serialize;

const I: C = C::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialTriple {
    pub alpha: f64,
    pub omega: f64,
    pub c: C,
}

impl ExponentialTriple {
    pub fn new(alpha: f64, omega: f64, c: C) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !omega.is_finite() || !c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "need alpha > 0 and finite parameters, got ({alpha}, {omega}, {c})"
            )));
        }
        Ok(Self { alpha, omega, c })
    }

    /// c = -alpha sqrt(omega + alpha^2).
    pub fn family_d_minus(alpha: f64, omega: f64) -> Result<Self> {
        Self::new(alpha, omega, C::from(-alpha * (omega + alpha * alpha).sqrt()))
    }

    pub fn omega_squared(&self, k: C) -> C {
        let (a, w, c) = (self.alpha, self.omega, self.c);
        let k2 = k * k;
        4.0 * k2 * k2 + 2.0 * w * k2 + 4.0 * a * c.im * k + (w / 2.0 + a * a).powi(2) - c.norm_sqr()
    }

    /// (Omega(k), H(k)) with Omega ~ +2k^2 at large real k, continued along the
    /// straight segment from a large real point to k.
    pub fn omega_h(&self, k: C) -> Result<(C, C)> {
        let scale = 1.0 + self.alpha + self.omega.abs().sqrt() + self.c.norm().sqrt();
        let start = C::from(k.norm() + 10.0 * scale);
        let steps = 4000;
        let mut prev = self.omega_squared(start).sqrt();
        if prev.re < 0.0 {
            prev = -prev;
        }
        let floor = 1e-10 * scale.powi(4);
        for j in 1..=steps {
            let z = start + (k - start) * (j as f64 / steps as f64);
            let sq = self.omega_squared(z);
            if sq.norm() < floor {
                return Err(Error::OnBranchCut(k));
            }
            let r = sq.sqrt();
            prev = if (r - prev).norm() <= (r + prev).norm() { r } else { -r };
        }
        let h = prev - 2.0 * k * k - self.alpha * self.alpha - self.omega / 2.0;
        Ok((prev, h))
    }

    /// Q^b = iH / (2 alpha k - i conj(c)).
    pub fn qb(&self, k: C) -> Result<C> {
        let (_, h) = self.omega_h(k)?;
        Ok(I * h / (2.0 * self.alpha * k - I * self.c.conj()))
    }

    /// (A^b)^2 = (2 Omega - H) / (2 Omega).
    pub fn ab2(&self, k: C) -> Result<C> {
        let (om, h) = self.omega_h(k)?;
        Ok((2.0 * om - h) / (2.0 * om))
    }

    /// P^b = (A^b)^2 * (-iH / (2 alpha k + ic)).
    pub fn pb(&self, k: C) -> Result<C> {
        let (om, h) = self.omega_h(k)?;
        Ok((2.0 * om - h) / (2.0 * om) * (-I * h / (2.0 * self.alpha * k + I * self.c)))
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    FamilyA,
    FamilyB,
    FamilyC,
    #[serde(rename = "FamilyD_plus")]
    FamilyDPlus,
    #[serde(rename = "FamilyD_minus")]
    FamilyDMinus,
    FamilyE,
    NoneOfThese,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    EventuallyAdmissible,
    NotAdmissible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub family: Family,
    pub verdict: Verdict,
    /// The (K, c2) parameters when the triple was matched to family B or E.
    pub k_param: Option<f64>,
}

const CLASS_TOL: f64 = 1e-9;

fn close(a: C, b: C) -> bool {
    (a - b).norm() <= CLASS_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Real roots of 4K^3 + omega K + q = 0.
fn cubic_real_roots(omega: f64, q: f64) -> Vec<f64> {
    // depressed cubic K^3 + p K + r = 0
    let p = omega / 4.0;
    let r = q / 4.0;
    let disc = -(4.0 * p * p * p + 27.0 * r * r);
    let mut roots = if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = ((3.0 * r / (p * m)).clamp(-1.0, 1.0)).acos() / 3.0;
        (0..3).map(|j| m * (theta - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos()).collect()
    } else {
        let s = (r * r / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        vec![(-r / 2.0 + s).cbrt() + (-r / 2.0 - s).cbrt()]
    };
    // polish
    for k in roots.iter_mut() {
        for _ in 0..3 {
            let f = 4.0 * *k * *k * *k + omega * *k + q;
            let d = 12.0 * *k * *k + omega;
            if d != 0.0 {
                *k -= f / d;
            }
        }
    }
    roots
}

/// Family membership within tolerance 1e-9, tested in the order D, A, C, B, E.
pub fn classify(t: &ExponentialTriple) -> Classification {
    let (a, w, c) = (t.alpha, t.omega, t.c);
    let done = |family| Classification {
        family,
        verdict: if family == Family::FamilyDMinus && w > 0.0 {
            Verdict::EventuallyAdmissible
        } else {
            Verdict::NotAdmissible
        },
        k_param: None,
    };
    if w + a * a >= -CLASS_TOL {
        let r = a * (w + a * a).max(0.0).sqrt();
        if close(c, C::from(-r)) {
            return done(Family::FamilyDMinus);
        }
        if close(c, C::from(r)) {
            return done(Family::FamilyDPlus);
        }
    }
    if w >= -3.0 * a * a && w < 0.0 {
        let re = ((w + 3.0 * a * a).powi(3) / (27.0 * a * a)).sqrt();
        let im = w.abs().powf(1.5) / (3.0 * 3f64.sqrt() * a);
        if close(c, C::new(re, im)) || close(c, C::new(-re, im)) {
            return done(Family::FamilyA);
        }
    }
    if w < -3.0 * a * a && close(c, C::new(0.0, a * (-2.0 * a * a - w).sqrt())) {
        return done(Family::FamilyC);
    }
    let c2 = c.im;
    if c2 != 0.0 {
        for k in cubic_real_roots(w, a * c2) {
            if !(k > 0.0) {
                continue;
            }
            let rad = (a * a + w / 2.0).powi(2) - c2 * c2 - 2.0 * k * k * (6.0 * k * k + w);
            if rad < -CLASS_TOL * (1.0 + c.norm_sqr()) {
                continue;
            }
            let re = rad.max(0.0).sqrt();
            if !(close(c, C::new(re, c2)) || close(c, C::new(-re, c2))) {
                continue;
            }
            let bound = -(4.0 * k * k + w) / 2.0;
            let slack = CLASS_TOL * (1.0 + k * k);
            let fam = if w > -12.0 * k * k && w < -4.0 * k * k && c2 > 0.0 && c2 <= bound + slack {
                Some(Family::FamilyB)
            } else if w > -4.0 * k * k && w <= -3.0 * k * k + slack && c2 < 0.0 && c2 >= bound - slack {
                Some(Family::FamilyE)
            } else {
                None
            };
            if let Some(f) = fam {
                return Classification { k_param: Some(k), ..done(f) };
            }
        }
    }
    done(Family::NoneOfThese)
}

/// Triple of family B or E from its parameters (K, omega, c2, sign of Re c).
pub fn family_be_triple(k: f64, omega: f64, c2: f64, sign: f64) -> Result<ExponentialTriple> {
    let alpha = -(4.0 * k * k * k + omega * k) / c2;
    let rad = (alpha * alpha + omega / 2.0).powi(2) - c2 * c2 - 2.0 * k * k * (6.0 * k * k + omega);
    if rad < 0.0 {
        return Err(Error::InvalidInput(format!("no real c for K={k}, omega={omega}, c2={c2}")));
    }
    ExponentialTriple::new(alpha, omega, C::new(sign.signum() * rad.sqrt(), c2))
}

/// The admissible family c = -alpha sqrt(omega + alpha^2), omega > 0, in
/// closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyD {
    pub alpha: f64,
    pub omega: f64,
}

impl FamilyD {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(omega > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need alpha > 0 and omega > 0, got ({alpha}, {omega})"
            )));
        }
        Ok(Self { alpha, omega })
    }

    fn s(&self) -> f64 {
        (self.omega + self.alpha * self.alpha).sqrt()
    }

    /// i sqrt(omega) / 2, the only upper pole of P^b.
    pub fn k1(&self) -> C {
        C::new(0.0, self.omega.sqrt() / 2.0)
    }

    /// i sqrt(omega + alpha^2) / 2.
    pub fn k2(&self) -> C {
        C::new(0.0, self.s() / 2.0)
    }

    pub fn c(&self) -> f64 {
        -self.alpha * self.s()
    }

    pub fn qb(&self, k: C) -> C {
        -I * self.alpha / (2.0 * k + I * self.s())
    }

    pub fn pb(&self, k: C) -> C {
        let k1 = self.k1();
        -(self.alpha / (2.0 * I)) * (k + self.k2()) / ((k + k1) * (k - k1))
    }

    pub fn ab2(&self, k: C) -> C {
        let (k1, k2) = (self.k1(), self.k2());
        (k * k - k2 * k2) / (k * k - k1 * k1)
    }

    pub fn a(&self, k: C) -> C {
        (k + self.k2()) / (k + self.k1())
    }

    pub fn b(&self, k: C) -> C {
        self.alpha / (2.0 * I * (k + self.k1()))
    }

    pub fn h(&self, k: C) -> C {
        let k1 = self.k1();
        self.alpha * (k + k1) / (2.0 * I * (k - k1) * (k + self.k2()))
    }

    /// Residue of P^b at k1.
    pub fn pb_residue(&self) -> C {
        let k1 = self.k1();
        -(self.alpha / (2.0 * I)) * (k1 + self.k2()) / (2.0 * k1)
    }

    /// Residue of h at k1: -i alpha sqrt(omega) / (sqrt(omega) + sqrt(alpha^2 + omega)).
    pub fn h1(&self) -> C {
        let r = self.omega.sqrt();
        -I * self.alpha * r / (r + self.s())
    }

    /// The explicit quarter-plane solution.
    pub fn u(&self, x: f64, t: f64) -> C {
        let (a, w) = (self.alpha, self.omega);
        let r = w.sqrt();
        let num = 2.0 * a * r * (self.s() + r) * C::new(x * r, t * w).exp();
        let e2 = (2.0 * x * r).exp();
        num / (a * a * (e2 - 1.0) + 2.0 * r * (self.s() + r) * e2)
    }

    /// Location of the singularity of `u`; always negative.
    pub fn singularity_x(&self) -> f64 {
        singularity_x(self.alpha, self.omega)
    }
}

pub fn u_family_d(alpha: f64, omega: f64, x: f64, t: f64) -> Result<C> {
    Ok(FamilyD::new(alpha, omega)?.u(x, t))
}

/// -log((2 sqrt(omega) sqrt(alpha^2 + omega) + alpha^2 + 2 omega) / alpha^2) / (2 sqrt(omega)).
pub fn singularity_x(alpha: f64, omega: f64) -> f64 {
    let r = omega.sqrt();
    let a2 = alpha * alpha;
    // log1p keeps the large-alpha limit accurate
    -((2.0 * r * (a2 + omega).sqrt() + 2.0 * omega) / a2).ln_1p() / (2.0 * r)
}

/// Numerator and denominator of the two-pole example solution.
pub fn section5_parts(x: f64, t: f64) -> (C, C) {
    let e = |re: f64, im: f64| C::new(re, im).exp();
    let u1 = 72.0
        * e(2.0 * x, 16.0 * t)
        * (C::new(72.0, 72.0) * e(6.0 * x, 12.0 * t) - C::new(2.0, 2.0) * e(2.0 * x, 12.0 * t)
            + 72.0 * I * e(8.0 * x, 0.0)
            - I);
    let u2 = -36.0
        * e(4.0 * x, 0.0)
        * (18.0 * e(4.0 * x, 12.0 * t)
            + C::new(8.0, -8.0) * e(2.0 * x, 24.0 * t)
            + 9.0 * e(0.0, 12.0 * t)
            + C::new(8.0, 8.0) * e(2.0 * x, 0.0))
        + 2592.0 * e(12.0 * x, 12.0 * t)
        + e(0.0, 12.0 * t);
    (u1, u2)
}

/// The two-pole example u1/u2.
pub fn u_section5(x: f64, t: f64) -> Result<C> {
    let (u1, u2) = section5_parts(x, t);
    if u2.norm() < 1e-12 * (1.0 + u1.norm()) {
        return Err(Error::SingularPoint { x, t });
    }
    Ok(u1 / u2)
}

/// Real zeros of u2(x, 0) on [x0, x1], found by a sign scan and bisection.
pub fn section5_singular_abscissae(x0: f64, x1: f64) -> Vec<f64> {
    // at t = 0 the denominator is real
    let f = |x: f64| section5_parts(x, 0.0).1.re;
    bisect_all(f, x0, x1, 4000, 1e-13)
}

/// Sign changes of f on n equal cells of [x0, x1], refined by bisection to xtol.
pub fn bisect_all<F: Fn(f64) -> f64>(f: F, x0: f64, x1: f64, n: usize, xtol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let dx = (x1 - x0) / n as f64;
    let mut a = x0;
    let mut fa = f(a);
    for j in 1..=n {
        let b = x0 + j as f64 * dx;
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > xtol {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    out
}
