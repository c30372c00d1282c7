//! Algebraic dressing: the matrices B_j(x, t) from the pole data of h, the
//! product M-hat, and u = 2i sum_j (B_j)_12.

use crate::error::{Error, Result};
use crate::monodromy::{Mat2, C};
use crate::scalar_rh::PoleData;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

const I: C = C::new(0.0, 1.0);

/// Stage systems with condition number above this are treated as singular.
pub const MAX_COND: f64 = 1e13;

fn coincidence_check(poles: &[C], omega: f64) -> Result<()> {
    let thresh = 1e-8 * omega.sqrt();
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            if (poles[i] - poles[j]).norm() < thresh {
                return Err(Error::CoincidentPoles(poles[i], poles[j]));
            }
        }
    }
    Ok(())
}

/// d_j = -h_j prod_{l != j}(k_j - k_l) / prod_l (k_j - conj k_l) e^{2i(k_j x + 2 k_j^2 t)}.
pub fn d_coeffs(pd: &PoleData, x: f64, t: f64) -> Result<Vec<C>> {
    coincidence_check(&pd.poles, pd.omega)?;
    let ks = &pd.poles;
    Ok(ks
        .iter()
        .zip(&pd.residues)
        .enumerate()
        .map(|(j, (&kj, &hj))| {
            let mut ratio = C::new(1.0, 0.0);
            for (l, &kl) in ks.iter().enumerate() {
                if l != j {
                    ratio *= kj - kl;
                }
                ratio /= kj - kl.conj();
            }
            -hj * ratio * (2.0 * I * (kj * x + 2.0 * kj * kj * t)).exp()
        })
        .collect())
}

/// Solves y^T A = r^T, i.e. A^T y = r, by elimination with partial pivoting.
fn solve_rows(a: &Mat2, r: [C; 2]) -> Option<[C; 2]> {
    // A^T
    let m = [[a[(0, 0)], a[(1, 0)]], [a[(0, 1)], a[(1, 1)]]];
    let (p, q) = if m[0][0].norm() >= m[1][0].norm() { (0, 1) } else { (1, 0) };
    if m[p][0].norm() == 0.0 {
        return None;
    }
    let l = m[q][0] / m[p][0];
    let u22 = m[q][1] - l * m[p][1];
    if u22.norm() == 0.0 {
        return None;
    }
    let y2 = (r[q] - l * r[p]) / u22;
    let y1 = (r[p] - m[p][1] * y2) / m[p][0];
    Some([y1, y2])
}

fn cond(a: &Mat2) -> f64 {
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let fro = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    // for 2x2, ||A||_F ||A^{-1}||_F = ||A||_F^2 / |det A|
    if det.norm() == 0.0 {
        f64::INFINITY
    } else {
        fro / det.norm()
    }
}

fn poly_at(bs: &[Mat2], k: C) -> Mat2 {
    let mut m = Mat2::identity();
    for b in bs {
        m = (Mat2::identity() * k + b) * m;
    }
    m
}

/// B_1..B_N in the given pole order, with the worst stage condition number.
pub fn solve_dressing_cond(pd: &PoleData, x: f64, t: f64) -> Result<(Vec<Mat2>, f64)> {
    let d = d_coeffs(pd, x, t)?;
    if d.iter().any(|z| !z.is_finite()) {
        return Err(Error::SingularSystem { x, t });
    }
    let mut bs: Vec<Mat2> = Vec::with_capacity(pd.len());
    let mut worst: f64 = 1.0;
    for (j, &kj) in pd.poles.iter().enumerate() {
        let v1 = poly_at(&bs, kj) * nalgebra::Vector2::new(C::new(1.0, 0.0), -d[j]);
        let v2 = poly_at(&bs, kj.conj()) * nalgebra::Vector2::new(-d[j].conj(), C::new(1.0, 0.0));
        let v = Mat2::new(v1[0], v2[0], v1[1], v2[1]);
        let c = cond(&v);
        worst = worst.max(c);
        if !(c < MAX_COND) {
            return Err(Error::SingularSystem { x, t });
        }
        // (k_j I + B) v1 = 0 and (conj k_j I + B) v2 = 0, row by row
        let mut b = Mat2::zeros();
        for r in 0..2 {
            let row = solve_rows(&v, [-kj * v1[r], -kj.conj() * v2[r]]).ok_or(Error::SingularSystem { x, t })?;
            b[(r, 0)] = row[0];
            b[(r, 1)] = row[1];
        }
        bs.push(b);
    }
    Ok((bs, worst))
}

/// det [v1 v2] of each stage system, the denominators of the recursion.
pub fn stage_determinants(pd: &PoleData, x: f64, t: f64) -> Result<Vec<C>> {
    let d = d_coeffs(pd, x, t)?;
    let mut bs: Vec<Mat2> = Vec::with_capacity(pd.len());
    let mut dets = Vec::with_capacity(pd.len());
    for (j, &kj) in pd.poles.iter().enumerate() {
        let v1 = poly_at(&bs, kj) * nalgebra::Vector2::new(C::new(1.0, 0.0), -d[j]);
        let v2 = poly_at(&bs, kj.conj()) * nalgebra::Vector2::new(-d[j].conj(), C::new(1.0, 0.0));
        let det = v1[0] * v2[1] - v2[0] * v1[1];
        dets.push(det);
        if det.norm() == 0.0 {
            break;
        }
        let v = Mat2::new(v1[0], v2[0], v1[1], v2[1]);
        let mut b = Mat2::zeros();
        for r in 0..2 {
            let row = solve_rows(&v, [-kj * v1[r], -kj.conj() * v2[r]]).ok_or(Error::SingularSystem { x, t })?;
            b[(r, 0)] = row[0];
            b[(r, 1)] = row[1];
        }
        bs.push(b);
    }
    Ok(dets)
}

pub fn solve_dressing(pd: &PoleData, x: f64, t: f64) -> Result<Vec<Mat2>> {
    solve_dressing_cond(pd, x, t).map(|(b, _)| b)
}

/// Pole data in ascending |k_j|, which fixes the order of the recursion.
#[derive(Debug, Clone, Serialize)]
pub struct DressedSolution {
    pub pole_data: PoleData,
    /// Index of each sorted pole in the input pole list.
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub x: f64,
    pub t: f64,
    pub u: C,
}

impl DressedSolution {
    pub fn new(pd: PoleData) -> Result<Self> {
        coincidence_check(&pd.poles, pd.omega)?;
        let mut order: Vec<usize> = (0..pd.len()).collect();
        order.sort_by(|&a, &b| pd.poles[a].norm().total_cmp(&pd.poles[b].norm()));
        let sorted = PoleData {
            omega: pd.omega,
            poles: order.iter().map(|&i| pd.poles[i]).collect(),
            residues: order.iter().map(|&i| pd.residues[i]).collect(),
        };
        Ok(Self { pole_data: sorted, order })
    }

    /// Uses the pole order as given instead of sorting.
    pub fn with_order(pd: PoleData) -> Result<Self> {
        coincidence_check(&pd.poles, pd.omega)?;
        let order = (0..pd.len()).collect();
        Ok(Self { pole_data: pd, order })
    }

    pub fn n(&self) -> usize {
        self.pole_data.len()
    }

    pub fn b_matrices(&self, x: f64, t: f64) -> Result<Vec<Mat2>> {
        solve_dressing(&self.pole_data, x, t)
    }

    pub fn u(&self, x: f64, t: f64) -> Result<C> {
        let bs = self.b_matrices(x, t)?;
        Ok(2.0 * I * bs.iter().map(|b| b[(0, 1)]).sum::<C>())
    }

    /// Worst condition number over the stages at (x, t).
    pub fn condition(&self, x: f64, t: f64) -> Result<f64> {
        solve_dressing_cond(&self.pole_data, x, t).map(|(_, c)| c)
    }

    /// (k I + B_N)...(k I + B_1) diag(prod (k - k_j)^{-1}, prod (k - conj k_j)^{-1}).
    pub fn mhat(&self, x: f64, t: f64, k: C) -> Result<Mat2> {
        let bs = self.b_matrices(x, t)?;
        self.mhat_from(&bs, k)
    }

    fn mhat_from(&self, bs: &[Mat2], k: C) -> Result<Mat2> {
        let scale = 1.0 + k.norm();
        for &kj in &self.pole_data.poles {
            for p in [kj, kj.conj()] {
                if (k - p).norm() <= 1e-14 * scale {
                    return Err(Error::EvalAtPole(p));
                }
            }
        }
        let mut d1 = C::new(1.0, 0.0);
        let mut d2 = C::new(1.0, 0.0);
        for &kj in &self.pole_data.poles {
            d1 *= k - kj;
            d2 *= k - kj.conj();
        }
        let mut m = poly_at(bs, k);
        for r in 0..2 {
            m[(r, 0)] /= d1;
            m[(r, 1)] /= d2;
        }
        Ok(m)
    }

    /// Largest deviation in the residue conditions at every k_j and conj k_j,
    /// relative to the size of the columns involved.
    pub fn residue_condition_error(&self, x: f64, t: f64) -> Result<f64> {
        let bs = self.b_matrices(x, t)?;
        let ks = &self.pole_data.poles;
        let mut worst: f64 = 0.0;
        for (j, (&kj, &hj)) in ks.iter().zip(&self.pole_data.residues).enumerate() {
            // column 1 at k_j: P(k_j) col 1 over prod_{l != j}(k_j - k_l)
            let p = poly_at(&bs, kj);
            let mut den1 = C::new(1.0, 0.0);
            let mut den2 = C::new(1.0, 0.0);
            for (l, &kl) in ks.iter().enumerate() {
                if l != j {
                    den1 *= kj - kl;
                }
                den2 *= kj - kl.conj();
            }
            let e = (2.0 * I * (kj * x + 2.0 * kj * kj * t)).exp();
            for r in 0..2 {
                let lhs = p[(r, 0)] / den1;
                let rhs = -hj * e * p[(r, 1)] / den2;
                worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm() + rhs.norm()));
            }
            // column 2 at conj k_j
            let kb = kj.conj();
            let p = poly_at(&bs, kb);
            let mut den1 = C::new(1.0, 0.0);
            let mut den2 = C::new(1.0, 0.0);
            for (l, &kl) in ks.iter().enumerate() {
                den1 *= kb - kl;
                if l != j {
                    den2 *= kb - kl.conj();
                }
            }
            let e = (-2.0 * I * (kb * x + 2.0 * kb * kb * t)).exp();
            for r in 0..2 {
                let lhs = p[(r, 1)] / den2;
                let rhs = -hj.conj() * e * p[(r, 0)] / den1;
                worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm() + rhs.norm()));
            }
        }
        Ok(worst)
    }

    /// u on the tensor grid xs x ts, x-major; points are independent.
    pub fn eval_grid(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<GridPoint>> {
        let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
        pts.par_iter().map(|&(x, t)| Ok(GridPoint { x, t, u: self.u(x, t)? })).collect()
    }
}

pub fn u_of_xt(sol: &DressedSolution, x: f64, t: f64) -> Result<C> {
    sol.u(x, t)
}

pub fn mhat(sol: &DressedSolution, x: f64, t: f64, k: C) -> Result<Mat2> {
    sol.mhat(x, t, k)
}

/// n equally spaced values on [a, b] (n >= 2), or [a] when n = 1.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// CSV "x,t,re_u,im_u" with 17 significant digits.
pub fn write_csv<W: Write>(mut w: W, pts: &[GridPoint]) -> std::io::Result<()> {
    writeln!(w, "x,t,re_u,im_u")?;
    for p in pts {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.t, p.u.re, p.u.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{self, FamilyD};
    use approx::assert_relative_eq;

    fn family_d_data(alpha: f64, omega: f64) -> PoleData {
        let d = FamilyD::new(alpha, omega).unwrap();
        PoleData::new(omega, vec![d.k1()], vec![d.h1()]).unwrap()
    }

    #[test]
    fn d1_at_origin() {
        let pd = PoleData::new(1.0, vec![I / 2.0], vec![-I / (1.0 + 2f64.sqrt())]).unwrap();
        let d = d_coeffs(&pd, 0.0, 0.0).unwrap();
        assert_relative_eq!(d[0].re, 1.0 / (1.0 + 2f64.sqrt()), epsilon = 1e-15);
        assert!(d[0].im.abs() < 1e-15);
        let d_tau = d_coeffs(&pd, 0.3, pd.tau()).unwrap()[0];
        assert!((d_coeffs(&pd, 0.3, 0.0).unwrap()[0] - d_tau).norm() < 1e-14);
    }

    #[test]
    fn family_d_matches_explicit_solution() {
        for (a, w) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
            let sol = DressedSolution::new(family_d_data(a, w)).unwrap();
            let d = FamilyD::new(a, w).unwrap();
            assert!((sol.u(0.0, 0.0).unwrap() - a).norm() < 1e-13);
            for &x in &[0.0, 0.7, 2.5, 5.0] {
                for &t in &[0.0, 1.3, 4.0] {
                    let u = sol.u(x, t).unwrap();
                    let e = d.u(x, t);
                    assert!((u - e).norm() <= 1e-12 * e.norm().max(1e-300), "{a} {w} {x} {t}: {u} {e}");
                }
            }
        }
    }

    #[test]
    fn b12_display_for_one_pole() {
        let pd = family_d_data(1.0, 1.0);
        let (k1, h1) = (pd.poles[0], pd.residues[0]);
        let (x, t) = (0.4, 0.9);
        let b = solve_dressing(&pd, x, t).unwrap()[0];
        let expected = -4.0 * h1.conj() * k1 * k1 * (-2.0 * I * k1 * (2.0 * k1 * t - x)).exp()
            / (4.0 * k1 * k1 + h1 * h1.conj() * (4.0 * I * k1 * x).exp());
        assert!((b[(0, 1)] - expected).norm() < 1e-14);
        // B = sigma_1 conj(B) sigma_1
        assert!((b[(1, 0)] - b[(0, 1)].conj()).norm() < 1e-14);
        assert!((b[(1, 1)] - b[(0, 0)].conj()).norm() < 1e-14);
    }

    #[test]
    fn singular_only_at_negative_x() {
        let pd = family_d_data(1.0, 1.0);
        let xs = closedform::singularity_x(1.0, 1.0);
        assert!((xs + (3.0 + 2.0 * 2f64.sqrt()).ln() / 2.0).abs() < 1e-14);
        assert!(matches!(solve_dressing(&pd, xs, 0.0), Err(Error::SingularSystem { .. })));
        for x in linspace(0.0, 20.0, 81) {
            assert!(solve_dressing(&pd, x, 0.3).is_ok());
        }
    }

    #[test]
    fn limit_and_residue_conditions() {
        let pd = PoleData::new(4.0, vec![I, 2.0 * I], vec![C::new(1.0, 0.0), C::new(1.0, 1.0)]).unwrap();
        let sol = DressedSolution::new(pd).unwrap();
        for &(x, t) in &[(0.2, 0.1), (1.0, 0.7), (3.0, 2.0)] {
            let u = sol.u(x, t).unwrap();
            let k = C::new(0.0, 1e6);
            let m = sol.mhat(x, t, k).unwrap();
            let lim = 2.0 * I * k * m[(0, 1)];
            assert!((lim - u).norm() <= 1e-5 * u.norm());
            assert!(sol.residue_condition_error(x, t).unwrap() < 1e-12);
            assert!((sol.u(x, t + sol.pole_data.tau()).unwrap() - u).norm() < 1e-12);
        }
        assert!(matches!(sol.mhat(0.0, 0.0, I), Err(Error::EvalAtPole(_))));
    }

    #[test]
    fn empty_data_is_zero() {
        let sol = DressedSolution::new(PoleData::empty(1.0)).unwrap();
        assert_eq!(sol.u(1.0, 2.0).unwrap(), C::new(0.0, 0.0));
        assert_eq!(sol.mhat(1.0, 2.0, C::new(0.3, 0.2)).unwrap(), Mat2::identity());
    }

    #[test]
    fn csv_format() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[GridPoint { x: 0.0, t: 1.0, u: C::new(0.5, -0.25) }]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("x,t,re_u,im_u"));
        assert_eq!(s.lines().nth(1), Some("0.0000000000000000e0,1.0000000000000000e0,5.0000000000000000e-1,-2.5000000000000000e-1"));
    }
}
