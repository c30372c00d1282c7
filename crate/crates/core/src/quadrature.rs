//! Gauss-Legendre rules, composite panels and circle trapezoid sums.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal panels on [a, b], each with the given rule.
pub fn composite_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| {
            let lo = a + p as f64 * width;
            rule.mapped(lo, lo + width).collect::<Vec<_>>()
        })
        .collect()
}

/// Points of an `m`-node trapezoid rule on the circle |k - center| = radius.
/// Returns (k, dk weight) so that the sum of f(k) * w approximates the
/// contour integral of f counterclockwise.
pub fn circle_nodes(center: Complex64, radius: f64, m: usize) -> Vec<(Complex64, Complex64)> {
    (0..m)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let e = Complex64::from_polar(1.0, theta);
            (center + e * radius, Complex64::i() * e * radius * (2.0 * PI / m as f64))
        })
        .collect()
}

/// (1 / 2 pi i) times the counterclockwise contour integral of `f` over a circle.
pub fn circle_residue<F: FnMut(Complex64) -> Complex64>(
    center: Complex64,
    radius: f64,
    m: usize,
    mut f: F,
) -> Complex64 {
    let sum: Complex64 = circle_nodes(center, radius, m)
        .into_iter()
        .map(|(k, w)| f(k) * w)
        .sum();
    sum / (2.0 * PI * Complex64::i())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(16);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // degree 31 is the highest exact degree
        let v = rule.integrate(0.0, 1.0, |x| x.powi(30));
        assert!((v - 1.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn odd_node_count_has_zero_node() {
        let rule = GaussLegendre::new(5);
        assert!(rule.nodes[2].abs() < 1e-15);
        assert!((rule.weights[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn circle_residue_of_simple_pole() {
        let p = Complex64::new(0.3, -0.2);
        let r = circle_residue(p, 0.1, 64, |k| Complex64::new(2.0, 1.0) / (k - p) + k * k);
        assert!((r - Complex64::new(2.0, 1.0)).norm() < 1e-14);
    }
}
