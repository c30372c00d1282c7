//! Building periodic boundary pairs and reading them back from JSON.

use num_complex::Complex64 as C;
use periodic_nls::{Mode, PeriodicPair};

fn main() -> periodic_nls::Result<()> {
    // alpha e^{i omega t}, c e^{i omega t} with c = -alpha sqrt(omega + alpha^2)
    let d = PeriodicPair::family_d(1.0, 1.0)?;
    let (g0, g1) = d.eval(0.7);
    println!("family D (1,1): tau = {:.6}, g0(0.7) = {g0:.6}, g1(0.7) = {g1:.6}", d.tau());

    let tau = 3.0;
    let f = PeriodicPair::fourier(
        tau,
        vec![Mode { n: 0, coeff: C::new(0.2, 0.0) }, Mode { n: 1, coeff: C::new(0.0, 0.1) }],
        vec![Mode { n: 1, coeff: C::new(-0.05, 0.0) }],
    )?;
    println!("fourier pair: lattice omega = {:.6}, g0(0) = {:.6}", f.lattice_omega(), f.g0_at_zero());

    // the same pair recovered from samples
    let s = PeriodicPair::from_samples(tau, 64, 1e-12, |t| f.eval(t))?;
    let err = (0..10).map(|j| j as f64 * 0.29).map(|t| (s.eval(t).0 - f.eval(t).0).norm()).fold(0.0, f64::max);
    println!("sampled pair reproduces g0 to {err:.1e}");

    let json = serde_json::to_string(&d).expect("serialize");
    let back: PeriodicPair = serde_json::from_str(&json).expect("parse");
    println!("JSON: {json}");
    assert_eq!(back.tau(), d.tau());
    Ok(())
}
