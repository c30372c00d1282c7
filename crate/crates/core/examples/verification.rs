//! Finite-difference verification of an explicit solution.

use periodic_nls::closedform::FamilyD;
use periodic_nls::dressing::linspace;
use periodic_nls::verify::{verify, VerifyOptions};
use periodic_nls::PeriodicPair;

fn main() -> periodic_nls::Result<()> {
    let d = FamilyD::new(1.0, 1.0)?;
    let pair = PeriodicPair::family_d(1.0, 1.0)?;
    let u = |x: f64, t: f64| Ok(d.u(x, t));
    let xs = linspace(0.0, 5.0, 21);
    let ts = linspace(0.0, 2.0 * pair.tau(), 17);
    let rep = verify(&u, Some(&pair), pair.tau(), &xs, &ts, &linspace(0.0, 20.0, 41), &VerifyOptions::default())?;
    println!("PDE residual {:.2e} (order {:.2})", rep.max_pde_residual, rep.pde_order.unwrap_or(f64::NAN));
    println!("boundary errors {:.1e} / {:.1e}", rep.boundary_err_g0.unwrap_or(0.0), rep.boundary_err_g1.unwrap_or(0.0));
    println!("periodicity {:.1e}, pass = {}", rep.periodicity_err, rep.pass);
    // a plane wave off the dispersion relation is a calibrated failure
    let w = |_: f64, t: f64| Ok(num_complex::Complex64::new(0.0, t).exp());
    let r = periodic_nls::verify::nls_residual(&w, &xs, &ts, 1e-3, 1e-3)?;
    println!("plane wave e^{{it}}: residual {r:.6} (expected 3)");
    Ok(())
}
