//! The one-period monodromy Z(k) of the boundary t-problem.

use num_complex::Complex64 as C;
use periodic_nls::monodromy::{check_z_asymptotics, DEFAULT_TOL};
use periodic_nls::{monodromy, PeriodicPair};

fn main() -> periodic_nls::Result<()> {
    let pair = PeriodicPair::family_d(1.0, 1.0)?;
    for k in [C::new(0.3, 0.0), C::new(1.7, 0.0), C::new(0.4, 0.2)] {
        let m = monodromy(&pair, k, DEFAULT_TOL)?;
        let z = m.z();
        println!(
            "k = {k}: |det Z - 1| = {:.1e}, |Z11|^2 - |Z12|^2 = {:.12}, steps = {}, est = {:.1e}",
            (m.det() - 1.0).norm(),
            z[(0, 0)].norm_sqr() - z[(0, 1)].norm_sqr(),
            m.steps,
            m.est_error
        );
    }
    let zero = PeriodicPair::zero(1.0)?;
    let m = monodromy(&zero, C::new(0.8, 0.0), DEFAULT_TOL)?;
    println!("zero pair: Z11 = {:.12}", m.z()[(0, 0)]);

    // off the lattice sqrt(n)/2
    let ks: Vec<C> = [4.1, 6.1, 8.1].iter().map(|&r| C::new(r, 0.0)).collect();
    let rep = check_z_asymptotics(&pair, &ks, DEFAULT_TOL)?;
    for (k, d) in ks.iter().zip(&rep.deviations) {
        // the remainder is O(1/k^2) with an oscillating factor
        println!("large-k deviation at {k}: {d:.2e}, times k^2: {:.3}", d * k.norm_sqr());
    }
    Ok(())
}
