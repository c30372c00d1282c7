//! Q^b, P^b and (A^b)^2 from the monodromy, against the closed forms.

use num_complex::Complex64 as C;
use periodic_nls::closedform::FamilyD;
use periodic_nls::spectral::{self, Function};
use periodic_nls::PeriodicPair;

fn main() -> periodic_nls::Result<()> {
    let (alpha, omega) = (1.0, 1.0);
    let pair = PeriodicPair::family_d(alpha, omega)?;
    let d = FamilyD::new(alpha, omega)?;
    let tol = 1e-11;
    for k in [C::new(-1.3, 0.0), C::new(0.37, 0.0), C::new(0.6, 0.3)] {
        let s = spectral::sample(&pair, k, tol)?;
        println!(
            "k = {k}: Q^b = {:.10}, err {:.1e}; P^b err {:.1e}; (A^b)^2 err {:.1e}",
            s.qb,
            (s.qb - d.qb(k)).norm(),
            (s.pb - d.pb(k)).norm(),
            (s.ab2 - d.ab2(k)).norm()
        );
    }
    // k = 0 is a lattice point: the sample is flagged, the guarded value is a limit
    let s = spectral::sample(&pair, C::new(0.0, 0.0), tol)?;
    let q0 = spectral::value(&pair, Function::Qb, C::new(0.0, 0.0), tol)?;
    println!("k = 0: near_singular = {}, Q^b limit = {q0:.8} (exact {:.8})", s.near_singular, d.qb(C::new(0.0, 0.0)));
    Ok(())
}
