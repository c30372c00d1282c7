//! a(k), b(k) and h(k) from the Cauchy transform of log(1 - |Q^b|^2).

use num_complex::Complex64 as C;
use periodic_nls::closedform::FamilyD;
use periodic_nls::scalar_rh::{ScalarFunctions, ScalarOptions};
use periodic_nls::PeriodicPair;

fn main() -> periodic_nls::Result<()> {
    let (alpha, omega) = (0.5, 2.0);
    let pair = PeriodicPair::family_d(alpha, omega)?;
    let d = FamilyD::new(alpha, omega)?;
    let sf = ScalarFunctions::from_pair(&pair, ScalarOptions::for_pair(&pair))?;
    for k in [C::new(0.5, 0.1), C::new(-2.0, 1.0), d.k1()] {
        let a = sf.a(k)?;
        println!("a({k}) = {a:.12}, rational form error {:.1e}", (a - d.a(k)).norm());
    }
    for x in [0.0, 1.5] {
        let a = sf.a_boundary(x);
        let b = sf.b_boundary(x)?;
        println!("x = {x}: |a|^2 - |b|^2 - 1 = {:.1e}", a.norm_sqr() - b.norm_sqr() - 1.0);
    }
    let pd = sf.h_residues(omega, &[(d.k1(), d.pb_residue())])?;
    println!("h1 = {:.12} (closed form {:.12})", pd.residues[0], d.h1());
    Ok(())
}
