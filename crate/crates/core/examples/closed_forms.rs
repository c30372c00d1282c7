//! Classification of exponential triples and the explicit single-pole solution.

use num_complex::Complex64 as C;
use periodic_nls::closedform::{classify, ExponentialTriple, FamilyD};

fn main() -> periodic_nls::Result<()> {
    let a: f64 = 1.0;
    let triples = [
        ("D-", ExponentialTriple::family_d_minus(1.0, 1.0)?),
        ("D+", ExponentialTriple::new(1.0, 1.0, C::new(2f64.sqrt(), 0.0))?),
        // c = sqrt((omega + 3 a^2)^3 / (27 a^2)) + i |omega|^{3/2} / (3 sqrt 3 a) at omega = -1
        ("A", ExponentialTriple::new(a, -1.0, C::new((8.0 / (27.0 * a * a)).sqrt(), 1.0 / (3.0 * 3f64.sqrt() * a)))?),
        ("C", ExponentialTriple::new(1.0, -4.0, C::new(0.0, 2f64.sqrt()))?),
        ("D, omega = 0", ExponentialTriple::new(1.0, 0.0, C::new(-1.0, 0.0))?),
    ];
    for (name, t) in &triples {
        let c = classify(t);
        println!("{name}: {:?} {:?}", c.family, c.verdict);
    }
    let d = FamilyD::new(1.0, 1.0)?;
    println!("k1 = {}, h1 = {:.12}", d.k1(), d.h1());
    println!("u(0, 0) = {:.12}, u(1, 2) = {:.12}", d.u(0.0, 0.0), d.u(1.0, 2.0));
    println!("singular abscissa {:.12}", d.singularity_x());
    Ok(())
}
