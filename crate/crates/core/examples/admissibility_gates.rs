//! Admissibility verdicts for an admissible pair and two rejected ones.

use num_complex::Complex64 as C;
use periodic_nls::admissibility::{verdict, GateOptions};
use periodic_nls::PeriodicPair;

fn main() -> periodic_nls::Result<()> {
    let opts = GateOptions::default();
    let cases = [
        ("family D (0.5, 2)", PeriodicPair::family_d(0.5, 2.0)?),
        ("c = +alpha sqrt(omega + alpha^2)", PeriodicPair::exponential(1.0, 1.0, C::new(2f64.sqrt(), 0.0))?),
        ("family C (1, -4, i sqrt 2)", PeriodicPair::exponential(1.0, -4.0, C::new(0.0, 2f64.sqrt()))?),
    ];
    for (name, pair) in &cases {
        let rep = verdict(pair, &opts)?;
        println!("{name}: {:?}", rep.verdict);
        if rep.is_admissible() {
            println!("  sup |Q^b| on R = {:.10}", rep.sup_qb_on_r.unwrap_or(f64::NAN));
            for c in &rep.pole_candidates {
                println!("  pole of P^b at {} (n = {}), residue {:.10}", c.k, c.n, c.residue);
            }
        }
    }
    Ok(())
}
