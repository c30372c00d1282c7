//! Boundary pair to solution: gates, a(k), residues of h, dressing, and the
//! comparison with the explicit single-pole solution.

use periodic_nls::closedform::FamilyD;
use periodic_nls::dressing::linspace;
use periodic_nls::pipeline::{build, Outcome, PipelineOptions};
use periodic_nls::PeriodicPair;

fn main() -> periodic_nls::Result<()> {
    let (alpha, omega) = (0.5, 2.0);
    let pair = PeriodicPair::family_d(alpha, omega)?;
    let b = match build(&pair, &PipelineOptions::default())? {
        Outcome::Built(b) => b,
        Outcome::Rejected(rep) => {
            println!("rejected: {:?}", rep.verdict);
            return Ok(());
        }
    };
    println!("descriptor: {}", serde_json::to_string(b.pole_data()).expect("json"));
    let d = FamilyD::new(alpha, omega)?;
    let mut worst: f64 = 0.0;
    for x in linspace(0.0, 5.0, 11) {
        for t in linspace(0.0, 2.0 * pair.tau(), 9) {
            let e = d.u(x, t);
            worst = worst.max((b.solution.u(x, t)? - e).norm() / e.norm());
        }
    }
    println!("max relative deviation from the explicit solution: {worst:.1e}");
    Ok(())
}
