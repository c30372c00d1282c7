//! Two-pole dressing: u(x, t), M-hat and the residue conditions.

use num_complex::Complex64 as C;
use periodic_nls::dressing::{linspace, write_csv, DressedSolution};
use periodic_nls::scalar_rh::PoleData;

fn main() -> periodic_nls::Result<()> {
    let pd = PoleData::new(4.0, vec![C::new(0.0, 1.0), C::new(0.0, 2.0)], vec![C::new(-1.0, 0.0), C::new(-1.0, -1.0)])?;
    let sol = DressedSolution::new(pd)?;
    let (x, t) = (0.8, 0.3);
    let u = sol.u(x, t)?;
    let k = C::new(0.0, 1e6);
    let lim = C::new(0.0, 2.0) * k * sol.mhat(x, t, k)?[(0, 1)];
    println!("u({x}, {t}) = {u:.12}; 2i k M12 at k = 1e6 i: {lim:.12}");
    println!("residue conditions hold to {:.1e}", sol.residue_condition_error(x, t)?);
    println!("u(x, t + tau) - u(x, t) = {:.1e}", (sol.u(x, t + sol.pole_data.tau())? - u).norm());
    let pts = sol.eval_grid(&linspace(0.0, 2.0, 3), &linspace(0.0, 1.0, 2))?;
    write_csv(std::io::stdout().lock(), &pts).expect("stdout");
    Ok(())
}
