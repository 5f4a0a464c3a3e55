//! Even cat state (eta = sqrt2) prepared through the lowest dressed state;
//! fidelity to the analytic cat and the Wigner function at the origin.

use std::f64::consts::{PI, SQRT_2};

use nhqc::analysis::{even_cat, reduced_cavity, state_fidelity, wigner};
use nhqc::dynamics::{propagate_schrodinger, PropagationOptions, System};
use nhqc::linalg::MU;
use nhqc::pulse::{cat_target, prep_schedule};
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, SQRT_2 * wc, 30)?.tuned(0, 8)?;
    let system = System::new(model)?;
    let (beta_f, eps) = cat_target(SQRT_2, 8);
    let schedule = prep_schedule(beta_f, &eps, 35.0, &system.spectrum, 0)?;
    let psi0 = system.layout().ket(MU, &[0]);
    let res = propagate_schrodinger(&system, &schedule, &psi0, &PropagationOptions::pure())?;

    let rho = res.final_density();
    let cat = system.layout().embed(MU, &even_cat(SQRT_2, 30));
    println!("fidelity to the even cat: {:.4}", state_fidelity(&rho, &cat));
    let w = wigner(&reduced_cavity(&rho, system.layout()), &[0.0], &[0.0])?;
    println!("W(0) = {:+.4} (ideal cat: {:+.4})", w.values[0][0], 2.0 / PI);
    Ok(())
}
