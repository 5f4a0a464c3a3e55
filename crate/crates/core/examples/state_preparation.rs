//! Preparation of (|0~> + sqrt2|1~>)/sqrt3 from |mu,0>: Fock populations from
//! the effective and full dynamics, and a Wigner cut of the result.

use std::f64::consts::PI;

use nhqc::analysis::{fock_populations_pure, linspace, reduced_cavity, wigner};
use nhqc::dynamics::{propagate_effective, propagate_schrodinger, PropagationOptions, System};
use nhqc::linalg::MU;
use nhqc::pulse::{prep_schedule, superposition_target};
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let wc = 2.0 * PI * 6.25;
    let model = RabiModel::single_mode(wc, wc, 0.7 * wc, 20)?.tuned(2, 4)?;
    let system = System::new(model)?;
    let (beta_f, eps) = superposition_target();
    let schedule = prep_schedule(beta_f, &eps, 35.0, &system.spectrum, 2)?;
    let psi0 = system.layout().ket(MU, &[0]);
    let opts = PropagationOptions::pure();

    let eff = propagate_effective(&system, &schedule, &psi0, &opts)?.final_vector().unwrap();
    let full = propagate_schrodinger(&system, &schedule, &psi0, &opts)?;
    let full_v = full.final_vector().unwrap();
    let pe = fock_populations_pure(&eff, system.layout(), MU);
    let pf = fock_populations_pure(&full_v, system.layout(), MU);
    println!("n  effective  full");
    for n in [0, 2, 4] {
        println!("{n}  {:.4}     {:.4}", pe[n], pf[n]);
    }

    let rho = reduced_cavity(&full.final_density(), system.layout());
    let x = linspace(-2.5, 2.5, 11);
    let w = wigner(&rho, &x, &[0.0])?;
    println!("W(x, 0): {:?}", w.values[0].iter().map(|v| format!("{v:+.3}")).collect::<Vec<_>>());
    Ok(())
}
