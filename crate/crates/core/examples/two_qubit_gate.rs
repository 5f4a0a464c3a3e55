//! CNOT on two cavity modes sharing one atom (omega_b = 0.9 omega_a,
//! g = 1.3 omega_a). Arguments: cutoff, T in ns, optional eigenbasis size.

use std::f64::consts::PI;

use nhqc::analysis::GateProblem;
use nhqc::codes::GateSpec;
use nhqc::dynamics::PropagationOptions;
use nhqc::rabi::RabiModel;

fn main() -> nhqc::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let cutoff = args.first().copied().unwrap_or(6);
    let t_f = args.get(1).copied().unwrap_or(750) as f64;
    let basis = args.get(2).copied();

    let wa = 2.0 * PI * 6.25;
    let model = RabiModel::bimodal(wa, 0.9 * wa, wa, 1.3 * wa, 1.3 * wa, cutoff)?.tuned(0, 4)?;
    let cnot = GateSpec::two(PI / 2.0, 0.0, PI / 2.0, PI / 2.0, PI)?;
    let problem = GateProblem::two_qubit(model, cnot, 0, t_f)?;
    let opts = PropagationOptions { basis_size: basis, ..PropagationOptions::pure() };
    for delta in [0.0, 0.1] {
        let r = problem.fidelity_of(&problem.schedule.with_error(delta), &opts)?;
        println!("cutoff {cutoff}, T = {t_f} ns, delta = {delta}: F = {:.5}", r.f_bar);
    }
    Ok(())
}
